#pragma once

#include <string>
#include <vector>

#include "aroptk/core.hpp"

namespace aroptk::svgplot {

/// One line in a chart: x positions are calendar years.
struct PlotSeries {
    std::string label;
    int start_year = 0;
    std::vector<double> values;
};

struct PlotOptions {
    std::string title;
    std::string y_label = "rate";
    int width = 840;
    int height = 480;
};

/// Deterministic line chart (no timestamps, fixed palette): one polyline per
/// series, x axis in years, legend entries matching the series labels.
std::string render_plot(const std::vector<PlotSeries>& series, const PlotOptions& options = {});

/// Histogram with a density overlay, both drawn from precomputed points.
struct HistogramBar {
    double left = 0.0, right = 0.0, density = 0.0;
};
std::string render_histogram(const std::vector<HistogramBar>& bars,
                             const std::vector<std::pair<double, double>>& density_curve,
                             const PlotOptions& options = {});

/// Spectrogram-style heat map: rows are periods, columns window indices.
std::string render_heatmap(const std::vector<std::vector<double>>& matrix,
                           const std::vector<std::string>& row_labels,
                           const std::vector<std::string>& col_labels,
                           const PlotOptions& options = {});

}  // namespace aroptk::svgplot
