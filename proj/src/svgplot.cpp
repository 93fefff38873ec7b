#include "aroptk/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace aroptk::svgplot {

namespace {

const char* kPalette[] = {"#1b6ca8", "#c0392b", "#27823b", "#8e44ad",
                          "#b9770e", "#16727c", "#5d6d7e", "#884ea0"};
constexpr int kPaletteSize = 8;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, y0, x1, y1;  // plot area in SVG coordinates
    double xmin, xmax, ymin, ymax;

    double sx(double x) const { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); }
    double sy(double y) const { return y1 - (y - ymin) / (ymax - ymin) * (y1 - y0); }
};

void expand_if_flat(double& lo, double& hi) {
    if (hi - lo < 1e-12) {
        double pad = std::max(1.0, std::abs(lo));
        lo -= pad;
        hi += pad;
    }
}

std::string axes(const Frame& f, const std::string& x_label, const std::string& y_label) {
    std::string out;
    out += "<line x1=\"" + fmt(f.x0) + "\" y1=\"" + fmt(f.y1) + "\" x2=\"" + fmt(f.x1) +
           "\" y2=\"" + fmt(f.y1) + "\" stroke=\"#333\"/>\n";
    out += "<line x1=\"" + fmt(f.x0) + "\" y1=\"" + fmt(f.y0) + "\" x2=\"" + fmt(f.x0) +
           "\" y2=\"" + fmt(f.y1) + "\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double tx = f.xmin + (f.xmax - f.xmin) * i / 5.0;
        double ty = f.ymin + (f.ymax - f.ymin) * i / 5.0;
        out += "<text x=\"" + fmt(f.sx(tx)) + "\" y=\"" + fmt(f.y1 + 16) +
               "\" font-size=\"11\" text-anchor=\"middle\" class=\"tick-x\">" +
               fmt(tx) + "</text>\n";
        out += "<text x=\"" + fmt(f.x0 - 6) + "\" y=\"" + fmt(f.sy(ty) + 4) +
               "\" font-size=\"11\" text-anchor=\"end\" class=\"tick-y\">" +
               fmt(ty) + "</text>\n";
    }
    out += "<text x=\"" + fmt((f.x0 + f.x1) / 2) + "\" y=\"" + fmt(f.y1 + 34) +
           "\" font-size=\"12\" text-anchor=\"middle\" class=\"x-label\">" +
           escape(x_label) + "</text>\n";
    out += "<text x=\"14\" y=\"" + fmt((f.y0 + f.y1) / 2) +
           "\" font-size=\"12\" text-anchor=\"middle\" class=\"y-label\" transform=\"rotate(-90 14 " +
           fmt((f.y0 + f.y1) / 2) + ")\">" + escape(y_label) + "</text>\n";
    return out;
}

std::string header(int width, int height, const std::string& title) {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(width) + "\" height=\"" + std::to_string(height) +
                      "\" viewBox=\"0 0 " + std::to_string(width) + " " +
                      std::to_string(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (!title.empty())
        out += "<text x=\"" + fmt(width / 2.0) +
               "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\" class=\"title\">" +
               escape(title) + "</text>\n";
    return out;
}

}  // namespace

std::string render_plot(const std::vector<PlotSeries>& series, const PlotOptions& options) {
    if (series.empty()) throw DataError("render_plot: no series");
    for (const auto& s : series)
        if (s.values.empty()) throw DataError("render_plot: empty series '" + s.label + "'");

    double xmin = std::numeric_limits<double>::max(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        xmin = std::min(xmin, static_cast<double>(s.start_year));
        xmax = std::max(xmax, static_cast<double>(s.start_year) +
                                  static_cast<double>(s.values.size() - 1));
        for (double v : s.values) {
            if (!std::isfinite(v)) throw DataError("render_plot: non-finite value");
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    expand_if_flat(xmin, xmax);
    expand_if_flat(ymin, ymax);

    Frame f{60, 34, options.width - 170.0, options.height - 50.0, xmin, xmax, ymin, ymax};
    std::string out = header(options.width, options.height, options.title);
    out += axes(f, "year", options.y_label);

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = kPalette[i % kPaletteSize];
        std::string pts;
        for (std::size_t t = 0; t < s.values.size(); ++t) {
            if (t) pts += ' ';
            pts += fmt(f.sx(s.start_year + static_cast<double>(t))) + "," +
                   fmt(f.sy(s.values[t]));
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" class=\"series\" points=\"" + pts + "\"/>\n";
        double ly = 44 + 18.0 * static_cast<double>(i);
        out += "<rect x=\"" + fmt(f.x1 + 12) + "\" y=\"" + fmt(ly - 9) +
               "\" width=\"14\" height=\"4\" fill=\"" + color + "\"/>\n";
        out += "<text x=\"" + fmt(f.x1 + 30) + "\" y=\"" + fmt(ly - 3) +
               "\" font-size=\"11\" class=\"legend\">" + escape(s.label) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string render_histogram(const std::vector<HistogramBar>& bars,
                             const std::vector<std::pair<double, double>>& density_curve,
                             const PlotOptions& options) {
    if (bars.empty()) throw DataError("render_histogram: no bars");
    double xmin = bars.front().left, xmax = bars.back().right, ymax = 0.0;
    for (const auto& b : bars) ymax = std::max(ymax, b.density);
    for (const auto& [x, y] : density_curve) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymax = std::max(ymax, y);
    }
    double ymin = 0.0;
    expand_if_flat(xmin, xmax);
    expand_if_flat(ymin, ymax);

    Frame f{60, 34, options.width - 30.0, options.height - 50.0, xmin, xmax, ymin, ymax};
    std::string out = header(options.width, options.height, options.title);
    out += axes(f, "value", options.y_label.empty() ? "density" : options.y_label);
    for (const auto& b : bars) {
        double x = f.sx(b.left), w = f.sx(b.right) - x;
        double y = f.sy(b.density);
        out += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) +
               "\" height=\"" + fmt(f.y1 - y) +
               "\" fill=\"#9ec9e2\" stroke=\"#4a7ba6\" class=\"bar\"/>\n";
    }
    if (!density_curve.empty()) {
        std::string pts;
        for (std::size_t i = 0; i < density_curve.size(); ++i) {
            if (i) pts += ' ';
            pts += fmt(f.sx(density_curve[i].first)) + "," + fmt(f.sy(density_curve[i].second));
        }
        out += "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" "
               "class=\"density\" points=\"" + pts + "\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string render_heatmap(const std::vector<std::vector<double>>& matrix,
                           const std::vector<std::string>& row_labels,
                           const std::vector<std::string>& col_labels,
                           const PlotOptions& options) {
    if (matrix.empty() || matrix.front().empty()) throw DataError("render_heatmap: empty matrix");
    const std::size_t rows = matrix.size(), cols = matrix.front().size();
    double vmax = 0.0;
    for (const auto& row : matrix) {
        if (row.size() != cols) throw DataError("render_heatmap: ragged matrix");
        for (double v : row) vmax = std::max(vmax, std::abs(v));
    }
    if (vmax <= 0.0) vmax = 1.0;

    double x0 = 90, y0 = 34;
    double cw = (options.width - 110.0 - x0) / static_cast<double>(cols);
    double ch = (options.height - 60.0 - y0) / static_cast<double>(rows);
    std::string out = header(options.width, options.height, options.title);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            double frac = std::abs(matrix[r][c]) / vmax;
            int shade = static_cast<int>(std::lround(255.0 * (1.0 - frac)));
            char color[8];
            std::snprintf(color, sizeof color, "#%02x%02xff", shade, shade);
            out += "<rect x=\"" + fmt(x0 + cw * static_cast<double>(c)) + "\" y=\"" +
                   fmt(y0 + ch * static_cast<double>(r)) + "\" width=\"" + fmt(cw) +
                   "\" height=\"" + fmt(ch) + "\" fill=\"" + color + "\" class=\"cell\"/>\n";
        }
        if (r < row_labels.size())
            out += "<text x=\"" + fmt(x0 - 6) + "\" y=\"" +
                   fmt(y0 + ch * (static_cast<double>(r) + 0.5) + 4) +
                   "\" font-size=\"10\" text-anchor=\"end\">" + escape(row_labels[r]) +
                   "</text>\n";
    }
    for (std::size_t c = 0; c < cols && c < col_labels.size(); ++c)
        out += "<text x=\"" + fmt(x0 + cw * (static_cast<double>(c) + 0.5)) + "\" y=\"" +
               fmt(y0 + ch * static_cast<double>(rows) + 14) +
               "\" font-size=\"10\" text-anchor=\"middle\">" + escape(col_labels[c]) +
               "</text>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace aroptk::svgplot
