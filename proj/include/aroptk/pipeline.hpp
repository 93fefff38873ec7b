#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "aroptk/core.hpp"
#include "aroptk/csvio.hpp"
#include "aroptk/rates.hpp"

namespace aroptk::pipeline {

struct PipelineConfig {
    csvio::PanelPaths panel;
    std::filesystem::path criteria_mask;
    rates::RateVariant variant;
    rates::ShareBasis share_basis = rates::ShareBasis::value_added;

    std::vector<FilterTag> filters = {FilterTag::DW, FilterTag::EMD, FilterTag::EHP};
    bool run_battery = true;
    std::vector<rates::MaskProvenance> selection_methods;  // pca_simple/pca_weighted/bw/dfm

    int seasonality_window_years = 9;
    int wavelet_depth = 4;

    RngSeed ehp_seed;
    RngSeed split_seed;
    RngSeed dfm_seed;

    std::filesystem::path output_dir;
};

struct SlopeCell {
    std::string mask;    // provenance label
    FilterTag filter = FilterTag::DW;
    double slope = 0.0;
};

struct PipelineReport {
    std::vector<double> criteria_arop;
    int start_year = 0;
    /// Trend slope per filter on the criteria-mask series.
    std::map<std::string, double> criteria_slopes;
    /// Mask x filter trend slopes from the comparison stage.
    std::vector<SlopeCell> slope_matrix;
    /// Relative path -> FNV-1a content hash of every emitted file.
    std::map<std::string, std::string> manifest;
};

/// Raised with the failing stage's name prefixed to the message; any files the
/// run had already written are removed before this propagates.
struct StageError : std::runtime_error {
    std::string stage;
    int exit_code;  // CLI mapping: 2 config, 3 data, 4 numeric
    StageError(std::string stage_name, const std::string& message, int code = 3)
        : std::runtime_error(stage_name + ": " + message),
          stage(std::move(stage_name)),
          exit_code(code) {}
};

/// Runs the full sequence: (1) ARoP under the criteria mask, (2) seasonality
/// table and additivity verdict, (3) trend filters with OLS slopes, (4) the
/// unit-root battery, (5) selection masks per enabled methodology, (6) ARoP
/// recomputed per mask, re-filtered, and the slope-sign matrix. Outputs land
/// under <output_dir>/<stage>/ with a manifest.json of content hashes; reruns
/// with identical inputs are byte-identical.
PipelineReport run_pipeline(const PipelineConfig& config);

}  // namespace aroptk::pipeline
