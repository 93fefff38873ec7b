#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aroptk/core.hpp"
#include "aroptk/rates.hpp"

namespace aroptk::csvio {

/// 12 significant digits, fixed decimal point, no locale. Round-trips through
/// parse_number within 1e-12 relative error.
std::string format_number(double x);

double parse_number(const std::string& field, const std::string& context);
int parse_year(const std::string& field, const std::string& context);

/// Comma-separated cells with RFC-4180-style quoting for fields that contain
/// commas or quotes. Header row in `header`.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const Table& table);

/// Two-column (year, value) series file.
TimeSeries load_series(const std::filesystem::path& path, const std::string& label = "");
void write_series(const std::filesystem::path& path, const TimeSeries& series,
                  const std::string& value_header = "value");

struct PanelPaths {
    std::filesystem::path surplus;
    std::filesystem::path depreciation;
    std::filesystem::path compensation;
    std::filesystem::path value_added;
    std::filesystem::path capital_stock;              // economy-wide (year, value)
    std::filesystem::path intermediate_consumption;   // economy-wide (year, value)
};

/// Long-format (sector, year, value) matrices plus the two economy-wide
/// series. Sector order follows first appearance in the surplus file; every
/// file must cover the same contiguous year range and sector set.
rates::SectorPanel load_panel(const PanelPaths& paths);

rates::ClassificationMask load_mask(const std::filesystem::path& path,
                                    rates::MaskProvenance provenance);
void write_mask(const std::filesystem::path& path, const rates::ClassificationMask& mask);

/// Writes pre-serialized text (JSON sidecars, SVG) without alteration.
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// FNV-1a 64-bit content hash, lowercase hex; used by pipeline manifests.
std::string content_hash(const std::string& bytes);
std::string file_hash(const std::filesystem::path& path);

}  // namespace aroptk::csvio
