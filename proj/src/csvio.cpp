#include "aroptk/csvio.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace aroptk::csvio {

namespace fs = std::filesystem;

std::string format_number(double x) {
    if (!std::isfinite(x)) throw NumericError("cannot serialize non-finite value");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double parse_number(const std::string& field, const std::string& context) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0' || errno == ERANGE)
        throw DataError(context + ": cannot parse number '" + field + "'");
    if (!std::isfinite(v)) throw DataError(context + ": non-finite value '" + field + "'");
    return v;
}

int parse_year(const std::string& field, const std::string& context) {
    errno = 0;
    char* end = nullptr;
    long v = std::strtol(field.c_str(), &end, 10);
    if (end == field.c_str() || *end != '\0' || errno == ERANGE || v < -100000 || v > 100000)
        throw DataError(context + ": cannot parse year '" + field + "'");
    return static_cast<int>(v);
}

namespace {

std::vector<std::string> split_row(const std::string& line, const std::string& context) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"' && cell.empty()) {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    if (quoted) throw DataError(context + ": unterminated quote");
    cells.push_back(std::move(cell));
    return cells;
}

std::string quote_cell(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

Table read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    Table table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_row(line, path.string() + ":" + std::to_string(lineno));
        if (table.header.empty()) {
            table.header = std::move(cells);
        } else {
            if (cells.size() != table.header.size())
                throw DataError(path.string() + ":" + std::to_string(lineno) +
                                ": expected " + std::to_string(table.header.size()) +
                                " cells, got " + std::to_string(cells.size()));
            table.rows.push_back(std::move(cells));
        }
    }
    if (table.header.empty()) throw DataError("'" + path.string() + "' is empty or has no header");
    return table;
}

void write_csv(const fs::path& path, const Table& table) {
    std::string out;
    auto append_row = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += quote_cell(cells[i]);
        }
        out += '\n';
    };
    append_row(table.header);
    for (const auto& row : table.rows) append_row(row);
    write_text(path, out);
}

TimeSeries load_series(const fs::path& path, const std::string& label) {
    Table table = read_csv(path);
    if (table.header.size() != 2)
        throw DataError("'" + path.string() + "': expected two columns (year, value)");
    std::map<int, double> by_year;
    for (const auto& row : table.rows) {
        int year = parse_year(row[0], path.string());
        if (!by_year.emplace(year, parse_number(row[1], path.string())).second)
            throw DataError("'" + path.string() + "': duplicate year " + std::to_string(year));
    }
    if (by_year.empty()) throw DataError("'" + path.string() + "' has no data rows");
    TimeSeries ts;
    ts.start_year = by_year.begin()->first;
    ts.label = label.empty() ? path.stem().string() : label;
    int expected = ts.start_year;
    for (const auto& [year, value] : by_year) {
        if (year != expected)
            throw DataError("'" + path.string() + "': missing year " + std::to_string(expected));
        ts.values.push_back(value);
        ++expected;
    }
    return ts;
}

void write_series(const fs::path& path, const TimeSeries& series,
                  const std::string& value_header) {
    Table table;
    table.header = {"year", value_header};
    for (std::size_t i = 0; i < series.size(); ++i)
        table.rows.push_back({std::to_string(series.year_at(i)),
                              format_number(series.values[i])});
    write_csv(path, table);
}

namespace {

struct LongMatrix {
    std::vector<std::string> sectors;  // first-appearance order, original names
    int start_year = 0;
    int n_years = 0;
    Eigen::MatrixXd values;
};

LongMatrix load_long(const fs::path& path) {
    Table table = read_csv(path);
    if (table.header.size() != 3)
        throw DataError("'" + path.string() + "': expected three columns (sector, year, value)");

    std::map<std::string, std::size_t> index;  // normalized name -> row
    LongMatrix out;
    std::map<std::pair<std::size_t, int>, double> cells;
    int ymin = 0, ymax = 0;
    bool first = true;
    for (const auto& row : table.rows) {
        std::string norm = rates::normalize_sector_name(row[0]);
        auto [it, inserted] = index.emplace(norm, out.sectors.size());
        if (inserted) out.sectors.push_back(row[0]);
        int year = parse_year(row[1], path.string());
        double value = parse_number(row[2], path.string());
        if (!cells.emplace(std::make_pair(it->second, year), value).second)
            throw DataError("'" + path.string() + "': duplicate cell (" + row[0] + ", " +
                            row[1] + ")");
        if (first || year < ymin) ymin = year;
        if (first || year > ymax) ymax = year;
        first = false;
    }
    if (first) throw DataError("'" + path.string() + "' has no data rows");

    out.start_year = ymin;
    out.n_years = ymax - ymin + 1;
    out.values.resize(static_cast<Eigen::Index>(out.sectors.size()), out.n_years);
    for (std::size_t s = 0; s < out.sectors.size(); ++s)
        for (int t = 0; t < out.n_years; ++t) {
            auto it = cells.find({s, ymin + t});
            if (it == cells.end())
                throw DataError("'" + path.string() + "': missing cell (" + out.sectors[s] +
                                ", " + std::to_string(ymin + t) + ")");
            out.values(static_cast<Eigen::Index>(s), t) = it->second;
        }
    return out;
}

}  // namespace

rates::SectorPanel load_panel(const PanelPaths& paths) {
    LongMatrix surplus = load_long(paths.surplus);
    rates::SectorPanel panel;
    panel.sectors = surplus.sectors;
    panel.start_year = surplus.start_year;
    panel.n_years = surplus.n_years;
    panel.surplus = surplus.values;

    auto aligned = [&](const fs::path& path) {
        LongMatrix m = load_long(path);
        if (m.start_year != panel.start_year || m.n_years != panel.n_years)
            throw DataError("'" + path.string() + "': year range differs from the surplus file");
        if (m.sectors.size() != panel.sectors.size())
            throw DataError("'" + path.string() + "': sector set differs from the surplus file");
        // Reorder to the surplus file's sector order by normalized name.
        std::map<std::string, Eigen::Index> pos;
        for (std::size_t i = 0; i < m.sectors.size(); ++i)
            pos[rates::normalize_sector_name(m.sectors[i])] = static_cast<Eigen::Index>(i);
        Eigen::MatrixXd values(m.values.rows(), m.values.cols());
        for (std::size_t i = 0; i < panel.sectors.size(); ++i) {
            auto it = pos.find(rates::normalize_sector_name(panel.sectors[i]));
            if (it == pos.end())
                throw DataError("'" + path.string() + "': missing sector '" + panel.sectors[i] +
                                "'");
            values.row(static_cast<Eigen::Index>(i)) = m.values.row(it->second);
        }
        return values;
    };
    panel.depreciation = aligned(paths.depreciation);
    panel.compensation = aligned(paths.compensation);
    panel.value_added = aligned(paths.value_added);

    auto economywide = [&](const fs::path& path) {
        TimeSeries ts = load_series(path);
        if (ts.start_year != panel.start_year ||
            static_cast<int>(ts.size()) != panel.n_years)
            throw DataError("'" + path.string() + "': year range differs from the surplus file");
        return Eigen::Map<const Eigen::VectorXd>(ts.values.data(),
                                                 static_cast<Eigen::Index>(ts.size()))
            .eval();
    };
    panel.total_capital_stock = economywide(paths.capital_stock);
    panel.total_intermediate_consumption = economywide(paths.intermediate_consumption);

    panel.validate();
    return panel;
}

rates::ClassificationMask load_mask(const fs::path& path, rates::MaskProvenance provenance) {
    Table table = read_csv(path);
    if (table.header.size() != 2)
        throw DataError("'" + path.string() + "': expected two columns (sector, flag)");
    rates::ClassificationMask mask;
    mask.provenance = provenance;
    for (const auto& row : table.rows) {
        std::string norm = rates::normalize_sector_name(row[0]);
        if (row[1] != "0" && row[1] != "1")
            throw DataError("'" + path.string() + "': flag for '" + row[0] +
                            "' must be 0 or 1, got '" + row[1] + "'");
        if (!mask.flags.emplace(norm, row[1] == "1" ? 1 : 0).second)
            throw DataError("'" + path.string() + "': duplicate sector '" + row[0] + "'");
    }
    if (mask.flags.empty()) throw DataError("'" + path.string() + "' has no data rows");
    mask.validate();
    return mask;
}

void write_mask(const fs::path& path, const rates::ClassificationMask& mask) {
    Table table;
    table.header = {"sector", "flag"};
    for (const auto& [sector, flag] : mask.flags)
        table.rows.push_back({sector, std::to_string(flag)});
    write_csv(path, table);
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_hash(const fs::path& path) { return content_hash(read_text(path)); }

}  // namespace aroptk::csvio
