#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aroptk/csvio.hpp"
#include "aroptk/dfm.hpp"
#include "aroptk/dimred.hpp"
#include "aroptk/distfit.hpp"
#include "aroptk/filters.hpp"
#include "aroptk/pipeline.hpp"
#include "aroptk/rates.hpp"
#include "aroptk/reglm.hpp"
#include "aroptk/spectral.hpp"
#include "aroptk/svgplot.hpp"
#include "aroptk/unitroot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace aroptk;

namespace {

struct PanelOpts {
    std::string dir;
    std::string surplus, depreciation, compensation, value_added;
    std::string capital_stock, intermediate;

    csvio::PanelPaths paths() const {
        auto pick = [&](const std::string& explicit_path, const char* name) -> fs::path {
            if (!explicit_path.empty()) return explicit_path;
            if (!dir.empty()) return fs::path(dir) / (std::string(name) + ".csv");
            throw ConfigError(std::string("panel file for '") + name +
                              "' not given (use --panel-dir or the explicit option)");
        };
        csvio::PanelPaths p;
        p.surplus = pick(surplus, "surplus");
        p.depreciation = pick(depreciation, "depreciation");
        p.compensation = pick(compensation, "compensation");
        p.value_added = pick(value_added, "value_added");
        p.capital_stock = pick(capital_stock, "capital_stock");
        p.intermediate_consumption = pick(intermediate, "intermediate_consumption");
        return p;
    }
};

void add_panel_options(CLI::App* cmd, PanelOpts& opts) {
    cmd->add_option("--panel-dir", opts.dir,
                    "Directory holding surplus.csv, depreciation.csv, compensation.csv, "
                    "value_added.csv, capital_stock.csv, intermediate_consumption.csv");
    cmd->add_option("--surplus", opts.surplus, "Long-format (sector,year,value) CSV");
    cmd->add_option("--depreciation", opts.depreciation);
    cmd->add_option("--compensation", opts.compensation);
    cmd->add_option("--value-added", opts.value_added);
    cmd->add_option("--capital-stock", opts.capital_stock, "(year,value) CSV");
    cmd->add_option("--intermediate", opts.intermediate, "(year,value) CSV");
}

struct VariantOpts {
    std::string basis = "net";
    std::string weighting = "weighted";
    std::string share_basis = "value_added";

    rates::RateVariant variant() const {
        rates::RateVariant v;
        if (basis == "gross") v.basis = rates::RateBasis::gross;
        else if (basis == "net") v.basis = rates::RateBasis::net;
        else throw ConfigError("basis must be gross or net, got '" + basis + "'");
        if (weighting == "weighted") v.weighting = rates::RateWeighting::weighted;
        else if (weighting == "unweighted") v.weighting = rates::RateWeighting::unweighted;
        else throw ConfigError("weighting must be weighted or unweighted");
        return v;
    }
    rates::ShareBasis shares() const {
        if (share_basis == "value_added") return rates::ShareBasis::value_added;
        if (share_basis == "compensation") return rates::ShareBasis::compensation;
        throw ConfigError("share basis must be value_added or compensation");
    }
};

void add_variant_options(CLI::App* cmd, VariantOpts& opts) {
    cmd->add_option("--basis", opts.basis, "gross|net")->capture_default_str();
    cmd->add_option("--weighting", opts.weighting, "weighted|unweighted")
        ->capture_default_str();
    cmd->add_option("--share-basis", opts.share_basis, "value_added|compensation")
        ->capture_default_str();
}

fs::path outdir(const std::string& out) {
    if (out.empty()) throw ConfigError("--out is required");
    fs::path p = out;
    fs::create_directories(p);
    return p;
}

void write_table(const fs::path& path, const csvio::Table& table) {
    csvio::write_csv(path, table);
}

TimeSeries load_series_arg(const std::string& path) {
    if (path.empty()) throw ConfigError("--series is required");
    return csvio::load_series(path);
}

Eigen::MatrixXd rate_matrix_of(const rates::SectorPanel& panel, const VariantOpts& v) {
    return rates::sector_rates(panel, v.variant().basis, v.shares()).transpose();
}

std::string filter_slug(FilterTag tag) {
    switch (tag) {
        case FilterTag::DW: return "dw";
        case FilterTag::EMD: return "emd";
        case FilterTag::EHP: return "ehp";
    }
    return "dw";
}

FilterTag parse_filter(const std::string& name) {
    if (name == "dw") return FilterTag::DW;
    if (name == "emd") return FilterTag::EMD;
    if (name == "ehp") return FilterTag::EHP;
    throw ConfigError("unknown filter '" + name + "' (dw|emd|ehp)");
}

Decomposition run_filter(const TimeSeries& series, FilterTag tag, int depth,
                         RngSeed seed, std::vector<double>* ehp_log) {
    switch (tag) {
        case FilterTag::DW: {
            filters::WaveletSpec spec;
            spec.depth_J = depth;
            int block = 1 << depth;
            if (static_cast<int>(series.size()) % block == 0)
                return filters::dwt_mra(series, spec);
            return filters::modwt_mra(series, spec);
        }
        case FilterTag::EMD:
            return filters::emd(series, filters::EmdSpec{});
        case FilterTag::EHP: {
            filters::EhpSpec spec;
            spec.seed = seed;
            auto res = filters::ehp(series, spec);
            if (ehp_log) *ehp_log = res.draw_log;
            return res.mean_trend;
        }
    }
    throw ConfigError("unknown filter");
}

csvio::Table decomposition_table(const Decomposition& d) {
    csvio::Table t;
    t.header = {"year", "trend"};
    for (const auto& c : d.components) t.header.push_back(c.name);
    for (std::size_t i = 0; i < d.source.size(); ++i) {
        std::vector<std::string> row = {std::to_string(d.source.year_at(i)),
                                        csvio::format_number(d.trend[i])};
        for (const auto& c : d.components) row.push_back(csvio::format_number(c.values[i]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::map<std::string, std::map<std::string, std::string>> parse_ini(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::map<std::string, std::map<std::string, std::string>> out;
    std::string line, section;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const char* ws = " \t\r";
        auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        auto e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected key = value");
        out[section][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return out;
}

pipeline::PipelineConfig config_from_ini(const fs::path& path) {
    auto ini = parse_ini(path);
    auto get = [&](const std::string& section, const std::string& key,
                   const std::string& fallback = "", bool required = false) {
        auto s = ini.find(section);
        if (s != ini.end()) {
            auto k = s->second.find(key);
            if (k != s->second.end()) return k->second;
        }
        if (required)
            throw ConfigError(path.string() + ": missing [" + section + "] " + key);
        return fallback;
    };
    auto base = path.parent_path();
    auto resolve = [&](const std::string& p) -> fs::path {
        if (p.empty()) return {};
        fs::path fp = p;
        return fp.is_absolute() ? fp : base / fp;
    };

    pipeline::PipelineConfig cfg;
    std::string panel_dir = get("panel", "dir");
    auto panel_path = [&](const char* key) -> fs::path {
        std::string v = get("panel", key);
        if (!v.empty()) return resolve(v);
        if (!panel_dir.empty()) return resolve(panel_dir) / (std::string(key) + ".csv");
        throw ConfigError(path.string() + ": missing [panel] " + key);
    };
    cfg.panel.surplus = panel_path("surplus");
    cfg.panel.depreciation = panel_path("depreciation");
    cfg.panel.compensation = panel_path("compensation");
    cfg.panel.value_added = panel_path("value_added");
    cfg.panel.capital_stock = panel_path("capital_stock");
    cfg.panel.intermediate_consumption = panel_path("intermediate_consumption");

    cfg.criteria_mask = resolve(get("run", "criteria_mask"));
    VariantOpts v;
    v.basis = get("run", "basis", "net");
    v.weighting = get("run", "weighting", "weighted");
    v.share_basis = get("run", "share_basis", "value_added");
    cfg.variant = v.variant();
    cfg.share_basis = v.shares();

    auto split_list = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                if (!cur.empty()) out.push_back(cur);
                cur.clear();
            } else if (c != ' ') {
                cur += c;
            }
        }
        if (!cur.empty()) out.push_back(cur);
        return out;
    };
    cfg.filters.clear();
    for (const auto& f : split_list(get("run", "filters", "dw,emd,ehp")))
        cfg.filters.push_back(parse_filter(f));
    std::string battery = get("run", "battery", "true");
    if (battery != "true" && battery != "false")
        throw ConfigError(path.string() + ": [run] battery must be true or false");
    cfg.run_battery = battery == "true";
    for (const auto& m : split_list(get("run", "selection", "")))
        cfg.selection_methods.push_back(rates::provenance_from_string(m));
    cfg.seasonality_window_years = std::stoi(get("run", "window_years", "9"));
    cfg.wavelet_depth = std::stoi(get("run", "wavelet_depth", "4"));

    cfg.ehp_seed.seed = std::stoull(get("seeds", "ehp", "0"));
    cfg.split_seed.seed = std::stoull(get("seeds", "split", "0"));
    cfg.dfm_seed.seed = std::stoull(get("seeds", "dfm", "0"));

    std::string out = get("run", "output_dir", "", true);
    if (const char* env = std::getenv("AROPTK_OUTDIR")) out = env;
    cfg.output_dir = resolve(out);
    return cfg;
}

json fit_to_json(const distfit::DistributionFit& f) {
    json j;
    j["family"] = distfit::to_string(f.family);
    j["method"] = distfit::to_string(f.method);
    j["params"] = f.params;
    j["loglik"] = f.loglik;
    j["bic"] = f.bic;
    return j;
}

void write_battery(const fs::path& dir, const unitroot::TestReport& grid) {
    csvio::Table t;
    t.header = {"family", "variation", "level_0.01", "level_0.05", "level_0.10"};
    json raw = json::array();
    for (const auto& row : grid.rows) {
        std::vector<std::string> cells = {unitroot::to_string(row.family), row.variation};
        json entry;
        entry["family"] = unitroot::to_string(row.family);
        entry["variation"] = row.variation;
        entry["statistic"] = row.statistic;
        entry["lags"] = row.lags_used;
        for (double level : unitroot::significance_levels()) {
            cells.push_back(unitroot::to_string(row.verdict.at(level)));
            entry["cv_" + csvio::format_number(level)] = row.critical_values.at(level);
        }
        t.rows.push_back(std::move(cells));
        raw.push_back(std::move(entry));
    }
    write_table(dir / "battery.csv", t);
    csvio::write_text(dir / "battery.json", raw.dump(2) + "\n");
}

void write_mask_file(const fs::path& path, const rates::ClassificationMask& mask) {
    csvio::write_mask(path, mask);
}

rates::ClassificationMask mask_excluding(const rates::SectorPanel& panel,
                                         const std::vector<std::string>& excluded,
                                         rates::MaskProvenance prov) {
    rates::ClassificationMask m;
    m.provenance = prov;
    for (const auto& s : panel.sectors) m.flags[rates::normalize_sector_name(s)] = 1;
    for (const auto& s : excluded) m.flags[rates::normalize_sector_name(s)] = 0;
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aroptk: weighted average-rate-of-profit trend toolkit"};
    app.require_subcommand(1);

    // ingest-check
    auto* ingest = app.add_subcommand("ingest-check", "Validate panel and mask files");
    PanelOpts ingest_panel;
    std::string ingest_mask;
    add_panel_options(ingest, ingest_panel);
    ingest->add_option("--mask", ingest_mask, "Classification mask CSV");
    ingest->callback([&] {
        rates::SectorPanel panel = csvio::load_panel(ingest_panel.paths());
        std::cout << "panel: " << panel.sectors.size() << " sectors, years "
                  << panel.start_year << "-" << panel.start_year + panel.n_years - 1 << "\n";
        if (!ingest_mask.empty()) {
            auto mask = csvio::load_mask(ingest_mask, rates::MaskProvenance::criteria);
            int included = 0, missing = 0;
            for (const auto& s : panel.sectors) {
                auto it = mask.flags.find(rates::normalize_sector_name(s));
                if (it == mask.flags.end()) {
                    std::cerr << "mask missing sector: " << s << "\n";
                    ++missing;
                } else if (it->second == 1) {
                    ++included;
                }
            }
            for (const auto& [name, flag] : mask.flags) {
                bool known = false;
                for (const auto& s : panel.sectors)
                    if (rates::normalize_sector_name(s) == name) known = true;
                if (!known) std::cerr << "mask names unknown sector: " << name << "\n";
            }
            if (missing > 0) throw DataError("mask does not cover every panel sector");
            std::cout << "mask: " << included << " of " << panel.sectors.size()
                      << " sectors included\n";
        }
        std::cout << "ok\n";
    });

    // arop
    auto* arop_cmd = app.add_subcommand("arop", "Compute the masked ARoP series");
    PanelOpts arop_panel;
    VariantOpts arop_variant;
    std::string arop_mask, arop_out;
    add_panel_options(arop_cmd, arop_panel);
    add_variant_options(arop_cmd, arop_variant);
    arop_cmd->add_option("--mask", arop_mask, "Mask CSV; omitted = include all sectors");
    arop_cmd->add_option("--out", arop_out, "Output directory")->required();
    arop_cmd->callback([&] {
        rates::SectorPanel panel = csvio::load_panel(arop_panel.paths());
        rates::ClassificationMask mask =
            arop_mask.empty() ? rates::all_ones_mask(panel)
                              : csvio::load_mask(arop_mask, rates::MaskProvenance::criteria);
        TimeSeries series = rates::compute_arop(panel, mask, arop_variant.variant(),
                                                arop_variant.shares());
        fs::path dir = outdir(arop_out);
        csvio::write_series(dir / "arop.csv", series, "arop");
        json sidecar;
        sidecar["variant"] = rates::to_string(arop_variant.variant());
        sidecar["provenance"] = rates::to_string(mask.provenance);
        std::vector<std::string> included;
        for (const auto& s : panel.sectors)
            if (mask.included(s)) included.push_back(s);
        sidecar["included_sectors"] = included;
        csvio::write_text(dir / "arop.json", sidecar.dump(2) + "\n");
        svgplot::PlotOptions opts;
        opts.title = "Average rate of profit";
        csvio::write_text(dir / "arop.svg",
                          svgplot::render_plot(
                              {{series.label.empty() ? "arop" : series.label,
                                series.start_year, series.values}},
                              opts));
    });

    // seasonality
    auto* seas = app.add_subcommand("seasonality", "Sub-period Fourier analysis");
    std::string seas_series, seas_out;
    int seas_window = 9, stft_window = 0, stft_overlap = 0;
    seas->add_option("--series", seas_series, "(year,value) CSV")->required();
    seas->add_option("--window", seas_window, "Sub-period span in years")
        ->capture_default_str();
    seas->add_option("--stft-window", stft_window, "Emit a spectrogram with this window");
    seas->add_option("--stft-overlap", stft_overlap)->capture_default_str();
    seas->add_option("--out", seas_out)->required();
    seas->callback([&] {
        TimeSeries series = load_series_arg(seas_series);
        auto table = spectral::subperiod_seasonality(series, seas_window);
        fs::path dir = outdir(seas_out);
        csvio::Table t;
        t.header = {"subperiod", "primary_period", "secondary_period"};
        for (const auto& row : table.rows)
            t.rows.push_back({std::to_string(row.start_year) + "-" +
                                  std::to_string(row.end_year),
                              std::to_string(row.primary_period),
                              std::to_string(row.secondary_period)});
        write_table(dir / "seasonality.csv", t);
        json j;
        j["pattern"] = spectral::additivity_verdict(table) ==
                               spectral::SeasonalPattern::additive
                           ? "additive"
                           : "multiplicative";
        csvio::write_text(dir / "verdict.json", j.dump(2) + "\n");
        if (stft_window > 0) {
            auto grid = spectral::stft(series, stft_window, stft_overlap);
            std::vector<std::string> rows, cols;
            for (double p : grid.periods) rows.push_back(csvio::format_number(p));
            std::vector<std::vector<double>> matrix(grid.power.size());
            for (std::size_t k = 0; k < grid.power.size(); ++k) matrix[k] = grid.power[k];
            for (int start : grid.column_start)
                cols.push_back(std::to_string(series.start_year + start));
            svgplot::PlotOptions opts;
            opts.title = "STFT power";
            csvio::write_text(dir / "spectrogram.svg",
                              svgplot::render_heatmap(matrix, rows, cols, opts));
        }
    });

    // filter
    auto* filt = app.add_subcommand("filter", "Decompose a series with one trend filter");
    std::string filt_series, filt_name = "dw", filt_out;
    int filt_depth = 4;
    std::uint64_t filt_seed = 0;
    filt->add_option("--series", filt_series)->required();
    filt->add_option("--filter", filt_name, "dw|emd|ehp")->capture_default_str();
    filt->add_option("--depth", filt_depth, "Wavelet depth J")->capture_default_str();
    filt->add_option("--seed", filt_seed, "EHP Gibbs seed")->capture_default_str();
    filt->add_option("--out", filt_out)->required();
    filt->callback([&] {
        TimeSeries series = load_series_arg(filt_series);
        FilterTag tag = parse_filter(filt_name);
        std::vector<double> ehp_log;
        Decomposition d = run_filter(series, tag, filt_depth, RngSeed{filt_seed}, &ehp_log);
        fs::path dir = outdir(filt_out);
        std::string slug = filter_slug(tag);
        write_table(dir / (slug + ".csv"), decomposition_table(d));
        svgplot::PlotOptions opts;
        opts.title = to_string(tag) + " trend";
        csvio::write_text(
            dir / (slug + ".svg"),
            svgplot::render_plot({{"input", series.start_year, series.values},
                                  {to_string(tag) + " trend", series.start_year, d.trend}},
                                 opts));
        if (tag == FilterTag::EHP) {
            csvio::Table t;
            t.header = {"iteration", "trend_at_midpoint"};
            for (std::size_t i = 0; i < ehp_log.size(); ++i)
                t.rows.push_back({std::to_string(i + 1), csvio::format_number(ehp_log[i])});
            write_table(dir / "ehp_convergence.csv", t);
        }
    });

    // battery
    auto* batt = app.add_subcommand("battery", "17-variant unit-root grid");
    std::string batt_series, batt_out;
    batt->add_option("--series", batt_series)->required();
    batt->add_option("--out", batt_out)->required();
    batt->callback([&] {
        TimeSeries series = load_series_arg(batt_series);
        write_battery(outdir(batt_out), unitroot::battery(series));
    });

    // pca
    auto* pca_cmd = app.add_subcommand("pca", "Principal components on sector rates");
    PanelOpts pca_panel;
    VariantOpts pca_variant;
    std::string pca_out;
    add_panel_options(pca_cmd, pca_panel);
    add_variant_options(pca_cmd, pca_variant);
    pca_cmd->add_option("--out", pca_out)->required();
    pca_cmd->callback([&] {
        rates::SectorPanel panel = csvio::load_panel(pca_panel.paths());
        auto res = dimred::pca(rate_matrix_of(panel, pca_variant), true, panel.sectors);
        fs::path dir = outdir(pca_out);

        csvio::Table contrib;
        contrib.header = {"sector"};
        for (int c = 0; c < res.retained; ++c)
            contrib.header.push_back("pc" + std::to_string(c + 1));
        for (Eigen::Index j = 0; j < res.contributions_pct.rows(); ++j) {
            std::vector<std::string> row = {panel.sectors[static_cast<std::size_t>(j)]};
            for (int c = 0; c < res.retained; ++c)
                row.push_back(csvio::format_number(res.contributions_pct(j, c)));
            contrib.rows.push_back(std::move(row));
        }
        write_table(dir / "contributions.csv", contrib);

        // Variable-component correlations (loadings scaled by sqrt eigenvalue).
        csvio::Table corr = contrib;
        corr.rows.clear();
        for (Eigen::Index j = 0; j < res.loadings.rows(); ++j) {
            std::vector<std::string> row = {panel.sectors[static_cast<std::size_t>(j)]};
            for (int c = 0; c < res.retained; ++c)
                row.push_back(csvio::format_number(
                    res.loadings(j, c) * std::sqrt(res.eigenvalues(c))));
            corr.rows.push_back(std::move(row));
        }
        write_table(dir / "component_correlations.csv", corr);

        std::vector<double> eig(res.eigenvalues.data(),
                                res.eigenvalues.data() + res.eigenvalues.size());
        svgplot::PlotOptions opts;
        opts.title = "Scree plot";
        opts.y_label = "eigenvalue";
        csvio::write_text(dir / "scree.svg", svgplot::render_plot({{"eigenvalue", 1, eig}},
                                                                  opts));

        for (auto mode : {dimred::SelectionMode::simple, dimred::SelectionMode::weighted}) {
            auto prov = mode == dimred::SelectionMode::simple
                            ? rates::MaskProvenance::pca_simple
                            : rates::MaskProvenance::pca_weighted;
            std::vector<std::string> excluded;
            csvio::Table scores;
            scores.header = {"sector", "score", "flagged"};
            for (const auto& s : dimred::select_sectors(res, mode)) {
                if (s.flagged) excluded.push_back(s.sector);
                scores.rows.push_back(
                    {s.sector, csvio::format_number(s.score), s.flagged ? "1" : "0"});
            }
            std::string label = rates::to_string(prov);
            write_table(dir / (label + "_scores.csv"), scores);
            write_mask_file(dir / (label + "_mask.csv"),
                            mask_excluding(panel, excluded, prov));
        }
    });

    // svd
    auto* svd_cmd = app.add_subcommand("svd", "Singular-value relevance with fitted cut");
    PanelOpts svd_panel;
    VariantOpts svd_variant;
    std::string svd_out;
    add_panel_options(svd_cmd, svd_panel);
    add_variant_options(svd_cmd, svd_variant);
    svd_cmd->add_option("--out", svd_out)->required();
    svd_cmd->callback([&] {
        rates::SectorPanel panel = csvio::load_panel(svd_panel.paths());
        Eigen::MatrixXd data = rate_matrix_of(panel, svd_variant);
        auto res = dimred::svd_relevance(data, true);
        fs::path dir = outdir(svd_out);

        csvio::Table sv;
        sv.header = {"index", "singular_value"};
        for (Eigen::Index i = 0; i < res.singular_values.size(); ++i)
            sv.rows.push_back({std::to_string(i + 1),
                               csvio::format_number(res.singular_values(i))});
        write_table(dir / "singular_values.csv", sv);

        std::vector<double> sample(res.singular_values.data(),
                                   res.singular_values.data() + res.singular_values.size());
        auto selection = distfit::select(sample, distfit::all_families(),
                                         distfit::all_methods());
        csvio::Table fits;
        fits.header = {"family", "method", "params", "loglik", "bic"};
        for (const auto& f : selection.fits) {
            std::string params;
            for (const auto& [k, v] : f.params) {
                if (!params.empty()) params += "; ";
                params += k + "=" + csvio::format_number(v);
            }
            fits.rows.push_back({distfit::to_string(f.family), distfit::to_string(f.method),
                                 params, csvio::format_number(f.loglik),
                                 csvio::format_number(f.bic)});
        }
        write_table(dir / "fit_table.csv", fits);

        json j;
        j["winner"] = fit_to_json(res.winning_fit);
        j["quantile_cut"] = res.quantile_cut;
        j["relevant_count"] = res.relevant_count;
        j["skipped"] = selection.skipped;
        csvio::write_text(dir / "svd.json", j.dump(2) + "\n");

        // Histogram of singular values with the winning density overlaid.
        double lo = *std::min_element(sample.begin(), sample.end());
        double hi = *std::max_element(sample.begin(), sample.end());
        if (hi - lo < 1e-12) hi = lo + 1.0;
        int bins = std::max(4, static_cast<int>(std::sqrt(sample.size())));
        std::vector<svgplot::HistogramBar> bars(static_cast<std::size_t>(bins));
        double width = (hi - lo) / bins;
        for (int b = 0; b < bins; ++b) {
            bars[static_cast<std::size_t>(b)].left = lo + b * width;
            bars[static_cast<std::size_t>(b)].right = lo + (b + 1) * width;
        }
        for (double v : sample) {
            int b = std::min(bins - 1, static_cast<int>((v - lo) / width));
            bars[static_cast<std::size_t>(b)].density +=
                1.0 / (static_cast<double>(sample.size()) * width);
        }
        std::vector<std::pair<double, double>> curve;
        for (int i = 0; i <= 200; ++i) {
            double x = lo + (hi - lo) * i / 200.0;
            double density = std::exp(distfit::log_pdf(res.winning_fit, x));
            if (std::isfinite(density)) curve.emplace_back(x, density);
        }
        svgplot::PlotOptions opts;
        opts.title = "Singular values";
        csvio::write_text(dir / "histogram.svg",
                          svgplot::render_histogram(bars, curve, opts));
    });

    // regress
    auto* reg = app.add_subcommand("regress", "Backward elimination on sector rates");
    PanelOpts reg_panel;
    VariantOpts reg_variant;
    std::string reg_target, reg_out;
    std::uint64_t reg_seed = 0;
    double reg_train = 0.8;
    add_panel_options(reg, reg_panel);
    add_variant_options(reg, reg_variant);
    reg->add_option("--target", reg_target, "Dependent (year,value) CSV")->required();
    reg->add_option("--seed", reg_seed, "Train/test split seed")->capture_default_str();
    reg->add_option("--train-fraction", reg_train)->capture_default_str();
    reg->add_option("--out", reg_out)->required();
    reg->callback([&] {
        rates::SectorPanel panel = csvio::load_panel(reg_panel.paths());
        TimeSeries target = csvio::load_series(reg_target);
        if (target.start_year != panel.start_year ||
            static_cast<int>(target.size()) != panel.n_years)
            throw DataError("target series year range differs from the panel");
        Eigen::MatrixXd X = rate_matrix_of(panel, reg_variant);
        Eigen::Map<const Eigen::VectorXd> y(target.values.data(),
                                            static_cast<Eigen::Index>(target.size()));
        auto trace = reglm::backward_eliminate(y, X, panel.sectors);
        fs::path dir = outdir(reg_out);

        csvio::Table t;
        t.header = {"step", "dropped", "aic_before", "aic_after"};
        for (std::size_t i = 0; i < trace.steps.size(); ++i)
            t.rows.push_back({std::to_string(i + 1), trace.steps[i].dropped_variable,
                              csvio::format_number(trace.steps[i].aic_before),
                              csvio::format_number(trace.steps[i].aic_after)});
        write_table(dir / "trace.csv", t);
        write_mask_file(dir / "bw_mask.csv",
                        mask_excluding(panel, trace.dropped, rates::MaskProvenance::bw));

        auto validation = reglm::validate(y, X, RngSeed{reg_seed}, reg_train, panel.sectors);
        json v;
        v["train_mae"] = validation.train_mae;
        v["test_mae"] = validation.test_mae;
        v["pseudo_r2"] = validation.pseudo_r2;
        v["vif"] = validation.vif;
        v["surviving"] = trace.surviving;
        csvio::write_text(dir / "validation.json", v.dump(2) + "\n");
    });

    // dfm
    auto* dfm_cmd = app.add_subcommand("dfm", "Dynamic factor model on sector rates");
    PanelOpts dfm_panel;
    VariantOpts dfm_variant;
    std::string dfm_out;
    int dfm_r = 0, dfm_p = 0;
    std::uint64_t dfm_seed_v = 0;
    add_panel_options(dfm_cmd, dfm_panel);
    add_variant_options(dfm_cmd, dfm_variant);
    dfm_cmd->add_option("--factors", dfm_r, "Factor count; 0 = Bai-Ng PC_p3")
        ->capture_default_str();
    dfm_cmd->add_option("--lags", dfm_p, "VAR lag order; 0 = AIC selection")
        ->capture_default_str();
    dfm_cmd->add_option("--seed", dfm_seed_v)->capture_default_str();
    dfm_cmd->add_option("--out", dfm_out)->required();
    dfm_cmd->callback([&] {
        rates::SectorPanel panel = csvio::load_panel(dfm_panel.paths());
        Eigen::MatrixXd X = rate_matrix_of(panel, dfm_variant);
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            double m = X.col(j).mean();
            X.col(j).array() -= m;
            double sd = std::sqrt(X.col(j).squaredNorm() / static_cast<double>(X.rows() - 1));
            if (sd <= 0.0)
                throw DataError("constant sector rate series cannot be standardized");
            X.col(j) /= sd;
        }
        dfm::DfmSpec spec;
        if (dfm_r > 0) {
            spec.factor_count = dfm_r;
            spec.allow_large_r = dfm_r > 6;
        } else {
            int k_max = static_cast<int>(
                std::min<Eigen::Index>(6, std::min(X.rows(), X.cols()) - 1));
            spec.factor_count = dfm::select_factor_count(X, k_max).r;
        }
        if (dfm_p > 0) {
            spec.lag_order = dfm_p;
        } else {
            // Lag selection on the PCA factor estimates.
            Eigen::MatrixXd cov = X.transpose() * X / static_cast<double>(X.rows());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
            Eigen::MatrixXd load(X.cols(), spec.factor_count);
            for (int c = 0; c < spec.factor_count; ++c)
                load.col(c) = es.eigenvectors().col(X.cols() - 1 - c);
            Eigen::MatrixXd scores = X * load;
            int p_max = std::min<int>(4, static_cast<int>(X.rows()) / 8);
            spec.lag_order = p_max >= 1 ? dfm::select_lag_order(scores, p_max).aic : 1;
        }
        auto fit = dfm::fit_dfm(X, spec, RngSeed{dfm_seed_v});
        fs::path dir = outdir(dfm_out);

        csvio::Table factors;
        factors.header = {"year"};
        for (int c = 0; c < spec.factor_count; ++c)
            factors.header.push_back("factor" + std::to_string(c + 1));
        for (Eigen::Index t = 0; t < fit.factors.rows(); ++t) {
            std::vector<std::string> row = {
                std::to_string(panel.start_year + static_cast<int>(t))};
            for (int c = 0; c < spec.factor_count; ++c)
                row.push_back(csvio::format_number(fit.factors(t, c)));
            factors.rows.push_back(std::move(row));
        }
        write_table(dir / "factors.csv", factors);

        auto relevance = dfm::dfm_relevance(fit, panel.sectors);
        std::vector<std::string> excluded;
        csvio::Table rel;
        rel.header = {"sector", "r2", "score", "flagged"};
        for (const auto& e : relevance) {
            if (e.flagged) excluded.push_back(e.series);
            rel.rows.push_back({e.series, csvio::format_number(e.r2),
                                csvio::format_number(e.score), e.flagged ? "1" : "0"});
        }
        write_table(dir / "relevance.csv", rel);
        write_mask_file(dir / "dfm_mask.csv",
                        mask_excluding(panel, excluded, rates::MaskProvenance::dfm));

        std::vector<double> r2(fit.per_series_r2.data(),
                               fit.per_series_r2.data() + fit.per_series_r2.size());
        std::sort(r2.begin(), r2.end());
        double median = r2.size() % 2 == 1
                            ? r2[r2.size() / 2]
                            : 0.5 * (r2[r2.size() / 2 - 1] + r2[r2.size() / 2]);
        json j;
        j["r"] = spec.factor_count;
        j["p"] = spec.lag_order;
        j["iterations"] = fit.iterations;
        j["converged"] = fit.converged;
        j["loglik"] = fit.loglik_trace.back();
        j["r2_mean"] = fit.per_series_r2.mean();
        j["r2_median"] = median;
        csvio::write_text(dir / "summary.json", j.dump(2) + "\n");
    });

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "Run the full staged analysis");
    std::string pipe_config;
    pipe->add_option("--config", pipe_config, "INI-style configuration file")->required();
    pipe->callback([&] {
        auto cfg = config_from_ini(pipe_config);
        auto report = pipeline::run_pipeline(cfg);
        std::cout << "pipeline complete: " << report.manifest.size() << " files under "
                  << cfg.output_dir.string() << "\n";
        for (const auto& cell : report.slope_matrix)
            std::cout << cell.mask << " x " << to_string(cell.filter) << ": slope "
                      << csvio::format_number(cell.slope) << "\n";
    });

    // plot
    auto* plot = app.add_subcommand("plot", "Line chart of one or more series files");
    std::vector<std::string> plot_series;
    std::string plot_out, plot_title;
    plot->add_option("--series", plot_series, "(year,value) CSV, repeatable")->required();
    plot->add_option("--title", plot_title);
    plot->add_option("--out", plot_out, "Output SVG path")->required();
    plot->callback([&] {
        std::vector<svgplot::PlotSeries> lines;
        for (const auto& path : plot_series) {
            TimeSeries ts = csvio::load_series(path);
            lines.push_back({ts.label, ts.start_year, ts.values});
        }
        svgplot::PlotOptions opts;
        opts.title = plot_title;
        csvio::write_text(plot_out, svgplot::render_plot(lines, opts));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const pipeline::StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
