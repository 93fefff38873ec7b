#include "aroptk/pipeline.hpp"

#include <algorithm>
#include "json.hpp"

#include "aroptk/dfm.hpp"
#include "aroptk/dimred.hpp"
#include "aroptk/filters.hpp"
#include "aroptk/reglm.hpp"
#include "aroptk/spectral.hpp"
#include "aroptk/svgplot.hpp"
#include "aroptk/unitroot.hpp"

namespace aroptk::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Tracks every file the run writes so a failed stage can remove them and the
/// manifest can hash them.
class OutputSink {
public:
    explicit OutputSink(fs::path root) : root_(std::move(root)) {}

    void write(const std::string& stage, const std::string& name, const std::string& content) {
        fs::path dir = root_ / stage;
        fs::create_directories(dir);
        fs::path path = dir / name;
        csvio::write_text(path, content);
        written_.push_back(path);
        manifest_[stage + "/" + name] = csvio::content_hash(content);
    }

    void write_csv(const std::string& stage, const std::string& name,
                   const csvio::Table& table) {
        std::string out;
        auto append = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                bool needs_quote = cells[i].find_first_of(",\"\n") != std::string::npos;
                if (needs_quote) {
                    out += '"';
                    for (char c : cells[i]) {
                        if (c == '"') out += '"';
                        out += c;
                    }
                    out += '"';
                } else {
                    out += cells[i];
                }
            }
            out += '\n';
        };
        append(table.header);
        for (const auto& row : table.rows) append(row);
        write(stage, name, out);
    }

    void discard_all() {
        std::error_code ec;
        for (const auto& path : written_) fs::remove(path, ec);
        for (const auto& path : written_) {
            fs::path dir = path.parent_path();
            if (fs::exists(dir, ec) && fs::is_empty(dir, ec)) fs::remove(dir, ec);
        }
    }

    const std::map<std::string, std::string>& manifest() const { return manifest_; }

private:
    fs::path root_;
    std::vector<fs::path> written_;
    std::map<std::string, std::string> manifest_;
};

std::string series_csv(const TimeSeries& ts, const std::string& value_header) {
    csvio::Table t;
    t.header = {"year", value_header};
    for (std::size_t i = 0; i < ts.size(); ++i)
        t.rows.push_back({std::to_string(ts.year_at(i)), csvio::format_number(ts.values[i])});
    std::string out;
    out += t.header[0] + "," + t.header[1] + "\n";
    for (const auto& r : t.rows) out += r[0] + "," + r[1] + "\n";
    return out;
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

std::string mask_csv(const rates::ClassificationMask& mask) {
    std::string out = "sector,flag\n";
    for (const auto& [sector, flag] : mask.flags)
        out += sector + "," + std::to_string(flag) + "\n";
    return out;
}

std::string filter_slug(FilterTag tag) {
    switch (tag) {
        case FilterTag::DW: return "dw";
        case FilterTag::EMD: return "emd";
        case FilterTag::EHP: return "ehp";
    }
    return "dw";
}

}  // namespace

PipelineReport run_pipeline(const PipelineConfig& config) {
    if (config.output_dir.empty()) throw ConfigError("pipeline: output directory not set");
    if (config.filters.empty()) throw ConfigError("pipeline: no filters enabled");
    fs::create_directories(config.output_dir);

    OutputSink sink(config.output_dir);
    PipelineReport report;
    std::string stage = "ingest";
    try {
        rates::SectorPanel panel = csvio::load_panel(config.panel);
        rates::ClassificationMask criteria =
            config.criteria_mask.empty()
                ? rates::all_ones_mask(panel)
                : csvio::load_mask(config.criteria_mask, rates::MaskProvenance::criteria);

        // Stage 1: ARoP under the criteria mask.
        stage = "arop";
        TimeSeries arop = rates::compute_arop(panel, criteria, config.variant,
                                              config.share_basis);
        arop.label = "arop_" + rates::to_string(criteria.provenance);
        report.criteria_arop = arop.values;
        report.start_year = arop.start_year;
        sink.write(stage, "arop.csv", series_csv(arop, "arop"));
        {
            json sidecar;
            sidecar["variant"] = rates::to_string(config.variant);
            sidecar["provenance"] = rates::to_string(criteria.provenance);
            std::vector<std::string> included;
            for (const auto& s : panel.sectors)
                if (criteria.included(s)) included.push_back(s);
            sidecar["included_sectors"] = included;
            sink.write(stage, "arop.json", sidecar.dump(2) + "\n");
            svgplot::PlotSeries line{arop.label, arop.start_year, arop.values};
            svgplot::PlotOptions opts;
            opts.title = "Average rate of profit";
            sink.write(stage, "arop.svg", svgplot::render_plot({line}, opts));
        }

        // Stage 2: sub-period seasonality and the additivity verdict.
        stage = "seasonality";
        auto table = spectral::subperiod_seasonality(arop, config.seasonality_window_years);
        auto verdict = spectral::additivity_verdict(table);
        {
            csvio::Table t;
            t.header = {"subperiod", "primary_period", "secondary_period"};
            for (const auto& row : table.rows)
                t.rows.push_back({std::to_string(row.start_year) + "-" +
                                      std::to_string(row.end_year),
                                  std::to_string(row.primary_period),
                                  std::to_string(row.secondary_period)});
            sink.write_csv(stage, "seasonality.csv", t);
            json j;
            j["pattern"] = verdict == spectral::SeasonalPattern::additive ? "additive"
                                                                          : "multiplicative";
            sink.write(stage, "verdict.json", j.dump(2) + "\n");
        }

        // Stage 3: trend filters on the criteria series.
        stage = "filter";
        auto apply_filter = [&](FilterTag tag) -> Decomposition {
            switch (tag) {
                case FilterTag::DW: {
                    filters::WaveletSpec spec;
                    spec.depth_J = config.wavelet_depth;
                    int block = 1 << spec.depth_J;
                    if (static_cast<int>(arop.size()) % block == 0)
                        return filters::dwt_mra(arop, spec);
                    return filters::modwt_mra(arop, spec);
                }
                case FilterTag::EMD:
                    return filters::emd(arop, filters::EmdSpec{});
                case FilterTag::EHP: {
                    filters::EhpSpec spec;
                    spec.seed = config.ehp_seed;
                    auto result = filters::ehp(arop, spec);
                    TimeSeries conv{arop.start_year, result.draw_log, "ehp_midpoint"};
                    csvio::Table t;
                    t.header = {"iteration", "trend_at_midpoint"};
                    for (std::size_t i = 0; i < result.draw_log.size(); ++i)
                        t.rows.push_back({std::to_string(i + 1),
                                          csvio::format_number(result.draw_log[i])});
                    sink.write_csv(stage, "ehp_convergence.csv", t);
                    return result.mean_trend;
                }
            }
            throw ConfigError("pipeline: unknown filter");
        };
        std::map<FilterTag, Decomposition> decomps;
        for (FilterTag tag : config.filters) {
            Decomposition d = apply_filter(tag);
            decomps.emplace(tag, d);
            std::string slug = filter_slug(tag);
            sink.write_csv(stage, slug + ".csv", decomposition_table(d));
            double slope = linear_slope(d.trend);
            report.criteria_slopes[to_string(tag)] = slope;
            svgplot::PlotSeries input{"input", arop.start_year, arop.values};
            svgplot::PlotSeries trend{to_string(tag) + " trend", arop.start_year, d.trend};
            svgplot::PlotOptions opts;
            opts.title = to_string(tag) + " trend";
            sink.write(stage, slug + ".svg", svgplot::render_plot({input, trend}, opts));
        }
        {
            csvio::Table t;
            t.header = {"filter", "slope"};
            for (FilterTag tag : config.filters)
                t.rows.push_back({to_string(tag),
                                  csvio::format_number(report.criteria_slopes[to_string(tag)])});
            sink.write_csv(stage, "slopes.csv", t);
        }

        // Stage 4: the unit-root battery.
        if (config.run_battery) {
            stage = "battery";
            auto grid = unitroot::battery(arop);
            csvio::Table t;
            t.header = {"family", "variation", "level_0.01", "level_0.05", "level_0.10"};
            json raw = json::array();
            for (const auto& row : grid.rows) {
                std::vector<std::string> cells = {unitroot::to_string(row.family),
                                                  row.variation};
                json entry;
                entry["family"] = unitroot::to_string(row.family);
                entry["variation"] = row.variation;
                entry["statistic"] = row.statistic;
                entry["lags"] = row.lags_used;
                for (double level : unitroot::significance_levels()) {
                    cells.push_back(unitroot::to_string(row.verdict.at(level)));
                    entry["cv_" + csvio::format_number(level)] =
                        row.critical_values.at(level);
                }
                t.rows.push_back(std::move(cells));
                raw.push_back(std::move(entry));
            }
            sink.write_csv(stage, "battery.csv", t);
            sink.write(stage, "battery.json", raw.dump(2) + "\n");
        }

        // Stage 5: variable-selection masks.
        stage = "selection";
        Eigen::MatrixXd rate_matrix =
            rates::sector_rates(panel, config.variant.basis, config.share_basis)
                .transpose();  // years x sectors
        std::map<std::string, rates::ClassificationMask> masks;
        masks["criteria"] = criteria;
        auto flags_from = [&](const std::vector<std::string>& excluded,
                              rates::MaskProvenance prov) {
            rates::ClassificationMask m;
            m.provenance = prov;
            for (const auto& s : panel.sectors)
                m.flags[rates::normalize_sector_name(s)] = 1;
            for (const auto& s : excluded)
                m.flags[rates::normalize_sector_name(s)] = 0;
            return m;
        };
        for (rates::MaskProvenance method : config.selection_methods) {
            std::string label = rates::to_string(method);
            switch (method) {
                case rates::MaskProvenance::pca_simple:
                case rates::MaskProvenance::pca_weighted: {
                    auto res = dimred::pca(rate_matrix, true, panel.sectors);
                    auto mode = method == rates::MaskProvenance::pca_simple
                                    ? dimred::SelectionMode::simple
                                    : dimred::SelectionMode::weighted;
                    std::vector<std::string> excluded;
                    csvio::Table t;
                    t.header = {"sector", "score", "flagged"};
                    for (const auto& s : dimred::select_sectors(res, mode)) {
                        if (s.flagged) excluded.push_back(s.sector);
                        t.rows.push_back({s.sector, csvio::format_number(s.score),
                                          s.flagged ? "1" : "0"});
                    }
                    sink.write_csv(stage, label + "_scores.csv", t);
                    masks[label] = flags_from(excluded, method);
                    break;
                }
                case rates::MaskProvenance::bw: {
                    Eigen::Map<const Eigen::VectorXd> y(
                        arop.values.data(), static_cast<Eigen::Index>(arop.size()));
                    auto trace = reglm::backward_eliminate(y, rate_matrix, panel.sectors);
                    csvio::Table t;
                    t.header = {"step", "dropped", "aic_before", "aic_after"};
                    for (std::size_t i = 0; i < trace.steps.size(); ++i)
                        t.rows.push_back({std::to_string(i + 1),
                                          trace.steps[i].dropped_variable,
                                          csvio::format_number(trace.steps[i].aic_before),
                                          csvio::format_number(trace.steps[i].aic_after)});
                    sink.write_csv(stage, "bw_trace.csv", t);
                    auto validation = reglm::validate(y, rate_matrix, config.split_seed, 0.8,
                                                      panel.sectors);
                    json v;
                    v["train_mae"] = validation.train_mae;
                    v["test_mae"] = validation.test_mae;
                    v["pseudo_r2"] = validation.pseudo_r2;
                    sink.write(stage, "bw_validation.json", v.dump(2) + "\n");
                    masks[label] = flags_from(trace.dropped, method);
                    break;
                }
                case rates::MaskProvenance::dfm: {
                    Eigen::MatrixXd X = rate_matrix;
                    for (Eigen::Index j = 0; j < X.cols(); ++j) {
                        double m = X.col(j).mean();
                        X.col(j).array() -= m;
                        double sd = std::sqrt(X.col(j).squaredNorm() /
                                              static_cast<double>(X.rows() - 1));
                        if (sd <= 0.0)
                            throw DataError("dfm selection: constant sector rate series");
                        X.col(j) /= sd;
                    }
                    int k_max = static_cast<int>(
                        std::min<Eigen::Index>(6, std::min(X.rows(), X.cols()) - 1));
                    auto factors = dfm::select_factor_count(X, k_max);
                    dfm::DfmSpec spec;
                    spec.factor_count = factors.r;
                    spec.lag_order = 1;
                    auto fit = dfm::fit_dfm(X, spec, config.dfm_seed);
                    auto relevance = dfm::dfm_relevance(fit, panel.sectors);
                    std::vector<std::string> excluded;
                    csvio::Table t;
                    t.header = {"sector", "r2", "score", "flagged"};
                    for (const auto& e : relevance) {
                        if (e.flagged) excluded.push_back(e.series);
                        t.rows.push_back({e.series, csvio::format_number(e.r2),
                                          csvio::format_number(e.score),
                                          e.flagged ? "1" : "0"});
                    }
                    sink.write_csv(stage, "dfm_relevance.csv", t);
                    json j;
                    j["r"] = factors.r;
                    j["p"] = spec.lag_order;
                    j["iterations"] = fit.iterations;
                    j["converged"] = fit.converged;
                    j["loglik"] = fit.loglik_trace.back();
                    sink.write(stage, "dfm_summary.json", j.dump(2) + "\n");
                    masks[label] = flags_from(excluded, method);
                    break;
                }
                default:
                    throw ConfigError("pipeline: '" + label +
                                      "' is not a selection methodology");
            }
            sink.write(stage, label + "_mask.csv", mask_csv(masks[label]));
        }

        // Stage 6: re-filter the ARoP of every mask; slope-sign matrix.
        stage = "comparison";
        csvio::Table matrix;
        matrix.header = {"mask"};
        for (FilterTag tag : config.filters) matrix.header.push_back(to_string(tag));
        for (const auto& [label, mask] : masks) {
            TimeSeries masked = label == "criteria"
                                    ? arop
                                    : rates::compute_arop(panel, mask, config.variant,
                                                          config.share_basis);
            std::vector<std::string> row = {label};
            for (FilterTag tag : config.filters) {
                Decomposition d;
                if (label == "criteria") {
                    d = decomps.at(tag);
                } else {
                    switch (tag) {
                        case FilterTag::DW: {
                            filters::WaveletSpec spec;
                            spec.depth_J = config.wavelet_depth;
                            int block = 1 << spec.depth_J;
                            d = static_cast<int>(masked.size()) % block == 0
                                    ? filters::dwt_mra(masked, spec)
                                    : filters::modwt_mra(masked, spec);
                            break;
                        }
                        case FilterTag::EMD:
                            d = filters::emd(masked, filters::EmdSpec{});
                            break;
                        case FilterTag::EHP: {
                            filters::EhpSpec spec;
                            spec.seed = config.ehp_seed;
                            d = filters::ehp(masked, spec).mean_trend;
                            break;
                        }
                    }
                }
                double slope = linear_slope(d.trend);
                report.slope_matrix.push_back({label, tag, slope});
                row.push_back(csvio::format_number(slope));
            }
            matrix.rows.push_back(std::move(row));
        }
        sink.write_csv(stage, "slope_matrix.csv", matrix);
        {
            csvio::Table signs;
            signs.header = matrix.header;
            for (const auto& row : matrix.rows) {
                std::vector<std::string> out = {row[0]};
                for (std::size_t i = 1; i < row.size(); ++i) {
                    double v = csvio::parse_number(row[i], "slope matrix");
                    out.push_back(v < 0.0 ? "-" : (v > 0.0 ? "+" : "0"));
                }
                signs.rows.push_back(std::move(out));
            }
            sink.write_csv(stage, "slope_signs.csv", signs);
        }
    } catch (const ConfigError& e) {
        sink.discard_all();
        throw StageError(stage, e.what(), 2);
    } catch (const NumericError& e) {
        sink.discard_all();
        throw StageError(stage, e.what(), 4);
    } catch (const std::exception& e) {
        sink.discard_all();
        throw StageError(stage, e.what(), 3);
    }

    report.manifest = sink.manifest();
    json manifest;
    for (const auto& [path, hash] : report.manifest) manifest[path] = hash;
    csvio::write_text(config.output_dir / "manifest.json", manifest.dump(2) + "\n");
    return report;
}

}  // namespace aroptk::pipeline
