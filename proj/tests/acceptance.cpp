// Acceptance gate: one line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aroptk/core.hpp"
#include "aroptk/csvio.hpp"
#include "aroptk/dfm.hpp"
#include "aroptk/dimred.hpp"
#include "aroptk/distfit.hpp"
#include "aroptk/filters.hpp"
#include "aroptk/pipeline.hpp"
#include "aroptk/rates.hpp"
#include "aroptk/reglm.hpp"
#include "aroptk/spectral.hpp"
#include "aroptk/unitroot.hpp"

using namespace aroptk;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int number, const std::string& what, bool ok) {
    std::printf("criterion %2d: %s  %s\n", number, ok ? "PASS" : "FAIL", what.c_str());
    if (!ok) ++failures;
}

bool run_criterion(const std::function<bool()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "  exception: %s\n", e.what());
        return false;
    }
}

std::vector<double> random_values(int n, std::uint64_t seed) {
    Rng rng(RngSeed{seed});
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = rng.normal();
    return v;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = mean(a), mb = mean(b);
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(da * db);
}

TimeSeries smooth_fixture(int n, std::uint64_t seed) {
    Rng rng(RngSeed{seed});
    TimeSeries ts{1960, {}, "fixture"};
    for (int t = 0; t < n; ++t) {
        double trend = 0.3 + 0.002 * t - 0.00008 * t * t;
        ts.values.push_back(trend + 0.01 * std::sin(2.0 * std::numbers::pi * t / 9.0) +
                            0.004 * rng.normal());
    }
    return ts;
}

TimeSeries random_walk(int n, std::uint64_t seed) {
    Rng rng(RngSeed{seed});
    TimeSeries ts{1900, {}, "rw"};
    double level = 0.0;
    for (int t = 0; t < n; ++t) {
        level += rng.normal();
        ts.values.push_back(level);
    }
    return ts;
}

// 0-lag Dickey-Fuller t-ratio by direct OLS.
double df_t_oracle(const std::vector<double>& y, bool trend) {
    const auto n = static_cast<Eigen::Index>(y.size()) - 1;
    Eigen::MatrixXd x(n, trend ? 3 : 2);
    Eigen::VectorXd dy(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        dy(t) = y[static_cast<std::size_t>(t + 1)] - y[static_cast<std::size_t>(t)];
        x(t, 0) = y[static_cast<std::size_t>(t)];
        x(t, 1) = 1.0;
        if (trend) x(t, 2) = static_cast<double>(t + 1);
    }
    Eigen::MatrixXd xtx = x.transpose() * x;
    Eigen::VectorXd beta = xtx.ldlt().solve(x.transpose() * dy);
    double s2 = (dy - x * beta).squaredNorm() / static_cast<double>(n - x.cols());
    return beta(0) / std::sqrt(s2 * xtx.inverse()(0, 0));
}

bool wavelet_reconstruction() {
    auto start = std::chrono::steady_clock::now();
    std::uint64_t seed = 1;
    for (int rep = 0; rep < 50; ++rep) {
        int n = (rep % 3 == 0) ? 32 : (rep % 3 == 1 ? 64 : 128);
        TimeSeries ts{1900, random_values(n, seed++), "x"};
        filters::WaveletSpec spec;
        spec.depth_J = n == 32 ? 3 : 4;
        auto dec = filters::dwt_mra(ts, spec);
        if (dec.additivity_error() >= 1e-10) return false;
    }
    TimeSeries flat{1900, std::vector<double>(64, 3.25), "flat"};
    auto dec = filters::dwt_mra(flat, filters::WaveletSpec{});
    for (const auto& comp : dec.components)
        for (double v : comp.values)
            if (std::abs(v) > 1e-10) return false;
    auto elapsed = std::chrono::steady_clock::now() - start;
    return std::chrono::duration<double>(elapsed).count() < 1.0;
}

bool wavelet_matrix_oracle() {
    const int n = 32;
    const auto& h = filters::la16_scaling_filter();
    const auto& g = filters::la16_wavelet_filter();
    const int len = static_cast<int>(h.size());
    Eigen::MatrixXd ha = Eigen::MatrixXd::Zero(n / 2, n);
    Eigen::MatrixXd ga = Eigen::MatrixXd::Zero(n / 2, n);
    for (int i = 0; i < n / 2; ++i)
        for (int m = 0; m < len; ++m) {
            int col = (m + 2 * i) % n;
            ha(i, col) += h[static_cast<std::size_t>(m)];
            ga(i, col) += g[static_cast<std::size_t>(m)];
        }
    for (std::uint64_t seed = 100; seed < 103; ++seed) {
        auto x = random_values(n, seed);
        std::vector<double> approx, detail;
        filters::dwt_step(x, approx, detail);
        Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
        Eigen::VectorXd oa = ha * xv;
        Eigen::VectorXd od = ga * xv;
        for (int i = 0; i < n / 2; ++i) {
            if (std::abs(approx[static_cast<std::size_t>(i)] - oa(i)) >= 1e-10) return false;
            if (std::abs(detail[static_cast<std::size_t>(i)] - od(i)) >= 1e-10) return false;
        }
    }
    return true;
}

bool emd_completeness() {
    filters::EmdSpec spec;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        TimeSeries ts{1900, random_values(80, seed), "x"};
        auto dec = filters::emd(ts, spec);
        if (dec.additivity_error() >= 1e-8) return false;
    }
    const int n = 120;
    TimeSeries mix{1900, {}, "mix"};
    std::vector<double> sine(n), line(n);
    for (int t = 0; t < n; ++t) {
        sine[static_cast<std::size_t>(t)] = std::sin(2.0 * std::numbers::pi * t / 10.0);
        line[static_cast<std::size_t>(t)] = 0.05 * t;
        mix.values.push_back(sine[static_cast<std::size_t>(t)] + line[static_cast<std::size_t>(t)]);
    }
    auto dec = filters::emd(mix, spec);
    if (dec.additivity_error() >= 1e-8 || dec.components.empty()) return false;
    if (std::abs(correlation(dec.components.front().values, sine)) <= 0.95) return false;
    return std::abs(correlation(dec.trend, line)) > 0.99;
}

bool ehp_cross_validation() {
    auto ts = smooth_fixture(61, 2024);
    filters::EhpSpec spec;
    spec.seed = RngSeed{99};
    auto start = std::chrono::steady_clock::now();
    auto res = filters::ehp(ts, spec);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds >= 30.0) return false;
    double lambda = res.post_mean_cycle_var / res.post_mean_trend_var;
    auto hp = filters::hp_filter(ts.values, lambda);
    if (correlation(res.mean_trend.trend, hp) <= 0.99) return false;

    TimeSeries line{1960, {}, "line"};
    for (int t = 0; t < 40; ++t) line.values.push_back(2.0 + 0.1 * t);
    filters::EhpSpec line_spec;
    line_spec.seed = RngSeed{3};
    line_spec.draws = 41000;  // averages down the Monte Carlo error
    auto lin = filters::ehp(line, line_spec);
    for (std::size_t i = 0; i < line.size(); ++i)
        if (std::abs(lin.mean_trend.trend[i] - line.values[i]) >= 1e-3) return false;

    auto rerun = filters::ehp(ts, spec);
    return rerun.mean_trend.trend == res.mean_trend.trend &&
           rerun.post_mean_trend_var == res.post_mean_trend_var;
}

bool unitroot_oracles() {
    TimeSeries small{1900, {1, 2, 1, 3, 2, 4, 3, 5, 4, 6}, "fixed"};
    auto adf_row = unitroot::adf(small, unitroot::Deterministic::drift, 0);
    if (std::abs(adf_row.statistic - df_t_oracle(small.values, false)) >= 1e-8) return false;

    TimeSeries k12{1900, {0.5, 1.1, 0.7, 1.9, 1.3, 0.2, 2.2, 1.8, 0.9, 1.4, 2.0, 1.6}, "k"};
    auto kpss_row = unitroot::kpss(k12, unitroot::KpssSpec::level,
                                   unitroot::Bandwidth::short_lags, 0);
    double m = mean(k12.values);
    double s = 0.0, num = 0.0, denom = 0.0;
    for (double v : k12.values) {
        double e = v - m;
        s += e;
        num += s * s;
        denom += e * e;
    }
    const auto n = static_cast<double>(k12.size());
    double eta = num / (n * n) / (denom / n);
    if (std::abs(kpss_row.statistic - eta) >= 1e-8) return false;

    TimeSeries wn{1900, random_values(50, 21), "wn"};
    auto pp_row = unitroot::pp(wn, unitroot::PpForm::Z_t, unitroot::Bandwidth::short_lags, 0);
    return std::abs(pp_row.statistic - df_t_oracle(wn.values, true)) < 1e-8;
}

bool battery_direction() {
    auto walk = unitroot::battery(random_walk(200, 21));
    if (walk.total_cells() != 51) return false;
    if (walk.non_stationary_cells() < 41) return false;
    TimeSeries wn{1900, random_values(200, 21), "wn"};
    auto noise = unitroot::battery(wn);
    return noise.total_cells() - noise.non_stationary_cells() >= 41;
}

bool distfit_recovery() {
    Rng ln_rng(RngSeed{314159});
    Rng un_rng(RngSeed{4444});
    std::vector<double> lognormal_s, uniform_s;
    for (int i = 0; i < 1000; ++i) {
        lognormal_s.push_back(std::exp(-1.31 + 1.30 * ln_rng.normal()));
        uniform_s.push_back(un_rng.uniform());
    }
    auto fit = distfit::fit(lognormal_s, distfit::Family::lognormal, distfit::Method::mle);
    if (std::abs(fit.params.at("meanlog") - (-1.31)) >= 0.05) return false;
    if (std::abs(fit.params.at("sdlog") - 1.30) >= 0.05) return false;
    auto ln_sel = distfit::select(lognormal_s, distfit::all_families(), {distfit::Method::mle});
    if (ln_sel.fits.front().family != distfit::Family::lognormal) return false;
    auto un_sel = distfit::select(uniform_s, distfit::all_families(), {distfit::Method::mle});
    return un_sel.fits.front().family == distfit::Family::uniform;
}

bool pca_conservation() {
    Rng rng(RngSeed{12});
    Eigen::MatrixXd x(60, 7);
    for (int i = 0; i < 60; ++i)
        for (int j = 0; j < 7; ++j) x(i, j) = rng.normal();
    auto res = dimred::pca(x, true);
    if (std::abs(res.eigenvalues.sum() - 7.0) >= 1e-9) return false;

    Eigen::MatrixXd x3(40, 3);
    Rng rng3(RngSeed{606});
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 3; ++j) x3(i, j) = rng3.normal();
    x3.col(1) += 0.6 * x3.col(0);
    auto res3 = dimred::pca(x3, true);
    // Characteristic-polynomial oracle via the trigonometric cubic formula.
    Eigen::MatrixXd c = x3;
    for (int j = 0; j < 3; ++j) {
        c.col(j).array() -= c.col(j).mean();
        c.col(j) /= std::sqrt(c.col(j).squaredNorm() / (c.rows() - 1.0));
    }
    Eigen::Matrix3d corr = c.transpose() * c / (c.rows() - 1.0);
    double p1 = corr(0, 1) * corr(0, 1) + corr(0, 2) * corr(0, 2) + corr(1, 2) * corr(1, 2);
    double q = corr.trace() / 3.0;
    double p2 = (corr(0, 0) - q) * (corr(0, 0) - q) + (corr(1, 1) - q) * (corr(1, 1) - q) +
                (corr(2, 2) - q) * (corr(2, 2) - q) + 2.0 * p1;
    double p = std::sqrt(p2 / 6.0);
    Eigen::Matrix3d b = (corr - q * Eigen::Matrix3d::Identity()) / p;
    double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    std::vector<double> roots = {
        q + 2.0 * p * std::cos(phi),
        q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0),
        q + 2.0 * p * std::cos(phi + 4.0 * std::numbers::pi / 3.0)};
    std::sort(roots.begin(), roots.end(), std::greater<>());
    for (int i = 0; i < 3; ++i)
        if (std::abs(res3.eigenvalues(i) - roots[static_cast<std::size_t>(i)]) >= 1e-8)
            return false;

    Eigen::MatrixXd rank1(10, 2);
    for (int i = 0; i < 10; ++i) {
        rank1(i, 0) = 0.5 * i + 1.0;
        rank1(i, 1) = -2.0 * rank1(i, 0) + 3.0;
    }
    auto r1 = dimred::pca(rank1, true);
    return std::abs(r1.explained_variance_pct(0) - 100.0) < 1e-9;
}

bool backward_elimination() {
    const int n = 80;
    Rng rngx(RngSeed{21});
    Eigen::MatrixXd x(n, 6);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 6; ++j) x(i, j) = rngx.normal();
    Rng rng(RngSeed{22});
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i)
        y(i) = 0.5 + 1.2 * x(i, 0) - 0.8 * x(i, 2) + 0.4 * x(i, 4) + 0.3 * rng.normal();
    auto trace = reglm::backward_eliminate(y, x);
    for (const auto& step : trace.steps)
        if (step.aic_after >= step.aic_before) return false;

    double best_aic = std::numeric_limits<double>::infinity();
    std::vector<int> best_subset;
    for (int bits = 0; bits < 64; ++bits) {
        std::vector<int> cols;
        for (int j = 0; j < 6; ++j)
            if (bits & (1 << j)) cols.push_back(j);
        Eigen::MatrixXd sub(n, static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j)
            sub.col(static_cast<Eigen::Index>(j)) = x.col(cols[j]);
        double aic = reglm::glm_fit(y, sub).aic;
        if (aic < best_aic) {
            best_aic = aic;
            best_subset = cols;
        }
    }
    if (trace.surviving_columns != best_subset) return false;

    Eigen::MatrixXd z(n, 7);
    z.col(0).setOnes();
    z.rightCols(6) = x;
    Eigen::VectorXd beta = z.fullPivHouseholderQr().solve(y);
    auto full = reglm::glm_fit(y, x);
    for (int i = 0; i < 7; ++i)
        if (std::abs(full.coefficients(i) - beta(i)) >= 1e-10) return false;
    return true;
}

bool dfm_checks() {
    // EM monotonicity on a seeded 2-factor panel.
    Rng rng(RngSeed{555});
    const int t = 80, nvar = 12;
    Eigen::MatrixXd f(t, 2);
    for (int c = 0; c < 2; ++c) {
        double v = rng.normal();
        for (int i = 0; i < t; ++i) {
            v = 0.7 * v + rng.normal();
            f(i, c) = v;
        }
    }
    Eigen::MatrixXd load(nvar, 2);
    for (int i = 0; i < nvar; ++i)
        for (int c = 0; c < 2; ++c) load(i, c) = rng.normal();
    Eigen::MatrixXd x = f * load.transpose();
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < nvar; ++j) x(i, j) += 0.6 * rng.normal();
    for (int j = 0; j < nvar; ++j) {
        x.col(j).array() -= x.col(j).mean();
        x.col(j) /= std::sqrt(x.col(j).squaredNorm() / (t - 1.0));
    }
    dfm::DfmSpec spec;
    spec.factor_count = 2;
    spec.lag_order = 1;
    auto fit = dfm::fit_dfm(x, spec);
    for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i)
        if (fit.loglik_trace[i] < fit.loglik_trace[i - 1] - 1e-8) return false;

    // Bai-Ng on the seeded 3-factor fixture, N = 30, T = 100.
    Rng rng2(RngSeed{14});
    const int t2 = 100, n2 = 30;
    Eigen::MatrixXd f3(t2, 3);
    for (int c = 0; c < 3; ++c) {
        double v = rng2.normal();
        for (int i = 0; i < t2; ++i) {
            v = 0.7 * v + rng2.normal();
            f3(i, c) = v;
        }
    }
    Eigen::MatrixXd load3(n2, 3);
    for (int i = 0; i < n2; ++i)
        for (int c = 0; c < 3; ++c)
            load3(i, c) = (rng2.uniform() < 0.5 ? -1.0 : 1.0) * (0.7 + 0.6 * rng2.uniform());
    Eigen::MatrixXd x3 = f3 * load3.transpose();
    for (int i = 0; i < t2; ++i)
        for (int j = 0; j < n2; ++j) x3(i, j) += 0.5 * rng2.normal();
    for (int j = 0; j < n2; ++j) x3.col(j).array() -= x3.col(j).mean();
    if (dfm::select_factor_count(x3, 5).r != 3) return false;

    // Kalman 2-step vs joint-Gaussian conditioning.
    const double phi = 0.8, qv = 0.3, h = 1.5, rv = 0.2, mu0 = 0.4, p0 = 1.1;
    Eigen::VectorXd prior(1);
    prior << mu0;
    Eigen::MatrixXd pc(1, 1), tr(1, 1), qm(1, 1), ob(1, 1), rm(1, 1);
    pc << p0;
    tr << phi;
    qm << qv;
    ob << h;
    rm << rv;
    Eigen::VectorXd y1(1), y2(1);
    y1 << 0.9;
    y2 << -0.2;
    auto s1 = dfm::kalman_step(prior, pc, tr, qm, ob, rm, y1);
    auto s2 = dfm::kalman_step(s1.filtered_mean, s1.filtered_cov, tr, qm, ob, rm, y2);
    double m1 = phi * mu0, v1 = phi * phi * p0 + qv;
    double m2 = phi * m1, c12 = phi * v1, v2 = phi * phi * v1 + qv;
    Eigen::Matrix2d syy;
    syy << h * h * v1 + rv, h * h * c12,
           h * h * c12, h * h * v2 + rv;
    Eigen::Matrix2d sxy;
    sxy << h * v1, h * c12,
           h * c12, h * v2;
    Eigen::Vector2d cond = Eigen::Vector2d(m1, m2) +
                           sxy * syy.inverse() * (Eigen::Vector2d(y1(0), y2(0)) -
                                                  Eigen::Vector2d(h * m1, h * m2));
    if (std::abs(s2.filtered_mean(0) - cond(1)) >= 1e-10) return false;

    // Lag selection on a VAR(1) fixture.
    Rng rngv(RngSeed{13});
    Eigen::MatrixXd var1(300, 2);
    Eigen::Vector2d state = Eigen::Vector2d::Zero();
    Eigen::Matrix2d a1;
    a1 << 0.6, 0.2,
          -0.1, 0.5;
    for (int i = 0; i < 300; ++i) {
        state = a1 * state + Eigen::Vector2d(rngv.normal(), rngv.normal());
        var1.row(i) = state.transpose();
    }
    return dfm::select_lag_order(var1, 4).aic == 1;
}

pipeline::PipelineConfig synthetic_config(const fs::path& outdir) {
    const fs::path data = fs::path(AROPTK_SOURCE_DIR) / "data" / "synthetic";
    pipeline::PipelineConfig cfg;
    cfg.panel = {data / "surplus.csv",       data / "depreciation.csv",
                 data / "compensation.csv",  data / "value_added.csv",
                 data / "capital_stock.csv", data / "intermediate_consumption.csv"};
    cfg.criteria_mask = data / "criteria_mask.csv";
    cfg.variant = {rates::RateBasis::net, rates::RateWeighting::weighted};
    cfg.selection_methods = {rates::MaskProvenance::pca_simple, rates::MaskProvenance::bw,
                             rates::MaskProvenance::dfm};
    cfg.ehp_seed = RngSeed{11};
    cfg.split_seed = RngSeed{12};
    cfg.dfm_seed = RngSeed{13};
    cfg.output_dir = outdir;
    return cfg;
}

bool end_to_end() {
    fs::path tmp = fs::temp_directory_path() / "aroptk-acceptance-run";
    fs::remove_all(tmp);
    auto cfg = synthetic_config(tmp);
    auto report = pipeline::run_pipeline(cfg);
    bool ok = report.criteria_slopes.size() == 3;
    for (const auto& [filter, slope] : report.criteria_slopes)
        if (!(slope < 0.0)) ok = false;
    auto manifest = csvio::read_text(tmp / "manifest.json");
    fs::remove_all(tmp);
    auto rerun = pipeline::run_pipeline(cfg);
    ok = ok && csvio::read_text(tmp / "manifest.json") == manifest &&
         rerun.manifest == report.manifest;
    fs::remove_all(tmp);
    return ok;
}

// Conditional replication checks; returns -1 when the dataset is absent.
int replication() {
    fs::path dir;
    if (const char* env = std::getenv("AROPTK_REPLICATION_DIR"))
        dir = env;
    else
        dir = fs::path(AROPTK_SOURCE_DIR) / "data" / "replication";
    if (!fs::exists(dir / "surplus.csv")) return -1;

    csvio::PanelPaths paths{dir / "surplus.csv",       dir / "depreciation.csv",
                            dir / "compensation.csv",  dir / "value_added.csv",
                            dir / "capital_stock.csv", dir / "intermediate_consumption.csv"};
    auto panel = csvio::load_panel(paths);
    auto mask = csvio::load_mask(dir / "criteria_mask.csv", rates::MaskProvenance::criteria);
    rates::RateVariant variant{rates::RateBasis::net, rates::RateWeighting::weighted};
    auto arop = rates::compute_arop(panel, mask, variant);
    bool ok = true;

    auto seasonality = spectral::subperiod_seasonality(arop, 9);
    if (seasonality.rows.empty() || seasonality.rows.front().primary_period != 10 ||
        seasonality.rows.front().secondary_period != 5)
        ok = false;

    auto constant_mean = unitroot::kpss(arop, unitroot::KpssSpec::level,
                                        unitroot::Bandwidth::short_lags);
    if (constant_mean.verdict.at(0.05) != unitroot::Verdict::stationary ||
        constant_mean.verdict.at(0.10) != unitroot::Verdict::stationary ||
        constant_mean.verdict.at(0.01) != unitroot::Verdict::non_stationary)
        ok = false;

    auto sector_rates = rates::sector_rates(panel, variant.basis);
    auto svd = dimred::svd_relevance(sector_rates.transpose(), true);
    if (svd.winning_fit.family != distfit::Family::lognormal ||
        std::abs(svd.winning_fit.params.at("meanlog") - (-1.3089)) >= 1e-3 ||
        std::abs(svd.winning_fit.params.at("sdlog") - 1.2996) >= 1e-3)
        ok = false;

    Eigen::MatrixXd standardized = sector_rates.transpose();
    for (Eigen::Index j = 0; j < standardized.cols(); ++j) {
        standardized.col(j).array() -= standardized.col(j).mean();
        standardized.col(j) /=
            std::sqrt(standardized.col(j).squaredNorm() / (standardized.rows() - 1.0));
    }
    int k_max = static_cast<int>(
        std::min<Eigen::Index>(25, std::min(standardized.rows(), standardized.cols()) - 1));
    if (dfm::select_factor_count(standardized, k_max).r != 20) ok = false;

    Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(
        arop.values.data(), static_cast<Eigen::Index>(arop.values.size()));
    auto trace = reglm::backward_eliminate(target, standardized, panel.sectors);
    bool finance_dropped = false;
    for (const auto& name : trace.dropped)
        if (name == "Finance and insurance") finance_dropped = true;
    if (!finance_dropped) ok = false;

    dfm::DfmSpec spec;
    spec.factor_count = 20;
    spec.lag_order = 1;
    spec.allow_large_r = true;
    auto fit = dfm::fit_dfm(standardized, spec);
    auto rel = dfm::dfm_relevance(fit, panel.sectors);
    bool warehousing = false;
    for (const auto& entry : rel)
        if (entry.series == "Warehousing and storage" && entry.flagged &&
            std::abs(entry.score - 0.2154) < 1e-3)
            warehousing = true;
    if (!warehousing) ok = false;

    fs::path tmp = fs::temp_directory_path() / "aroptk-replication-run";
    fs::remove_all(tmp);
    csvio::PanelPaths saved = paths;
    auto cfg = synthetic_config(tmp);
    cfg.panel = saved;
    cfg.criteria_mask = dir / "criteria_mask.csv";
    auto report = pipeline::run_pipeline(cfg);
    int ehp_non_negative = 0;
    for (const auto& cell : report.slope_matrix)
        if (cell.filter == FilterTag::EHP && !(cell.slope < 0.0)) ++ehp_non_negative;
    fs::remove_all(tmp);
    if (ehp_non_negative > 3) ok = false;

    return ok ? 1 : 0;
}

}  // namespace

int main() {
    report(1, "wavelet perfect reconstruction (50 seeded series, < 1 s)",
           run_criterion(wavelet_reconstruction));
    report(2, "wavelet coefficients match the convolution-decimation matrix oracle",
           run_criterion(wavelet_matrix_oracle));
    report(3, "EMD completeness and sine + line generator recovery",
           run_criterion(emd_completeness));
    report(4, "EHP vs closed-form HP, linear passthrough, bit-identical reruns, < 30 s",
           run_criterion(ehp_cross_validation));
    report(5, "ADF / KPSS / PP statistics match direct-formula oracles",
           run_criterion(unitroot_oracles));
    report(6, "battery direction: walk >= 80% non-stationary, noise >= 80% stationary",
           run_criterion(battery_direction));
    report(7, "distribution-fit recovery and BIC winners",
           run_criterion(distfit_recovery));
    report(8, "PCA eigenvalue conservation, cubic-root oracle, rank-1 data",
           run_criterion(pca_conservation));
    report(9, "backward elimination: strict AIC trace, exhaustive match, GLM = OLS",
           run_criterion(backward_elimination));
    report(10, "DFM: monotone EM, Bai-Ng k = 3, Kalman oracle, VAR lag p = 1",
           run_criterion(dfm_checks));
    report(11, "end-to-end pipeline: negative criteria slopes, byte-identical reruns",
           run_criterion(end_to_end));

    int rep = -1;
    try {
        rep = replication();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "  exception: %s\n", e.what());
        rep = 0;
    }
    if (rep < 0) {
        std::printf("criterion 12: SKIP  conditional replication (dataset not provided)\n");
    } else {
        report(12, "conditional replication against the supplied dataset", rep == 1);
    }

    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
