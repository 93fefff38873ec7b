#include <cmath>

#include <Eigen/Dense>

#include "aroptk/core.hpp"
#include "aroptk/unitroot.hpp"
#include "doctest.h"

using namespace aroptk;
using unitroot::Deterministic;
using unitroot::Verdict;

namespace {

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

TimeSeries white_noise(int n, std::uint64_t seed) {
    Rng rng(RngSeed{seed});
    TimeSeries ts{1900, {}, "wn"};
    for (int t = 0; t < n; ++t) ts.values.push_back(rng.normal());
    return ts;
}

// Direct OLS t-ratio oracle for the 0-lag Dickey-Fuller regression
// dy_t = c (+ b t) + rho * y_{t-1} + e_t.
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
    double rss = (dy - x * beta).squaredNorm();
    double s2 = rss / static_cast<double>(n - x.cols());
    Eigen::MatrixXd cov = s2 * xtx.inverse();
    return beta(0) / std::sqrt(cov(0, 0));
}

}  // namespace

TEST_CASE("adf with drift matches the hand OLS oracle on the fixed fixture") {
    TimeSeries ts{1900, {1, 2, 1, 3, 2, 4, 3, 5, 4, 6}, "fixed"};
    auto row = unitroot::adf(ts, Deterministic::drift, 0);
    CHECK(row.statistic == doctest::Approx(df_t_oracle(ts.values, false)).epsilon(1e-8));
    CHECK(row.lags_used == 0);
}

TEST_CASE("adf statistic is invariant under adding a constant when an intercept is present") {
    auto ts = white_noise(60, 8);
    TimeSeries shifted = ts;
    for (double& v : shifted.values) v += 50.0;
    auto a = unitroot::adf(ts, Deterministic::drift, 1);
    auto b = unitroot::adf(shifted, Deterministic::drift, 1);
    CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-9));
}

TEST_CASE("seeded random walk is non-stationary, white noise stationary (ADF drift)") {
    auto rw = unitroot::adf(random_walk(200, 42), Deterministic::drift);
    CHECK(rw.verdict.at(0.05) == Verdict::non_stationary);
    auto wn = unitroot::adf(white_noise(200, 42), Deterministic::drift);
    CHECK(wn.verdict.at(0.05) == Verdict::stationary);
}

TEST_CASE("kpss level with l = 0 matches the direct double-sum formula") {
    TimeSeries ts{1900, {0.5, 1.1, 0.7, 1.9, 1.3, 0.2, 2.2, 1.8, 0.9, 1.4, 2.0, 1.6}, "k"};
    auto row = unitroot::kpss(ts, unitroot::KpssSpec::level, unitroot::Bandwidth::short_lags, 0);
    const auto n = ts.values.size();
    double m = mean(ts.values);
    double s = 0.0, num = 0.0, denom = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        double e = ts.values[t] - m;
        s += e;
        num += s * s;
        denom += e * e;
    }
    double eta = num / (static_cast<double>(n) * static_cast<double>(n)) /
                 (denom / static_cast<double>(n));
    CHECK(row.statistic == doctest::Approx(eta).epsilon(1e-10));
}

TEST_CASE("kpss rejects an exactly linear series as degenerate") {
    TimeSeries ts{1900, {}, "line"};
    for (int t = 0; t < 30; ++t) ts.values.push_back(1.0 + 0.2 * t);
    CHECK_THROWS_AS(
        unitroot::kpss(ts, unitroot::KpssSpec::trend, unitroot::Bandwidth::short_lags),
        DataError);
}

TEST_CASE("kpss flags the random walk as non-stationary") {
    auto row = unitroot::kpss(random_walk(200, 42), unitroot::KpssSpec::level,
                              unitroot::Bandwidth::short_lags);
    CHECK(row.verdict.at(0.05) == Verdict::non_stationary);
}

TEST_CASE("kpss and adf encode the unit root with opposite rejection directions") {
    auto rw = random_walk(200, 13);
    auto kpss_row = unitroot::kpss(rw, unitroot::KpssSpec::level,
                                   unitroot::Bandwidth::short_lags);
    auto adf_row = unitroot::adf(rw, Deterministic::drift);
    CHECK(kpss_row.verdict.at(0.05) == Verdict::non_stationary);  // rejects stationarity
    CHECK(adf_row.verdict.at(0.05) == Verdict::non_stationary);   // fails to reject unit root
    CHECK(kpss_row.statistic > kpss_row.critical_values.at(0.05));
    CHECK(adf_row.statistic > adf_row.critical_values.at(0.05));
}

TEST_CASE("pp Z(t) at l = 0 equals the 0-lag ADF t-ratio") {
    auto ts = white_noise(50, 21);
    auto row = unitroot::pp(ts, unitroot::PpForm::Z_t, unitroot::Bandwidth::short_lags, 0);
    CHECK(row.statistic == doctest::Approx(df_t_oracle(ts.values, true)).epsilon(1e-8));
}

TEST_CASE("pp verdicts separate noise from walks") {
    auto wn = unitroot::pp(white_noise(200, 5), unitroot::PpForm::Z_t,
                           unitroot::Bandwidth::short_lags);
    CHECK(wn.verdict.at(0.05) == Verdict::stationary);
    auto rw = unitroot::pp(random_walk(200, 5), unitroot::PpForm::Z_t,
                           unitroot::Bandwidth::short_lags);
    CHECK(rw.verdict.at(0.05) == Verdict::non_stationary);
}

TEST_CASE("ers DF-GLS rejects on noise, P-test fails to reject on a walk") {
    auto wn = unitroot::ers_dfgls(white_noise(200, 99), false, 0);
    CHECK(wn.verdict.at(0.05) == Verdict::stationary);
    auto rw = unitroot::ers_ptest(random_walk(200, 99), false);
    CHECK(rw.verdict.at(0.05) == Verdict::non_stationary);
}

TEST_CASE("critical-value tables are monotone and verdicts nest across levels") {
    auto ts = random_walk(120, 3);
    auto report = unitroot::battery(ts);
    for (const auto& row : report.rows) {
        double cv01 = row.critical_values.at(0.01);
        double cv05 = row.critical_values.at(0.05);
        double cv10 = row.critical_values.at(0.10);
        if (row.family == unitroot::Family::KPSS) {
            CHECK(cv01 >= cv05);
            CHECK(cv05 >= cv10);
        } else if (row.family != unitroot::Family::ERS || row.variation.find("P-test") ==
                                                              std::string::npos) {
            CHECK(cv01 <= cv05);
            CHECK(cv05 <= cv10);
        }
        // Rejection at a stricter level implies rejection at looser levels.
        if (row.family != unitroot::Family::KPSS) {
            if (row.verdict.at(0.01) == Verdict::stationary)
                CHECK(row.verdict.at(0.05) == Verdict::stationary);
            if (row.verdict.at(0.05) == Verdict::stationary)
                CHECK(row.verdict.at(0.10) == Verdict::stationary);
        }
    }
}

TEST_CASE("battery emits the 17 x 3 grid with sensible direction summaries") {
    auto report = unitroot::battery(random_walk(200, 21));
    CHECK(report.rows.size() == 17);
    CHECK(report.total_cells() == 51);
    CHECK(report.non_stationary_cells() >= 41);  // >= 80%

    auto noise = unitroot::battery(white_noise(200, 21));
    CHECK(noise.total_cells() - noise.non_stationary_cells() >= 41);
}

TEST_CASE("battery refuses short samples") {
    CHECK_THROWS_AS(unitroot::battery(white_noise(12, 1)), DataError);
}
