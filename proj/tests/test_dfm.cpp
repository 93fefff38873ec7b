#include <cmath>

#include <Eigen/Dense>

#include "aroptk/core.hpp"
#include "aroptk/dfm.hpp"
#include "doctest.h"

using namespace aroptk;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
    Rng rng(RngSeed{seed});
    Eigen::MatrixXd x(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) x(i, j) = rng.normal();
    return x;
}

void standardize_columns(Eigen::MatrixXd& x) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        x.col(j).array() -= x.col(j).mean();
        x.col(j) /= std::sqrt(x.col(j).squaredNorm() / (x.rows() - 1.0));
    }
}

// T x N panel driven by k AR(1) factors with the given noise scale.
Eigen::MatrixXd factor_panel(int t, int n, int k, double noise, std::uint64_t seed,
                             Eigen::MatrixXd* factors_out = nullptr) {
    Rng rng(RngSeed{seed});
    Eigen::MatrixXd f(t, k);
    for (int c = 0; c < k; ++c) {
        double v = rng.normal();
        for (int i = 0; i < t; ++i) {
            v = 0.7 * v + rng.normal();
            f(i, c) = v;
        }
    }
    Eigen::MatrixXd loadings(n, k);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < k; ++c) loadings(i, c) = rng.normal();
    Eigen::MatrixXd x = f * loadings.transpose();
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < n; ++j) x(i, j) += noise * rng.normal();
    if (factors_out) *factors_out = f;
    return x;
}

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd da = a.array() - a.mean();
    Eigen::VectorXd db = b.array() - b.mean();
    return da.dot(db) / std::sqrt(da.squaredNorm() * db.squaredNorm());
}

}  // namespace

TEST_CASE("noiseless rank-1 data selects one factor") {
    Eigen::MatrixXd x = factor_panel(80, 12, 1, 0.0, 5);
    standardize_columns(x);
    auto sel = dfm::select_factor_count(x, 6);
    CHECK(sel.r == 1);
}

TEST_CASE("bai-ng recovers three factors at 4:1 signal-to-noise") {
    // Centered but not rescaled, so the idiosyncratic noise stays
    // homoskedastic across series.
    Eigen::MatrixXd x = factor_panel(400, 100, 3, 0.5, 77);
    for (Eigen::Index j = 0; j < x.cols(); ++j) x.col(j).array() -= x.col(j).mean();
    auto sel = dfm::select_factor_count(x, 8);
    CHECK(sel.r == 3);
}

TEST_CASE("pure noise is penalized beyond one factor") {
    Eigen::MatrixXd x = random_matrix(400, 100, 11);
    standardize_columns(x);
    auto sel = dfm::select_factor_count(x, 8);
    CHECK(sel.r == 1);
    for (std::size_t i = 1; i < sel.table.size(); ++i)
        CHECK(sel.table[i].pc_p3 > sel.table[i - 1].pc_p3);
}

TEST_CASE("lag selection recovers VAR(1) and VAR(2) dynamics") {
    // VAR(1) with strong persistence.
    Rng rng(RngSeed{13});
    const int t = 300;
    Eigen::MatrixXd var1(t, 2);
    Eigen::Vector2d v = Eigen::Vector2d::Zero();
    Eigen::Matrix2d a1;
    a1 << 0.6, 0.2,
          -0.1, 0.5;
    for (int i = 0; i < t; ++i) {
        v = a1 * v + Eigen::Vector2d(rng.normal(), rng.normal());
        var1.row(i) = v.transpose();
    }
    auto sel1 = dfm::select_lag_order(var1, 4);
    CHECK(sel1.aic == 1);
    CHECK(sel1.hq == 1);
    CHECK(sel1.sc == 1);
    CHECK(sel1.fpe == 1);

    // White noise: the smallest admissible order wins under SC.
    auto sel_wn = dfm::select_lag_order(random_matrix(200, 2, 14), 4);
    CHECK(sel_wn.sc == 1);

    // VAR(2) with a strong second lag.
    Eigen::MatrixXd var2(t, 2);
    Eigen::Vector2d prev = Eigen::Vector2d::Zero(), prev2 = Eigen::Vector2d::Zero();
    Eigen::Matrix2d b1, b2;
    b1 << 0.2, 0.0,
          0.0, 0.2;
    b2 << 0.55, 0.1,
          -0.1, 0.5;
    for (int i = 0; i < t; ++i) {
        Eigen::Vector2d cur = b1 * prev + b2 * prev2 +
                              Eigen::Vector2d(rng.normal(), rng.normal());
        var2.row(i) = cur.transpose();
        prev2 = prev;
        prev = cur;
    }
    auto sel2 = dfm::select_lag_order(var2, 4);
    CHECK(sel2.aic == 2);
}

TEST_CASE("kalman filter matches the direct Gaussian-conditioning oracle") {
    // Scalar state: x_t = 0.8 x_{t-1} + w, y_t = 1.5 x_t + v.
    const double phi = 0.8, q = 0.3, h = 1.5, r = 0.2;
    const double mu0 = 0.4, p0 = 1.1;
    Eigen::VectorXd prior(1);
    prior << mu0;
    Eigen::MatrixXd prior_cov(1, 1), trans(1, 1), qmat(1, 1), obs(1, 1), rmat(1, 1);
    prior_cov << p0;
    trans << phi;
    qmat << q;
    obs << h;
    rmat << r;
    Eigen::VectorXd y1(1), y2(1);
    y1 << 0.9;
    y2 << -0.2;

    auto s1 = dfm::kalman_step(prior, prior_cov, trans, qmat, obs, rmat, y1);
    auto s2 = dfm::kalman_step(s1.filtered_mean, s1.filtered_cov, trans, qmat, obs, rmat, y2);

    // Oracle: joint Gaussian of (x1, x2, y1, y2); condition directly.
    // x1 ~ N(phi mu0, phi^2 p0 + q), x2 = phi x1 + w2.
    double m1 = phi * mu0;
    double v1 = phi * phi * p0 + q;
    double m2 = phi * m1;
    double c12 = phi * v1;
    double v2 = phi * phi * v1 + q;
    Eigen::Vector4d mean;
    mean << m1, m2, h * m1, h * m2;
    Eigen::Matrix4d cov;
    cov << v1, c12, h * v1, h * c12,
           c12, v2, h * c12, h * v2,
           h * v1, h * c12, h * h * v1 + r, h * h * c12,
           h * c12, h * v2, h * h * c12, h * h * v2 + r;
    Eigen::Vector2d obs_vec(y1(0), y2(0));
    Eigen::Matrix2d s_yy = cov.bottomRightCorner(2, 2);
    Eigen::Matrix2d s_xy_top = cov.topRightCorner(2, 2);
    Eigen::Vector2d cond = mean.head(2) + s_xy_top * s_yy.inverse() *
                                              (obs_vec - mean.tail(2));
    Eigen::Matrix2d cond_cov =
        cov.topLeftCorner(2, 2) - s_xy_top * s_yy.inverse() * s_xy_top.transpose();

    CHECK(s2.filtered_mean(0) == doctest::Approx(cond(1)).epsilon(1e-10));
    CHECK(s2.filtered_cov(0, 0) == doctest::Approx(cond_cov(1, 1)).epsilon(1e-10));

    // The first step must match the one-observation conditioning too.
    double k1 = h * v1 / (h * h * v1 + r);
    CHECK(s1.filtered_mean(0) == doctest::Approx(m1 + k1 * (y1(0) - h * m1)).epsilon(1e-12));
    CHECK(s1.filtered_cov(0, 0) == doctest::Approx(v1 - k1 * h * v1).epsilon(1e-12));
}

TEST_CASE("noiseless one-factor data is recovered with full communality") {
    Eigen::MatrixXd f;
    Eigen::MatrixXd x = factor_panel(90, 10, 1, 0.0, 333, &f);
    standardize_columns(x);
    dfm::DfmSpec spec;
    spec.factor_count = 1;
    spec.lag_order = 1;
    auto fit = dfm::fit_dfm(x, spec);
    CHECK(std::abs(correlation(fit.factors.col(0), f.col(0))) > 0.999);
    for (Eigen::Index i = 0; i < fit.per_series_r2.size(); ++i)
        CHECK(fit.per_series_r2(i) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("EM log-likelihood never decreases") {
    Eigen::MatrixXd x = factor_panel(80, 12, 2, 0.6, 555);
    standardize_columns(x);
    dfm::DfmSpec spec;
    spec.factor_count = 2;
    spec.lag_order = 1;
    auto fit = dfm::fit_dfm(x, spec);
    for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i)
        CHECK(fit.loglik_trace[i] >= fit.loglik_trace[i - 1] - 1e-8);
    // Sign convention: the largest-magnitude loading in each column is positive.
    for (int c = 0; c < 2; ++c) {
        Eigen::Index imax = 0;
        fit.loadings.col(c).cwiseAbs().maxCoeff(&imax);
        CHECK(fit.loadings(imax, c) > 0.0);
    }
}

TEST_CASE("missing rows are tolerated casewise") {
    Eigen::MatrixXd x = factor_panel(80, 8, 1, 0.3, 808);
    standardize_columns(x);
    x.row(10).setConstant(std::numeric_limits<double>::quiet_NaN());
    x.row(41).setConstant(std::numeric_limits<double>::quiet_NaN());
    dfm::DfmSpec spec;
    spec.factor_count = 1;
    spec.lag_order = 1;
    auto fit = dfm::fit_dfm(x, spec);
    CHECK(fit.factors.rows() == 80);
    for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i)
        CHECK(fit.loglik_trace[i] >= fit.loglik_trace[i - 1] - 1e-8);
}

TEST_CASE("a pure-noise series is flagged by the relevance scores") {
    // Loadings bounded away from zero so every signal series stays relevant.
    const int t = 100, n = 9;
    Rng rng(RngSeed{99});
    Eigen::VectorXd f(t);
    double v = rng.normal();
    for (int i = 0; i < t; ++i) {
        v = 0.7 * v + rng.normal();
        f(i) = v;
    }
    Eigen::MatrixXd with_noise(t, n + 1);
    for (int j = 0; j < n; ++j) {
        double load = (j % 2 == 0 ? 1.0 : -1.0) * (0.8 + 0.1 * j);
        for (int i = 0; i < t; ++i) with_noise(i, j) = load * f(i) + 0.1 * rng.normal();
    }
    with_noise.col(n) = random_matrix(t, 1, 100).col(0);
    standardize_columns(with_noise);
    dfm::DfmSpec spec;
    spec.factor_count = 1;
    spec.lag_order = 1;
    auto fit = dfm::fit_dfm(with_noise, spec);
    auto rel = dfm::dfm_relevance(fit, {});
    REQUIRE(rel.size() == 10);
    CHECK(rel.back().series == "V10");
    CHECK(rel.back().flagged);
    int flagged_signal = 0;
    for (std::size_t i = 0; i < 9; ++i)
        if (rel[i].flagged) ++flagged_signal;
    CHECK(flagged_signal == 0);
}

TEST_CASE("noiseless factor data flags nothing") {
    Eigen::MatrixXd x = factor_panel(80, 8, 1, 0.0, 123);
    standardize_columns(x);
    dfm::DfmSpec spec;
    spec.factor_count = 1;
    spec.lag_order = 1;
    auto fit = dfm::fit_dfm(x, spec);
    for (const auto& e : dfm::dfm_relevance(fit, {})) CHECK_FALSE(e.flagged);
}

TEST_CASE("large factor counts require the explicit flag") {
    Eigen::MatrixXd x = factor_panel(60, 20, 2, 0.5, 7);
    standardize_columns(x);
    dfm::DfmSpec spec;
    spec.factor_count = 7;
    CHECK_THROWS_AS(dfm::fit_dfm(x, spec), DataError);
    spec.allow_large_r = true;
    CHECK_NOTHROW(dfm::fit_dfm(x, spec));
}
