#include <Eigen/Dense>
#include <cmath>

#include "aroptk/filters.hpp"

namespace aroptk::filters {

namespace {

// Second-difference operator, (n-2) x n.
Eigen::MatrixXd second_difference(int n) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n - 2, n);
    for (int i = 0; i < n - 2; ++i) {
        d(i, i) = 1.0;
        d(i, i + 1) = -2.0;
        d(i, i + 2) = 1.0;
    }
    return d;
}

std::vector<double> second_differences(const std::vector<double>& y) {
    std::vector<double> d(y.size() - 2);
    for (std::size_t i = 0; i + 2 < y.size() + 0; ++i)
        d[i] = y[i] - 2.0 * y[i + 1] + y[i + 2];
    return d;
}

}  // namespace

std::vector<double> hp_filter(const std::vector<double>& y, double lambda) {
    const int n = static_cast<int>(y.size());
    if (n < 5) throw DataError("hp_filter: need at least 5 observations");
    if (!(lambda > 0.0)) throw DataError("hp_filter: lambda must be positive");
    Eigen::MatrixXd d = second_difference(n);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) + lambda * d.transpose() * d;
    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    Eigen::VectorXd tau = a.ldlt().solve(yv);
    return std::vector<double>(tau.data(), tau.data() + n);
}

EhpResult ehp(const TimeSeries& series, const EhpSpec& spec) {
    require_finite(series);
    const int n = static_cast<int>(series.size());
    if (n < 5) throw DataError("ehp: need at least 5 observations");
    if (spec.draws <= spec.burn_in || spec.burn_in < 0)
        throw DataError("ehp: draws must exceed burn-in");

    const std::vector<double>& y = series.values;
    std::vector<double> d2y = second_differences(y);
    double var_d2y = d2y.size() >= 2 ? sample_variance(d2y) : 1e-8;
    double var_y = sample_variance(y);
    if (var_d2y <= 0.0) var_d2y = 1e-12;
    if (var_y <= 0.0) var_y = 1e-12;

    const double a_tau = spec.trend_prior_shape;
    const double b_tau = spec.trend_prior_scale > 0.0 ? spec.trend_prior_scale : 2.0 * var_d2y;
    const double a_c = spec.cycle_prior_shape;
    const double b_c = spec.cycle_prior_scale > 0.0 ? spec.cycle_prior_scale : 2.0 * var_y;

    Eigen::MatrixXd d = second_difference(n);
    Eigen::MatrixXd dtd = d.transpose() * d;
    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);

    Rng rng(spec.seed);
    double sigma2_tau = var_d2y;
    double sigma2_c = var_y;

    Eigen::VectorXd tau = yv;
    Eigen::VectorXd mean_acc = Eigen::VectorXd::Zero(n);
    double s2tau_acc = 0.0, s2c_acc = 0.0;
    std::vector<double> draw_log;
    const int retained = spec.draws - spec.burn_in;
    draw_log.reserve(static_cast<std::size_t>(retained));
    const int mid = n / 2;

    for (int it = 0; it < spec.draws; ++it) {
        // Trend conditional: precision K = I/s_c^2 + D'D/s_tau^2. Factor the
        // scaled form K' = s_c^2 K = I + lam D'D (smallest eigenvalue 1, so
        // the Cholesky stays well conditioned even for tiny s_tau^2); then
        // mu = K'^{-1} y and tau = mu + s_c U'^{-1} z.
        // Cap the smoothing ratio: beyond 1e10 the trend is numerically a
        // straight line and the factorization would lose positive pivots.
        double lam = std::min(sigma2_c / sigma2_tau, 1e10);
        Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(n, n) + lam * dtd;
        Eigen::LLT<Eigen::MatrixXd> llt(precision);
        if (llt.info() != Eigen::Success)
            throw NumericError("ehp: trend precision not positive definite");
        Eigen::VectorXd mu = llt.solve(yv);
        Eigen::VectorXd z(n);
        for (int i = 0; i < n; ++i) z(i) = rng.normal();
        tau = mu + std::sqrt(sigma2_c) * llt.matrixU().solve(z);

        // Variance conditionals (inverse-gamma).
        Eigen::VectorXd d2tau = d * tau;
        sigma2_tau = rng.inv_gamma(a_tau + 0.5 * static_cast<double>(n - 2),
                                   b_tau + 0.5 * d2tau.squaredNorm());
        Eigen::VectorXd cycle = yv - tau;
        sigma2_c = rng.inv_gamma(a_c + 0.5 * static_cast<double>(n),
                                 b_c + 0.5 * cycle.squaredNorm());

        if (it >= spec.burn_in) {
            mean_acc += tau;
            s2tau_acc += sigma2_tau;
            s2c_acc += sigma2_c;
            draw_log.push_back(tau(mid));
        }
    }

    auto make_decomp = [&](const Eigen::VectorXd& trend) {
        Decomposition dec;
        dec.source = series;
        dec.filter_tag = FilterTag::EHP;
        dec.trend.assign(trend.data(), trend.data() + n);
        NamedSeries cyc;
        cyc.name = "cycle";
        cyc.values.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) cyc.values[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] - trend(i);
        dec.components.push_back(std::move(cyc));
        return dec;
    };

    EhpResult result;
    Eigen::VectorXd mean_trend = mean_acc / static_cast<double>(retained);
    result.mean_trend = make_decomp(mean_trend);
    result.last_draw_trend = make_decomp(tau);
    result.draw_log = std::move(draw_log);
    result.post_mean_trend_var = s2tau_acc / static_cast<double>(retained);
    result.post_mean_cycle_var = s2c_acc / static_cast<double>(retained);
    return result;
}

}  // namespace aroptk::filters
