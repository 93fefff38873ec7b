#include "aroptk/dfm.hpp"

#include <algorithm>
#include <cmath>

namespace aroptk::dfm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

}  // namespace

FactorSelection select_factor_count(const Eigen::MatrixXd& X, int k_max) {
    const auto T = X.rows();
    const auto N = X.cols();
    if (k_max < 1 || k_max >= std::min(N, T))
        throw DataError("select_factor_count: k_max must be in [1, min(N,T))");
    if (!X.allFinite()) throw DataError("select_factor_count: non-finite input");

    Eigen::JacobiSVD<MatrixXd> svd(X);
    const VectorXd& sv = svd.singularValues();
    double total = sv.squaredNorm();
    const double nt = static_cast<double>(N) * static_cast<double>(T);

    // V(k): SSR of the k-principal-component approximation, scaled by NT.
    std::vector<double> v(static_cast<std::size_t>(k_max) + 1);
    v[0] = total / nt;
    double acc = total;
    for (int k = 1; k <= k_max; ++k) {
        if (k - 1 < sv.size()) acc -= sv(k - 1) * sv(k - 1);
        v[static_cast<std::size_t>(k)] = std::max(0.0, acc) / nt;
    }

    FactorSelection sel;
    sel.sigma2_hat = v[static_cast<std::size_t>(k_max)];
    double c2 = static_cast<double>(std::min(N, T));  // C_NT^2
    double penalty_unit = sel.sigma2_hat * std::log(c2) / c2;

    double best = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        FactorCriterionRow row;
        row.k = k;
        row.v_k = v[static_cast<std::size_t>(k)];
        row.pc_p3 = row.v_k + static_cast<double>(k) * penalty_unit;
        sel.table.push_back(row);
        if (k == 1 || row.pc_p3 < best) {
            best = row.pc_p3;
            sel.r = k;
        }
    }
    return sel;
}

LagSelection select_lag_order(const Eigen::MatrixXd& series, int p_max) {
    const auto T = series.rows();
    const auto K = series.cols();
    if (p_max < 1) throw DataError("select_lag_order: p_max must be >= 1");
    const auto t_eff = T - p_max;  // common estimation sample
    if (t_eff < p_max * K + K + 2)
        throw DataError("select_lag_order: insufficient observations for VAR(p_max)");

    LagSelection sel;
    double teff = static_cast<double>(t_eff);
    for (int p = 1; p <= p_max; ++p) {
        const Eigen::Index cols = 1 + p * K;
        MatrixXd Z(t_eff, cols);
        MatrixXd Y(t_eff, K);
        for (Eigen::Index i = 0; i < t_eff; ++i) {
            Eigen::Index t = p_max + i;
            Y.row(i) = series.row(t);
            Z(i, 0) = 1.0;
            for (int lag = 1; lag <= p; ++lag)
                Z.block(i, 1 + (lag - 1) * K, 1, K) = series.row(t - lag);
        }
        MatrixXd beta = (Z.transpose() * Z).ldlt().solve(Z.transpose() * Y);
        MatrixXd resid = Y - Z * beta;
        MatrixXd sigma = resid.transpose() * resid / teff;
        double logdet = std::log(sigma.determinant());
        double pk2 = static_cast<double>(p) * static_cast<double>(K) * static_cast<double>(K);

        LagCriterionRow row;
        row.p = p;
        row.aic = logdet + 2.0 * pk2 / teff;
        row.hq = logdet + 2.0 * std::log(std::log(teff)) * pk2 / teff;
        row.sc = logdet + std::log(teff) * pk2 / teff;
        double m = static_cast<double>(p) * static_cast<double>(K) + 1.0;
        row.fpe = std::pow((teff + m) / (teff - m), static_cast<double>(K)) * sigma.determinant();
        sel.table.push_back(row);
    }
    auto argmin = [&](auto field) {
        int best_p = 1;
        double best = 0.0;
        for (std::size_t i = 0; i < sel.table.size(); ++i) {
            double v = field(sel.table[i]);
            if (i == 0 || v < best) {
                best = v;
                best_p = sel.table[i].p;
            }
        }
        return best_p;
    };
    sel.aic = argmin([](const LagCriterionRow& r) { return r.aic; });
    sel.hq = argmin([](const LagCriterionRow& r) { return r.hq; });
    sel.sc = argmin([](const LagCriterionRow& r) { return r.sc; });
    sel.fpe = argmin([](const LagCriterionRow& r) { return r.fpe; });
    return sel;
}

KalmanStep kalman_step(const VectorXd& prior_mean, const MatrixXd& prior_cov,
                       const MatrixXd& transition, const MatrixXd& state_cov,
                       const MatrixXd& obs_matrix, const MatrixXd& obs_cov,
                       const VectorXd& observation) {
    KalmanStep s;
    s.predicted_mean = transition * prior_mean;
    s.predicted_cov = transition * prior_cov * transition.transpose() + state_cov;

    VectorXd innovation = observation - obs_matrix * s.predicted_mean;
    MatrixXd innov_cov = obs_matrix * s.predicted_cov * obs_matrix.transpose() + obs_cov;
    Eigen::LLT<MatrixXd> llt(innov_cov);
    if (llt.info() != Eigen::Success)
        throw NumericError("kalman_step: innovation covariance not positive definite");
    MatrixXd gain = s.predicted_cov * obs_matrix.transpose() * llt.solve(
        MatrixXd::Identity(innov_cov.rows(), innov_cov.cols()));
    s.filtered_mean = s.predicted_mean + gain * innovation;
    s.filtered_cov = s.predicted_cov - gain * obs_matrix * s.predicted_cov;

    double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    double quad = innovation.dot(llt.solve(innovation));
    double n = static_cast<double>(observation.size());
    s.loglik_contrib = -0.5 * (n * std::log(2.0 * M_PI) + logdet + quad);
    return s;
}

namespace {

struct SmootherOutput {
    std::vector<VectorXd> mean;  // smoothed state means, length T
    std::vector<MatrixXd> cov;   // smoothed state covariances
    double loglik = 0.0;
};

// Kalman filter + RTS smoother for the stacked-factor state space. Rows of X
// containing NaN are removed casewise (time update only).
SmootherOutput smooth(const MatrixXd& X, const MatrixXd& transition, const MatrixXd& state_cov,
                      const MatrixXd& obs_matrix, const VectorXd& obs_var,
                      const VectorXd& init_mean, const MatrixXd& init_cov) {
    const auto T = X.rows();
    const auto m = transition.rows();
    MatrixXd R = obs_var.asDiagonal();

    std::vector<VectorXd> pred_mean(static_cast<std::size_t>(T)), filt_mean(static_cast<std::size_t>(T));
    std::vector<MatrixXd> pred_cov(static_cast<std::size_t>(T)), filt_cov(static_cast<std::size_t>(T));

    SmootherOutput out;
    VectorXd a = init_mean;
    MatrixXd P = init_cov;
    for (Eigen::Index t = 0; t < T; ++t) {
        bool missing = !X.row(t).allFinite();
        if (missing) {
            // Casewise deletion: propagate the prediction unchanged.
            VectorXd pm = transition * a;
            MatrixXd pc = transition * P * transition.transpose() + state_cov;
            pred_mean[static_cast<std::size_t>(t)] = pm;
            pred_cov[static_cast<std::size_t>(t)] = pc;
            a = pm;
            P = pc;
        } else {
            KalmanStep s = kalman_step(a, P, transition, state_cov, obs_matrix, R,
                                       X.row(t).transpose());
            pred_mean[static_cast<std::size_t>(t)] = s.predicted_mean;
            pred_cov[static_cast<std::size_t>(t)] = s.predicted_cov;
            a = s.filtered_mean;
            P = s.filtered_cov;
            out.loglik += s.loglik_contrib;
        }
        filt_mean[static_cast<std::size_t>(t)] = a;
        filt_cov[static_cast<std::size_t>(t)] = P;
    }

    out.mean.resize(static_cast<std::size_t>(T));
    out.cov.resize(static_cast<std::size_t>(T));
    out.mean[static_cast<std::size_t>(T - 1)] = filt_mean[static_cast<std::size_t>(T - 1)];
    out.cov[static_cast<std::size_t>(T - 1)] = filt_cov[static_cast<std::size_t>(T - 1)];
    for (Eigen::Index t = T - 2; t >= 0; --t) {
        const auto ti = static_cast<std::size_t>(t);
        MatrixXd pc_next = pred_cov[ti + 1];
        Eigen::LDLT<MatrixXd> ldlt(pc_next);
        MatrixXd J = filt_cov[ti] * transition.transpose() *
                     ldlt.solve(MatrixXd::Identity(m, m));
        out.mean[ti] = filt_mean[ti] + J * (out.mean[ti + 1] - pred_mean[ti + 1]);
        out.cov[ti] = filt_cov[ti] + J * (out.cov[ti + 1] - pred_cov[ti + 1]) * J.transpose();
    }
    return out;
}

}  // namespace

DfmFit fit_dfm(const Eigen::MatrixXd& X, const DfmSpec& spec, RngSeed /*seed*/) {
    const auto T = X.rows();
    const auto N = X.cols();
    const int r = spec.factor_count;
    const int p = spec.lag_order;
    if (r < 1 || r >= std::min(N, T)) throw DataError("fit_dfm: invalid factor count");
    if (r > 6 && !spec.allow_large_r)
        throw DataError("fit_dfm: factor count above 6 requires allow_large_r");
    if (p < 1) throw DataError("fit_dfm: lag order must be >= 1");

    // Complete rows for the moment-based initialization.
    std::vector<Eigen::Index> complete;
    for (Eigen::Index t = 0; t < T; ++t)
        if (X.row(t).allFinite()) complete.push_back(t);
    if (static_cast<int>(complete.size()) < p + r + 2)
        throw DataError("fit_dfm: too few complete observations");
    MatrixXd Xc(static_cast<Eigen::Index>(complete.size()), N);
    for (std::size_t i = 0; i < complete.size(); ++i) Xc.row(static_cast<Eigen::Index>(i)) = X.row(complete[i]);

    // PCA initialization: loadings = leading eigenvectors, factors = scores.
    MatrixXd cov = Xc.transpose() * Xc / static_cast<double>(Xc.rows());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
    MatrixXd loadings(N, r);
    for (int c = 0; c < r; ++c) loadings.col(c) = es.eigenvectors().col(N - 1 - c);
    MatrixXd factors0 = Xc * loadings;

    // VAR(p) on the initial factors.
    std::vector<MatrixXd> A(static_cast<std::size_t>(p), MatrixXd::Zero(r, r));
    MatrixXd Qu = MatrixXd::Identity(r, r);
    {
        Eigen::Index rows = factors0.rows() - p;
        MatrixXd Z(rows, p * r);
        MatrixXd Y(rows, r);
        for (Eigen::Index i = 0; i < rows; ++i) {
            Y.row(i) = factors0.row(i + p);
            for (int lag = 1; lag <= p; ++lag)
                Z.block(i, (lag - 1) * r, 1, r) = factors0.row(i + p - lag);
        }
        MatrixXd beta = (Z.transpose() * Z).ldlt().solve(Z.transpose() * Y);
        for (int lag = 1; lag <= p; ++lag)
            A[static_cast<std::size_t>(lag - 1)] = beta.middleRows((lag - 1) * r, r).transpose();
        MatrixXd resid = Y - Z * beta;
        Qu = resid.transpose() * resid / static_cast<double>(rows);
    }
    VectorXd idio = VectorXd::Ones(N);
    {
        MatrixXd resid = Xc - factors0 * loadings.transpose();
        for (Eigen::Index i = 0; i < N; ++i)
            idio(i) = std::max(1e-6, resid.col(i).squaredNorm() / static_cast<double>(Xc.rows()));
    }

    // Stacked state with p+1 blocks so every M-step moment is within-time.
    const int blocks = p + 1;
    const Eigen::Index m = static_cast<Eigen::Index>(blocks) * r;
    auto build_system = [&](MatrixXd& trans, MatrixXd& qmat, MatrixXd& zmat) {
        trans = MatrixXd::Zero(m, m);
        for (int lag = 1; lag <= p; ++lag)
            trans.block(0, (lag - 1) * r, r, r) = A[static_cast<std::size_t>(lag - 1)];
        for (int b = 1; b < blocks; ++b)
            trans.block(b * r, (b - 1) * r, r, r) = MatrixXd::Identity(r, r);
        qmat = MatrixXd::Zero(m, m);
        qmat.topLeftCorner(r, r) = Qu;
        zmat = MatrixXd::Zero(N, m);
        zmat.leftCols(r) = loadings;
    };

    DfmFit fit;
    double prev_ll = 0.0;
    bool have_prev = false;
    SmootherOutput sm;
    for (int it = 0; it < spec.max_em_iterations; ++it) {
        MatrixXd trans, qmat, zmat;
        build_system(trans, qmat, zmat);
        sm = smooth(X, trans, qmat, zmat, idio, VectorXd::Zero(m), MatrixXd::Identity(m, m));
        if (!std::isfinite(sm.loglik)) throw NumericError("fit_dfm: non-finite log-likelihood");
        fit.loglik_trace.push_back(sm.loglik);
        fit.iterations = it + 1;
        if (have_prev) {
            double rel = std::abs(sm.loglik - prev_ll) / (std::abs(prev_ll) + 1e-12);
            if (rel < spec.em_tolerance) {
                fit.converged = true;
                break;
            }
        }
        prev_ll = sm.loglik;
        have_prev = true;

        // M-step sufficient statistics (within-time, stacked state).
        MatrixXd s_ff = MatrixXd::Zero(r, r);          // sum E[f_t f_t']
        MatrixXd s_fl = MatrixXd::Zero(r, p * r);      // sum E[f_t lags']
        MatrixXd s_ll = MatrixXd::Zero(p * r, p * r);  // sum E[lags lags']
        MatrixXd s_xf = MatrixXd::Zero(N, r);          // sum x_t E[f_t]'
        MatrixXd s_ff_obs = MatrixXd::Zero(r, r);      // over observed rows only
        VectorXd s_xx = VectorXd::Zero(N);
        Eigen::Index n_obs = 0;
        for (Eigen::Index t = 0; t < T; ++t) {
            const auto ti = static_cast<std::size_t>(t);
            MatrixXd ext = sm.cov[ti] + sm.mean[ti] * sm.mean[ti].transpose();
            if (t >= 1) {  // VAR moments need a full lag window
                s_ff += ext.topLeftCorner(r, r);
                s_fl += ext.block(0, r, r, p * r);
                s_ll += ext.block(r, r, p * r, p * r);
            }
            if (X.row(t).allFinite()) {
                s_xf += X.row(t).transpose() * sm.mean[ti].head(r).transpose();
                s_ff_obs += ext.topLeftCorner(r, r);
                s_xx += X.row(t).transpose().cwiseAbs2();
                ++n_obs;
            }
        }

        // Closed-form updates.
        loadings = s_xf * s_ff_obs.ldlt().solve(MatrixXd::Identity(r, r));
        for (Eigen::Index i = 0; i < N; ++i) {
            double v = s_xx(i) - 2.0 * (loadings.row(i) * s_xf.row(i).transpose())(0) +
                       (loadings.row(i) * s_ff_obs * loadings.row(i).transpose())(0);
            idio(i) = std::max(1e-8, v / static_cast<double>(n_obs));
        }
        MatrixXd a_all = s_fl * s_ll.ldlt().solve(MatrixXd::Identity(p * r, p * r));
        for (int lag = 1; lag <= p; ++lag)
            A[static_cast<std::size_t>(lag - 1)] = a_all.middleCols((lag - 1) * r, r);
        MatrixXd qu_new = (s_ff - a_all * s_fl.transpose()) / static_cast<double>(T - 1);
        Qu = 0.5 * (qu_new + qu_new.transpose());  // enforce symmetry
        for (int i = 0; i < r; ++i) Qu(i, i) = std::max(Qu(i, i), 1e-10);
    }

    // Final smoothed factors at the converged parameters.
    fit.loadings = loadings;
    fit.var_coefs = A;
    fit.idiosyncratic_variances = idio;
    fit.factors.resize(T, r);
    for (Eigen::Index t = 0; t < T; ++t)
        fit.factors.row(t) = sm.mean[static_cast<std::size_t>(t)].head(r).transpose();

    // Sign convention: largest-magnitude loading per column positive.
    for (int c = 0; c < r; ++c) {
        Eigen::Index imax = 0;
        fit.loadings.col(c).cwiseAbs().maxCoeff(&imax);
        if (fit.loadings(imax, c) < 0.0) {
            fit.loadings.col(c) *= -1.0;
            fit.factors.col(c) *= -1.0;
            for (auto& a : fit.var_coefs) {
                a.row(c) *= -1.0;
                a.col(c) *= -1.0;
            }
        }
    }

    // Per-series R^2 from the smoothed factors, over observed cells.
    fit.per_series_r2.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        double var_x = 0.0, var_e = 0.0, mean_x = 0.0;
        Eigen::Index cnt = 0;
        for (Eigen::Index t = 0; t < T; ++t) {
            if (!std::isfinite(X(t, i))) continue;
            mean_x += X(t, i);
            ++cnt;
        }
        mean_x /= static_cast<double>(cnt);
        for (Eigen::Index t = 0; t < T; ++t) {
            if (!std::isfinite(X(t, i))) continue;
            double fitted = (fit.loadings.row(i) * fit.factors.row(t).transpose())(0);
            var_x += (X(t, i) - mean_x) * (X(t, i) - mean_x);
            var_e += (X(t, i) - fitted) * (X(t, i) - fitted);
        }
        double r2 = var_x > 0.0 ? 1.0 - var_e / var_x : 0.0;
        fit.per_series_r2(i) = std::clamp(r2, 0.0, 1.0);
    }
    return fit;
}

std::vector<RelevanceEntry> dfm_relevance(const DfmFit& fit,
                                          const std::vector<std::string>& names,
                                          double threshold) {
    const auto N = fit.per_series_r2.size();
    double avg = fit.per_series_r2.mean();
    if (avg <= 0.0) avg = 1e-12;
    std::vector<RelevanceEntry> out;
    for (Eigen::Index i = 0; i < N; ++i) {
        RelevanceEntry e;
        e.series = i < static_cast<Eigen::Index>(names.size())
                       ? names[static_cast<std::size_t>(i)]
                       : "V" + std::to_string(i + 1);
        e.r2 = fit.per_series_r2(i);
        e.score = e.r2 / avg;
        e.flagged = e.score < threshold;
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace aroptk::dfm
