#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "aroptk/core.hpp"

namespace aroptk::dfm {

struct DfmSpec {
    int factor_count = 1;       // r
    int lag_order = 1;          // p
    int max_em_iterations = 500;
    double em_tolerance = 1e-6;  // relative log-likelihood change
    /// r above 6 is only honored with this flag: large factor counts sit near
    /// the identification edge at desk-scale panels.
    bool allow_large_r = false;
};

struct DfmFit {
    Eigen::MatrixXd loadings;                  // N x r
    std::vector<Eigen::MatrixXd> var_coefs;    // A_1..A_p, each r x r
    Eigen::MatrixXd factors;                   // T x r, smoothed
    Eigen::VectorXd idiosyncratic_variances;   // N
    std::vector<double> loglik_trace;          // non-decreasing across EM
    int iterations = 0;
    bool converged = false;
    Eigen::VectorXd per_series_r2;             // N, in [0, 1]
};

struct FactorCriterionRow {
    int k = 0;
    double v_k = 0.0;
    double pc_p3 = 0.0;
};

struct FactorSelection {
    int r = 0;
    double sigma2_hat = 0.0;  // V at k_max
    std::vector<FactorCriterionRow> table;
};

/// Bai-Ng PC_p3 over k = 1..k_max on a standardized T x N panel:
/// PC_p3(k) = V(k) + k sigma2_hat ln(C^2)/C^2 with C = min(sqrt N, sqrt T)
/// and V(k) the scaled SSR of the k-principal-component approximation.
FactorSelection select_factor_count(const Eigen::MatrixXd& X, int k_max);

struct LagCriterionRow {
    int p = 0;
    double aic = 0.0, hq = 0.0, sc = 0.0, fpe = 0.0;
};

struct LagSelection {
    int aic = 0, hq = 0, sc = 0, fpe = 0;  // argmin per criterion
    std::vector<LagCriterionRow> table;
};

/// VAR(p) with intercept fitted on a common sample for p = 1..p_max; reports
/// each information criterion's argmin.
LagSelection select_lag_order(const Eigen::MatrixXd& series, int p_max);

/// EM with Kalman smoothing for X_t = L f_t + e_t,
/// f_t = A_1 f_{t-1} + ... + A_p f_{t-p} + u_t. Initialization by PCA; rows
/// containing NaN are dropped casewise in the filter update. Deterministic:
/// the seed only perturbs initialization when jitter is requested upstream.
DfmFit fit_dfm(const Eigen::MatrixXd& X, const DfmSpec& spec, RngSeed seed = {});

/// One Kalman filter step (predict + update) for a general linear-Gaussian
/// model; exposed for the direct Gaussian-conditioning oracle tests.
struct KalmanStep {
    Eigen::VectorXd predicted_mean, filtered_mean;
    Eigen::MatrixXd predicted_cov, filtered_cov;
    double loglik_contrib = 0.0;
};
KalmanStep kalman_step(const Eigen::VectorXd& prior_mean, const Eigen::MatrixXd& prior_cov,
                       const Eigen::MatrixXd& transition, const Eigen::MatrixXd& state_cov,
                       const Eigen::MatrixXd& obs_matrix, const Eigen::MatrixXd& obs_cov,
                       const Eigen::VectorXd& observation);

struct RelevanceEntry {
    std::string series;
    double r2 = 0.0;
    double score = 0.0;  // r2 scaled by the panel mean so the threshold is 1
    bool flagged = false;
};

/// Communality-style relevance: score = R^2_i / mean(R^2); series below the
/// threshold (default 1) are exclusion candidates.
std::vector<RelevanceEntry> dfm_relevance(const DfmFit& fit,
                                          const std::vector<std::string>& names,
                                          double threshold = 1.0);

}  // namespace aroptk::dfm
