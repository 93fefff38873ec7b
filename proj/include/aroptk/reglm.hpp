#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "aroptk/core.hpp"

namespace aroptk::reglm {

/// Gaussian-identity GLM; coefficients coincide with OLS, log-likelihood is
/// the Gaussian density at the ML dispersion (rss / n).
struct GlmFit {
    std::vector<std::string> names;  // intercept first
    Eigen::VectorXd coefficients;
    double loglik = 0.0;
    double aic = 0.0;        // 2k - 2 loglik, k counting the dispersion
    double dispersion = 0.0;  // rss / n
    Eigen::VectorXd fitted;
};

/// Predictors X are the bare covariates; an intercept column is always
/// prepended. Throws NumericError listing the dependent columns when X is
/// rank deficient.
GlmFit glm_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
               const std::vector<std::string>& names = {});

struct EliminationStep {
    std::string dropped_variable;
    double aic_before = 0.0;
    double aic_after = 0.0;
};

struct EliminationTrace {
    std::vector<EliminationStep> steps;
    std::vector<std::string> surviving;
    std::vector<std::string> dropped;
    GlmFit final_fit;
    std::vector<int> surviving_columns;  // indices into the original X
};

/// Greedy backward elimination: at each step drop the variable whose removal
/// gives the lowest AIC, as long as that AIC improves on the current model.
/// Ties break toward the earliest column. The intercept is never dropped.
EliminationTrace backward_eliminate(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                    const std::vector<std::string>& names = {});

struct ValidationReport {
    RngSeed split_seed;
    double train_fraction = 0.8;
    double train_mae = 0.0;
    double test_mae = 0.0;
    double pseudo_r2 = 0.0;  // Nagelkerke (ML / Cox-Snell normalized)
    std::map<std::string, double> vif;  // +inf sentinel on perfect collinearity
    std::vector<std::size_t> train_rows;
};

/// Random train/test split (seeded Fisher-Yates), MAE on both partitions,
/// maximum-likelihood pseudo-R^2 and variance inflation factors.
ValidationReport validate(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                          RngSeed seed, double train_fraction = 0.8,
                          const std::vector<std::string>& names = {});

}  // namespace aroptk::reglm
