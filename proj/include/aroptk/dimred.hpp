#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "aroptk/core.hpp"
#include "aroptk/distfit.hpp"

namespace aroptk::dimred {

struct PcaResult {
    Eigen::VectorXd eigenvalues;            // descending
    Eigen::VectorXd explained_variance_pct;
    Eigen::MatrixXd loadings;               // variables x components (unit eigenvectors)
    Eigen::MatrixXd contributions_pct;      // variables x components, columns sum to 100
    Eigen::MatrixXd scores;                 // observations x components
    int retained = 0;
    std::vector<std::string> variable_names;
};

/// PCA by eigendecomposition of the correlation (standardize = true) or
/// covariance matrix. Retention: components with eigenvalue > 1, extended
/// until cumulative explained variance reaches 70% and capped once it
/// exceeds 90%.
PcaResult pca(const Eigen::MatrixXd& data, bool standardize,
              const std::vector<std::string>& variable_names = {});

struct SvdResult {
    Eigen::VectorXd singular_values;  // descending
    double quantile_cut = 0.0;        // 0.90 quantile of the fitted distribution
    int relevant_count = 0;
    distfit::DistributionFit winning_fit;
};

/// Singular values of the centered (optionally standardized) matrix; the
/// winning BIC distribution from distfit::select defines a 20-quantile split,
/// and values above its 0.90 quantile count as relevant.
SvdResult svd_relevance(const Eigen::MatrixXd& data, bool standardize = true);

enum class SelectionMode { simple, weighted };

struct SectorScore {
    std::string sector;
    double score = 0.0;
    bool flagged = false;  // score < 1: exclusion candidate
};

/// Average contribution of each variable over the retained components,
/// unweighted (simple) or weighted by each component's share of the retained
/// explained variance.
std::vector<SectorScore> select_sectors(const PcaResult& result, SelectionMode mode);

}  // namespace aroptk::dimred
