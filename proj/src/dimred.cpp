#include "aroptk/dimred.hpp"

#include <algorithm>
#include <cmath>

namespace aroptk::dimred {

namespace {

Eigen::MatrixXd center_columns(const Eigen::MatrixXd& data, bool standardize,
                               const std::vector<std::string>& names) {
    Eigen::MatrixXd x = data;
    const auto n = static_cast<double>(x.rows());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        double m = x.col(j).mean();
        x.col(j).array() -= m;
        if (standardize) {
            double sd = std::sqrt(x.col(j).squaredNorm() / (n - 1.0));
            if (sd <= 0.0) {
                std::string name = j < static_cast<Eigen::Index>(names.size())
                                       ? names[static_cast<std::size_t>(j)]
                                       : "column " + std::to_string(j);
                throw DataError("pca: constant column '" + name + "' cannot be standardized");
            }
            x.col(j) /= sd;
        }
    }
    return x;
}

}  // namespace

PcaResult pca(const Eigen::MatrixXd& data, bool standardize,
              const std::vector<std::string>& variable_names) {
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();
    if (p < 2 || n < 3) throw DataError("pca: need at least 2 variables and 3 observations");
    if (!data.allFinite()) throw DataError("pca: non-finite input");

    Eigen::MatrixXd x = center_columns(data, standardize, variable_names);
    Eigen::MatrixXd cov = x.transpose() * x / (static_cast<double>(n) - 1.0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw NumericError("pca: eigensolver failed");

    PcaResult res;
    res.variable_names = variable_names;
    res.eigenvalues.resize(p);
    res.loadings.resize(p, p);
    // SelfAdjointEigenSolver returns ascending order; flip to descending.
    for (Eigen::Index c = 0; c < p; ++c) {
        res.eigenvalues(c) = std::max(0.0, solver.eigenvalues()(p - 1 - c));
        res.loadings.col(c) = solver.eigenvectors().col(p - 1 - c);
        // Deterministic sign: largest-magnitude entry positive.
        Eigen::Index imax = 0;
        res.loadings.col(c).cwiseAbs().maxCoeff(&imax);
        if (res.loadings(imax, c) < 0.0) res.loadings.col(c) *= -1.0;
    }

    double total = res.eigenvalues.sum();
    res.explained_variance_pct = res.eigenvalues * (100.0 / total);
    res.contributions_pct = 100.0 * res.loadings.array().square().matrix();
    res.scores = x * res.loadings;

    // Retention: eigenvalue > 1, extended to reach 70% cumulative variance,
    // capped where cumulative variance would pass 90%.
    int retained = 0;
    for (Eigen::Index c = 0; c < p; ++c)
        if (res.eigenvalues(c) > 1.0) retained = static_cast<int>(c) + 1;
    if (retained == 0) retained = 1;
    auto cum_pct = [&](int k) {
        double s = 0.0;
        for (int c = 0; c < k; ++c) s += res.explained_variance_pct(c);
        return s;
    };
    while (retained < p && cum_pct(retained) < 70.0) ++retained;
    while (retained > 1 && cum_pct(retained - 1) > 90.0) --retained;
    res.retained = retained;
    return res;
}

SvdResult svd_relevance(const Eigen::MatrixXd& data, bool standardize) {
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();
    if (p < 2 || n < 3) throw DataError("svd: need at least 2 variables and 3 observations");
    Eigen::MatrixXd x = center_columns(data, standardize, {});

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
    SvdResult res;
    res.singular_values = svd.singularValues();

    std::vector<double> sample(res.singular_values.data(),
                               res.singular_values.data() + res.singular_values.size());
    auto selection = distfit::select(sample, distfit::all_families(), distfit::all_methods());
    res.winning_fit = selection.fits.front();

    // 20-quantile split of the fitted distribution: relevant singular values
    // sit in the top decile, i.e. above the 0.90 quantile.
    res.quantile_cut = distfit::quantile(res.winning_fit, 0.90);
    res.relevant_count = 0;
    for (double v : sample)
        if (v > res.quantile_cut) ++res.relevant_count;
    return res;
}

std::vector<SectorScore> select_sectors(const PcaResult& result, SelectionMode mode) {
    if (result.retained < 1) throw DataError("select_sectors: nothing retained");
    const int k = result.retained;
    const Eigen::Index p = result.contributions_pct.rows();

    double var_total = 0.0;
    for (int c = 0; c < k; ++c) var_total += result.explained_variance_pct(c);

    std::vector<SectorScore> scores;
    scores.reserve(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        double s = 0.0;
        for (int c = 0; c < k; ++c) {
            double w = mode == SelectionMode::simple
                           ? 1.0 / static_cast<double>(k)
                           : result.explained_variance_pct(c) / var_total;
            s += w * result.contributions_pct(j, c);
        }
        SectorScore entry;
        entry.sector = j < static_cast<Eigen::Index>(result.variable_names.size())
                           ? result.variable_names[static_cast<std::size_t>(j)]
                           : "V" + std::to_string(j + 1);
        entry.score = s;
        entry.flagged = s < 1.0;
        scores.push_back(std::move(entry));
    }
    return scores;
}

}  // namespace aroptk::dimred
