#include "aroptk/reglm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aroptk/mathutil.hpp"

namespace aroptk::reglm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<std::string> default_names(const std::vector<std::string>& names, Eigen::Index p) {
    if (!names.empty()) {
        if (static_cast<Eigen::Index>(names.size()) != p)
            throw DataError("glm: name count does not match predictor count");
        return names;
    }
    std::vector<std::string> out;
    for (Eigen::Index j = 0; j < p; ++j) out.push_back("V" + std::to_string(j + 1));
    return out;
}

MatrixXd with_intercept(const MatrixXd& X) {
    MatrixXd Z(X.rows(), X.cols() + 1);
    Z.col(0).setOnes();
    Z.rightCols(X.cols()) = X;
    return Z;
}

double gaussian_loglik(double rss, double n) {
    double sigma2 = rss / n;
    if (sigma2 <= 0.0) sigma2 = std::numeric_limits<double>::min();
    return -0.5 * n * (std::log(2.0 * M_PI * sigma2) + 1.0);
}

}  // namespace

GlmFit glm_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
               const std::vector<std::string>& names) {
    if (y.size() != X.rows()) throw DataError("glm: dimension mismatch");
    if (X.rows() <= X.cols() + 1) throw DataError("glm: too few observations");

    MatrixXd Z = with_intercept(X);
    Eigen::ColPivHouseholderQR<MatrixXd> qr(Z);
    qr.setThreshold(1e-10);
    if (qr.rank() < Z.cols()) {
        // Name the dependent columns for the error message.
        auto var_names = default_names(names, X.cols());
        std::string bad;
        Eigen::Index rank = qr.rank();
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index i = rank; i < Z.cols(); ++i) {
            Eigen::Index col = perm(i);
            if (col == 0) continue;
            if (!bad.empty()) bad += ", ";
            bad += var_names[static_cast<std::size_t>(col - 1)];
        }
        throw NumericError("glm: rank-deficient design; dependent columns: " + bad);
    }

    GlmFit fit;
    fit.names.push_back("(Intercept)");
    for (const auto& n : default_names(names, X.cols())) fit.names.push_back(n);
    fit.coefficients = qr.solve(y);
    fit.fitted = Z * fit.coefficients;
    double rss = (y - fit.fitted).squaredNorm();
    double n = static_cast<double>(y.size());
    fit.dispersion = rss / n;
    fit.loglik = gaussian_loglik(rss, n);
    // k = coefficients + dispersion, matching the usual Gaussian GLM count.
    double k = static_cast<double>(Z.cols()) + 1.0;
    fit.aic = 2.0 * k - 2.0 * fit.loglik;
    return fit;
}

EliminationTrace backward_eliminate(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                    const std::vector<std::string>& names) {
    auto var_names = default_names(names, X.cols());
    std::vector<int> active(static_cast<std::size_t>(X.cols()));
    for (std::size_t j = 0; j < active.size(); ++j) active[j] = static_cast<int>(j);

    auto submatrix = [&](const std::vector<int>& cols) {
        MatrixXd sub(X.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = X.col(cols[j]);
        return sub;
    };
    auto subnames = [&](const std::vector<int>& cols) {
        std::vector<std::string> out;
        for (int c : cols) out.push_back(var_names[static_cast<std::size_t>(c)]);
        return out;
    };

    EliminationTrace trace;
    GlmFit current = glm_fit(y, submatrix(active), subnames(active));
    for (;;) {
        if (active.empty()) break;
        double best_aic = current.aic;
        int best_drop = -1;
        for (std::size_t j = 0; j < active.size(); ++j) {
            std::vector<int> candidate = active;
            candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(j));
            double aic;
            try {
                aic = glm_fit(y, submatrix(candidate), subnames(candidate)).aic;
            } catch (const std::exception&) {
                continue;
            }
            if (aic < best_aic) {  // strict: ties keep the earlier drop / current model
                best_aic = aic;
                best_drop = static_cast<int>(j);
            }
        }
        if (best_drop < 0) break;
        EliminationStep step;
        step.dropped_variable = var_names[static_cast<std::size_t>(active[static_cast<std::size_t>(best_drop)])];
        step.aic_before = current.aic;
        trace.dropped.push_back(step.dropped_variable);
        active.erase(active.begin() + best_drop);
        current = glm_fit(y, submatrix(active), subnames(active));
        step.aic_after = current.aic;
        trace.steps.push_back(step);
    }

    trace.surviving = subnames(active);
    trace.surviving_columns = active;
    trace.final_fit = std::move(current);
    return trace;
}

ValidationReport validate(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, RngSeed seed,
                          double train_fraction, const std::vector<std::string>& names) {
    const Eigen::Index n = y.size();
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw DataError("validate: train fraction must be in (0, 1)");

    // Seeded Fisher-Yates permutation; the first chunk trains.
    std::vector<std::size_t> perm(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Rng rng(seed);
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng.below(i)]);

    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    std::size_t n_test = static_cast<std::size_t>(n) - n_train;
    std::size_t min_rows = static_cast<std::size_t>(X.cols()) + 2;
    if (n_train < min_rows || n_test < min_rows)
        throw DataError("validate: partition too small for the model");

    auto rows = [&](std::size_t begin, std::size_t count) {
        MatrixXd Xs(static_cast<Eigen::Index>(count), X.cols());
        VectorXd ys(static_cast<Eigen::Index>(count));
        for (std::size_t i = 0; i < count; ++i) {
            Xs.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(perm[begin + i]));
            ys(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(perm[begin + i]));
        }
        return std::make_pair(Xs, ys);
    };
    auto [Xtr, ytr] = rows(0, n_train);
    auto [Xte, yte] = rows(n_train, n_test);

    // Rank-tolerant fit: exact collinearity is reported through the VIFs, not
    // rejected, so validation still runs on degenerate designs.
    MatrixXd Ztr = with_intercept(Xtr);
    Eigen::ColPivHouseholderQR<MatrixXd> qr(Ztr);
    VectorXd coef = qr.solve(ytr);
    double rss_train = (ytr - Ztr * coef).squaredNorm();
    double loglik_train = gaussian_loglik(rss_train, static_cast<double>(ytr.size()));
    auto mae = [&](const MatrixXd& Xs, const VectorXd& ys) {
        return (ys - with_intercept(Xs) * coef).cwiseAbs().mean();
    };

    ValidationReport report;
    report.split_seed = seed;
    report.train_fraction = train_fraction;
    report.train_mae = mae(Xtr, ytr);
    report.test_mae = mae(Xte, yte);
    report.train_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));

    // Maximum-likelihood pseudo-R^2 (Cox-Snell, normalized to [0, 1]).
    double n_tr = static_cast<double>(ytr.size());
    double rss_null = (ytr.array() - ytr.mean()).square().sum();
    double ll_null = gaussian_loglik(rss_null, n_tr);
    double cox_snell = 1.0 - std::exp(2.0 / n_tr * (ll_null - loglik_train));
    double ceiling = 1.0 - std::exp(2.0 / n_tr * ll_null);
    report.pseudo_r2 = ceiling > 0.0 ? std::clamp(cox_snell / ceiling, 0.0, 1.0)
                                     : (cox_snell > 0.0 ? 1.0 : 0.0);

    // VIF_j = 1 / (1 - R^2_j) regressing predictor j on the rest.
    auto var_names = default_names(names, X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        MatrixXd others(X.rows(), X.cols());
        others.col(0).setOnes();
        Eigen::Index c = 1;
        for (Eigen::Index k = 0; k < X.cols(); ++k) {
            if (k == j) continue;
            others.col(c++) = X.col(k);
        }
        MatrixXd Zo = others.leftCols(c);
        VectorXd target = X.col(j);
        double tss = (target.array() - target.mean()).square().sum();
        double vif;
        if (tss <= 0.0) {
            vif = std::numeric_limits<double>::infinity();
        } else {
            VectorXd beta = (Zo.transpose() * Zo)
                                .ldlt()
                                .solve(Zo.transpose() * target);
            double rss = (target - Zo * beta).squaredNorm();
            double r2 = 1.0 - rss / tss;
            vif = r2 >= 1.0 - 1e-12 ? std::numeric_limits<double>::infinity() : 1.0 / (1.0 - r2);
        }
        report.vif[var_names[static_cast<std::size_t>(j)]] = vif;
    }
    return report;
}

}  // namespace aroptk::reglm
