#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace aroptk::num {

/// Standard normal CDF.
double norm_cdf(double x);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double inc_beta(double a, double b, double x);

/// Student-t CDF with df degrees of freedom.
double student_t_cdf(double t, double df);

/// Ordinary least squares via column-pivoted QR.
struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd residuals;
    Eigen::VectorXd fitted;
    double rss = 0.0;
    /// Coefficient standard errors under homoskedastic errors (sigma^2 from
    /// rss / (n - k)).
    Eigen::VectorXd se;
    double sigma2 = 0.0;  // rss / (n - k)
};

/// Throws NumericError when X is rank deficient.
OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Nelder-Mead simplex minimizer.
struct NelderMeadResult {
    std::vector<double> x;
    double fmin = 0.0;
    int iterations = 0;
    bool converged = false;
};

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start,
                             double tol = 1e-10,
                             int max_iter = 5000);

/// Linear interpolation over an ascending grid; clamps outside the range.
double interp_clamped(const std::vector<double>& xs, const std::vector<double>& ys, double x);

}  // namespace aroptk::num
