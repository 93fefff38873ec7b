#pragma once

#include <map>
#include <string>
#include <vector>

#include "aroptk/core.hpp"

namespace aroptk::distfit {

enum class Family { normal, lognormal, cauchy, student_t, weibull, uniform, gamma };
enum class Method { mle, mge, mme, mse };

std::string to_string(Family f);
std::string to_string(Method m);

struct DistributionFit {
    Family family = Family::normal;
    Method method = Method::mle;
    std::map<std::string, double> params;
    double loglik = 0.0;
    double bic = 0.0;
    int n = 0;

    int param_count() const { return static_cast<int>(params.size()); }
};

/// Log density and CDF at the fitted parameters.
double log_pdf(const DistributionFit& fit, double x);
double cdf(const DistributionFit& fit, double x);
/// Quantile by bisection on the CDF.
double quantile(const DistributionFit& fit, double p);

/// Fit one (family, method) pair. MLE is closed-form where available
/// (normal, lognormal, uniform) and Nelder-Mead otherwise; MME matches the
/// first two moments; MGE minimizes the Cramer-von-Mises distance; MSE
/// maximizes the mean log spacing. Throws DataError on support violations
/// and for moment matching on families whose first two moments do not
/// identify the parameters (Cauchy, Student's t).
DistributionFit fit(const std::vector<double>& sample, Family family, Method method);

struct SelectionResult {
    std::vector<DistributionFit> fits;  // ascending BIC, winner first
    std::vector<std::string> skipped;   // inadmissible (family, method) notes
};

/// Fit every admissible (family, method) pair and rank by BIC.
SelectionResult select(const std::vector<double>& sample,
                       const std::vector<Family>& families,
                       const std::vector<Method>& methods);

inline const std::vector<Family>& all_families() {
    static const std::vector<Family> fams = {
        Family::normal, Family::lognormal, Family::cauchy,  Family::student_t,
        Family::weibull, Family::uniform,  Family::gamma,
    };
    return fams;
}

inline const std::vector<Method>& all_methods() {
    static const std::vector<Method> ms = {Method::mle, Method::mge, Method::mme, Method::mse};
    return ms;
}

}  // namespace aroptk::distfit
