#include "aroptk/distfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aroptk/mathutil.hpp"

namespace aroptk::distfit {

namespace {

constexpr double kDfMin = 2.01;
constexpr double kDfMax = 200.0;
constexpr double kBadObjective = 1e30;

double log_pdf_at(Family family, const std::map<std::string, double>& p, double x) {
    auto get = [&](const char* name) { return p.at(name); };
    switch (family) {
        case Family::normal: {
            double m = get("mean"), s = get("sd");
            if (s <= 0.0) return -kBadObjective;
            double z = (x - m) / s;
            return -0.5 * z * z - std::log(s) - 0.5 * std::log(2.0 * M_PI);
        }
        case Family::lognormal: {
            if (x <= 0.0) return -kBadObjective;
            double m = get("meanlog"), s = get("sdlog");
            if (s <= 0.0) return -kBadObjective;
            double z = (std::log(x) - m) / s;
            return -0.5 * z * z - std::log(s * x) - 0.5 * std::log(2.0 * M_PI);
        }
        case Family::cauchy: {
            double m = get("location"), s = get("scale");
            if (s <= 0.0) return -kBadObjective;
            double z = (x - m) / s;
            return -std::log(M_PI * s * (1.0 + z * z));
        }
        case Family::student_t: {
            double m = get("location"), s = get("scale"), df = get("df");
            if (s <= 0.0 || df <= 0.0) return -kBadObjective;
            double z = (x - m) / s;
            return std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                   0.5 * std::log(df * M_PI) - std::log(s) -
                   (df + 1.0) / 2.0 * std::log1p(z * z / df);
        }
        case Family::weibull: {
            if (x <= 0.0) return -kBadObjective;
            double k = get("shape"), lam = get("scale");
            if (k <= 0.0 || lam <= 0.0) return -kBadObjective;
            double z = x / lam;
            return std::log(k / lam) + (k - 1.0) * std::log(z) - std::pow(z, k);
        }
        case Family::uniform: {
            double a = get("min"), b = get("max");
            if (!(b > a)) return -kBadObjective;
            if (x < a || x > b) return -kBadObjective;
            return -std::log(b - a);
        }
        case Family::gamma: {
            if (x <= 0.0) return -kBadObjective;
            double a = get("shape"), r = get("rate");
            if (a <= 0.0 || r <= 0.0) return -kBadObjective;
            return a * std::log(r) - std::lgamma(a) + (a - 1.0) * std::log(x) - r * x;
        }
    }
    return -kBadObjective;
}

double cdf_at(Family family, const std::map<std::string, double>& p, double x) {
    auto get = [&](const char* name) { return p.at(name); };
    switch (family) {
        case Family::normal:
            return num::norm_cdf((x - get("mean")) / get("sd"));
        case Family::lognormal:
            if (x <= 0.0) return 0.0;
            return num::norm_cdf((std::log(x) - get("meanlog")) / get("sdlog"));
        case Family::cauchy:
            return 0.5 + std::atan((x - get("location")) / get("scale")) / M_PI;
        case Family::student_t:
            return num::student_t_cdf((x - get("location")) / get("scale"), get("df"));
        case Family::weibull: {
            if (x <= 0.0) return 0.0;
            return 1.0 - std::exp(-std::pow(x / get("scale"), get("shape")));
        }
        case Family::uniform: {
            double a = get("min"), b = get("max");
            if (x <= a) return 0.0;
            if (x >= b) return 1.0;
            return (x - a) / (b - a);
        }
        case Family::gamma:
            if (x <= 0.0) return 0.0;
            return num::gamma_p(get("shape"), get("rate") * x);
    }
    return 0.0;
}

bool positive_support(Family family) {
    return family == Family::lognormal || family == Family::weibull || family == Family::gamma;
}

double total_loglik(Family family, const std::map<std::string, double>& p,
                    const std::vector<double>& sample) {
    double ll = 0.0;
    for (double x : sample) ll += log_pdf_at(family, p, x);
    return ll;
}

// Parameter vector <-> named map, with positivity enforced through log
// transforms inside the optimizer.
struct ParamCodec {
    std::vector<std::string> names;
    std::vector<bool> log_scale;

    std::map<std::string, double> decode(const std::vector<double>& theta) const {
        std::map<std::string, double> p;
        for (std::size_t i = 0; i < names.size(); ++i)
            p[names[i]] = log_scale[i] ? std::exp(theta[i]) : theta[i];
        return p;
    }
    std::vector<double> encode(const std::map<std::string, double>& p) const {
        std::vector<double> theta(names.size());
        for (std::size_t i = 0; i < names.size(); ++i)
            theta[i] = log_scale[i] ? std::log(p.at(names[i])) : p.at(names[i]);
        return theta;
    }
};

ParamCodec codec_for(Family family) {
    switch (family) {
        case Family::normal: return {{"mean", "sd"}, {false, true}};
        case Family::lognormal: return {{"meanlog", "sdlog"}, {false, true}};
        case Family::cauchy: return {{"location", "scale"}, {false, true}};
        case Family::student_t: return {{"location", "scale", "df"}, {false, true, true}};
        case Family::weibull: return {{"shape", "scale"}, {true, true}};
        case Family::uniform: return {{"min", "max"}, {false, false}};
        case Family::gamma: return {{"shape", "rate"}, {true, true}};
    }
    throw NumericError("unknown family");
}

double quantile_of(const std::vector<double>& sorted, double p) {
    double idx = p * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(idx));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double w = idx - std::floor(idx);
    return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

// Robust starting values per family.
std::map<std::string, double> starting_params(Family family, const std::vector<double>& sample) {
    std::vector<double> sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    double m = mean(sample);
    double sd = sample_sd(sample);
    if (sd <= 0.0) sd = 1e-6;
    switch (family) {
        case Family::normal: return {{"mean", m}, {"sd", sd}};
        case Family::lognormal: {
            std::vector<double> logs;
            for (double x : sample) logs.push_back(std::log(x));
            double sl = sample_sd(logs);
            return {{"meanlog", mean(logs)}, {"sdlog", sl > 0.0 ? sl : 1e-6}};
        }
        case Family::cauchy: {
            double med = quantile_of(sorted, 0.5);
            double iqr = quantile_of(sorted, 0.75) - quantile_of(sorted, 0.25);
            return {{"location", med}, {"scale", iqr > 0.0 ? iqr / 2.0 : 1e-6}};
        }
        case Family::student_t:
            return {{"location", m}, {"scale", sd}, {"df", 10.0}};
        case Family::weibull: {
            // Roughly invert the coefficient of variation.
            double cv = sd / m;
            double k = std::max(0.2, std::pow(cv, -1.086));
            return {{"shape", k}, {"scale", m}};
        }
        case Family::uniform: {
            double span = sorted.back() - sorted.front();
            return {{"min", sorted.front() - 0.01 * span}, {"max", sorted.back() + 0.01 * span}};
        }
        case Family::gamma:
            return {{"shape", m * m / (sd * sd)}, {"rate", m / (sd * sd)}};
    }
    throw NumericError("unknown family");
}

std::map<std::string, double> clamp_params(Family family, std::map<std::string, double> p) {
    if (family == Family::student_t)
        p["df"] = std::clamp(p["df"], kDfMin, kDfMax);
    return p;
}

std::map<std::string, double> optimize(Family family, const std::vector<double>& sample,
                                       const std::function<double(const std::map<std::string, double>&)>& objective) {
    ParamCodec codec = codec_for(family);
    auto f = [&](const std::vector<double>& theta) {
        for (double v : theta) {
            if (!std::isfinite(v) || std::abs(v) > 500.0) return kBadObjective;
        }
        return objective(clamp_params(family, codec.decode(theta)));
    };
    auto res = num::nelder_mead(f, codec.encode(starting_params(family, sample)), 1e-12, 8000);
    if (!res.converged || res.fmin >= kBadObjective)
        throw NumericError("distfit: optimizer failed to converge for " + to_string(family));
    return clamp_params(family, codec.decode(res.x));
}

std::map<std::string, double> fit_mle(Family family, const std::vector<double>& sample) {
    const double n = static_cast<double>(sample.size());
    switch (family) {
        case Family::normal: {
            double m = mean(sample);
            double ss = 0.0;
            for (double x : sample) ss += (x - m) * (x - m);
            return {{"mean", m}, {"sd", std::sqrt(ss / n)}};
        }
        case Family::lognormal: {
            std::vector<double> logs;
            for (double x : sample) logs.push_back(std::log(x));
            double m = mean(logs);
            double ss = 0.0;
            for (double v : logs) ss += (v - m) * (v - m);
            return {{"meanlog", m}, {"sdlog", std::sqrt(ss / n)}};
        }
        case Family::uniform: {
            auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
            return {{"min", *lo}, {"max", *hi}};
        }
        default:
            return optimize(family, sample, [&](const std::map<std::string, double>& p) {
                return -total_loglik(family, p, sample);
            });
    }
}

std::map<std::string, double> fit_mme(Family family, const std::vector<double>& sample) {
    double m = mean(sample);
    double s2 = 0.0;
    for (double x : sample) s2 += (x - m) * (x - m);
    s2 /= static_cast<double>(sample.size());
    double s = std::sqrt(s2);
    switch (family) {
        case Family::normal: return {{"mean", m}, {"sd", s}};
        case Family::lognormal: {
            if (m <= 0.0) throw DataError("mme: lognormal needs positive sample mean");
            double sdlog2 = std::log1p(s2 / (m * m));
            return {{"meanlog", std::log(m) - 0.5 * sdlog2}, {"sdlog", std::sqrt(sdlog2)}};
        }
        case Family::uniform:
            return {{"min", m - std::sqrt(3.0) * s}, {"max", m + std::sqrt(3.0) * s}};
        case Family::gamma: {
            if (m <= 0.0) throw DataError("mme: gamma needs positive sample mean");
            return {{"shape", m * m / s2}, {"rate", m / s2}};
        }
        case Family::weibull: {
            // Solve CV^2 = Gamma(1+2/k)/Gamma(1+1/k)^2 - 1 for k by bisection.
            double target = s2 / (m * m);
            auto cv2 = [](double k) {
                return std::exp(std::lgamma(1.0 + 2.0 / k) - 2.0 * std::lgamma(1.0 + 1.0 / k)) - 1.0;
            };
            double lo = 0.05, hi = 100.0;
            for (int i = 0; i < 200; ++i) {
                double mid = 0.5 * (lo + hi);
                if (cv2(mid) > target)
                    lo = mid;  // cv decreases in k
                else
                    hi = mid;
            }
            double k = 0.5 * (lo + hi);
            double lam = m / std::exp(std::lgamma(1.0 + 1.0 / k));
            return {{"shape", k}, {"scale", lam}};
        }
        case Family::cauchy:
            throw DataError("mme: Cauchy moments do not exist");
        case Family::student_t:
            throw DataError("mme: first two moments do not identify Student's t");
    }
    throw NumericError("unknown family");
}

double cvm_distance(Family family, const std::map<std::string, double>& p,
                    const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    double d = 1.0 / (12.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double f = cdf_at(family, p, sorted[i]);
        double target = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n));
        d += (f - target) * (f - target);
    }
    return d;
}

double neg_mean_log_spacing(Family family, const std::map<std::string, double>& p,
                            const std::vector<double>& sorted) {
    double prev = 0.0;
    double acc = 0.0;
    const std::size_t n = sorted.size();
    for (std::size_t i = 0; i <= n; ++i) {
        double f = i < n ? cdf_at(family, p, sorted[i]) : 1.0;
        double gap = f - prev;
        if (gap <= 1e-300) return kBadObjective;
        acc += std::log(gap);
        prev = f;
    }
    return -acc / static_cast<double>(n + 1);
}

}  // namespace

std::string to_string(Family f) {
    switch (f) {
        case Family::normal: return "normal";
        case Family::lognormal: return "lognormal";
        case Family::cauchy: return "cauchy";
        case Family::student_t: return "student_t";
        case Family::weibull: return "weibull";
        case Family::uniform: return "uniform";
        case Family::gamma: return "gamma";
    }
    return "?";
}

std::string to_string(Method m) {
    switch (m) {
        case Method::mle: return "mle";
        case Method::mge: return "mge";
        case Method::mme: return "mme";
        case Method::mse: return "mse";
    }
    return "?";
}

double log_pdf(const DistributionFit& f, double x) { return log_pdf_at(f.family, f.params, x); }
double cdf(const DistributionFit& f, double x) { return cdf_at(f.family, f.params, x); }

double quantile(const DistributionFit& f, double p) {
    if (p <= 0.0 || p >= 1.0) throw DataError("quantile: p must be in (0, 1)");
    // Expand a bracket, then bisect.
    double lo = -1.0, hi = 1.0;
    for (int i = 0; i < 200 && cdf(f, lo) > p; ++i) lo *= 2.0;
    for (int i = 0; i < 200 && cdf(f, hi) < p; ++i) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (cdf(f, mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

DistributionFit fit(const std::vector<double>& sample, Family family, Method method) {
    require_finite(sample, "distfit sample");
    if (sample.size() < 5) throw DataError("distfit: need at least 5 observations");
    if (positive_support(family)) {
        for (double x : sample) {
            if (x <= 0.0)
                throw DataError("distfit: " + to_string(family) + " requires a positive sample");
        }
    }

    std::vector<double> sorted = sample;
    std::sort(sorted.begin(), sorted.end());

    DistributionFit result;
    result.family = family;
    result.method = method;
    result.n = static_cast<int>(sample.size());
    switch (method) {
        case Method::mle:
            result.params = fit_mle(family, sample);
            break;
        case Method::mme:
            result.params = fit_mme(family, sample);
            break;
        case Method::mge:
            result.params = optimize(family, sample, [&](const std::map<std::string, double>& p) {
                return cvm_distance(family, p, sorted);
            });
            break;
        case Method::mse:
            result.params = optimize(family, sample, [&](const std::map<std::string, double>& p) {
                return neg_mean_log_spacing(family, p, sorted);
            });
            break;
    }

    result.loglik = total_loglik(family, result.params, sample);
    if (result.loglik <= -kBadObjective / 2.0)
        throw NumericError("distfit: degenerate likelihood for " + to_string(family));
    result.bic = static_cast<double>(result.param_count()) *
                     std::log(static_cast<double>(result.n)) -
                 2.0 * result.loglik;
    return result;
}

SelectionResult select(const std::vector<double>& sample, const std::vector<Family>& families,
                       const std::vector<Method>& methods) {
    SelectionResult out;
    for (Family fam : families) {
        for (Method m : methods) {
            try {
                out.fits.push_back(fit(sample, fam, m));
            } catch (const std::exception& e) {
                out.skipped.push_back(to_string(fam) + "/" + to_string(m) + ": " + e.what());
            }
        }
    }
    if (out.fits.size() < 2) throw DataError("distfit: fewer than 2 admissible fits");
    std::stable_sort(out.fits.begin(), out.fits.end(),
                     [](const DistributionFit& a, const DistributionFit& b) { return a.bic < b.bic; });
    return out;
}

}  // namespace aroptk::distfit
