#include "aroptk/core.hpp"

#include <algorithm>
#include <cmath>

namespace aroptk {

void require_finite(const std::vector<double>& v, const std::string& what) {
    if (v.empty()) throw DataError(what + ": empty series");
    for (double x : v) {
        if (!std::isfinite(x)) throw DataError(what + ": non-finite value");
    }
}

void require_finite(const TimeSeries& ts) {
    require_finite(ts.values, ts.label.empty() ? "series" : ts.label);
}

std::string to_string(FilterTag tag) {
    switch (tag) {
        case FilterTag::DW: return "DW";
        case FilterTag::EMD: return "EMD";
        case FilterTag::EHP: return "EHP";
    }
    return "?";
}

double Decomposition::additivity_error() const {
    double worst = 0.0;
    for (std::size_t t = 0; t < source.values.size(); ++t) {
        double sum = trend[t];
        for (const auto& c : components) sum += c.values[t];
        worst = std::max(worst, std::abs(sum - source.values[t]));
    }
    return worst;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(RngSeed seed) {
    std::uint64_t s = seed.seed;
    for (auto& w : state_) w = splitmix64(s);
}

std::uint64_t Rng::next_u64() {
    std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

double Rng::gamma(double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0) throw NumericError("gamma: invalid parameters");
    if (shape < 1.0) {
        // Boost to shape+1 and correct with u^(1/shape).
        double u = 0.0;
        do {
            u = uniform();
        } while (u <= 0.0);
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v * scale;
    }
}

double Rng::inv_gamma(double shape, double scale) {
    return 1.0 / gamma(shape, 1.0 / scale);
}

std::size_t Rng::below(std::size_t n) {
    if (n == 0) throw NumericError("Rng::below(0)");
    // Rejection sampling for an unbiased bounded draw.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = 0;
    do {
        x = next_u64();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) throw DataError("sample_variance: need at least 2 observations");
    double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

double sample_sd(const std::vector<double>& v) {
    return std::sqrt(sample_variance(v));
}

double linear_slope(const std::vector<double>& values) {
    require_finite(values, "linear_slope");
    std::size_t n = values.size();
    if (n < 2) throw DataError("insufficient observations");
    double xbar = static_cast<double>(n - 1) / 2.0;
    double ybar = mean(values);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = static_cast<double>(i) - xbar;
        sxy += dx * (values[i] - ybar);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

double linear_slope(const TimeSeries& series) {
    return linear_slope(series.values);
}

TimeSeries standardize(const TimeSeries& series) {
    require_finite(series);
    if (series.size() < 2) throw DataError("insufficient observations");
    double m = mean(series.values);
    double sd = sample_sd(series.values);
    if (sd <= 0.0) throw DataError("constant series");
    TimeSeries out = series;
    for (double& x : out.values) x = (x - m) / sd;
    return out;
}

}  // namespace aroptk
