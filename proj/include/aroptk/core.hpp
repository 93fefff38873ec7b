#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace aroptk {

/// Raised when an input violates an operation's preconditions.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a numerical routine fails (non-convergence, singularity).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised for malformed configuration or CLI arguments.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Annual time series anchored at a calendar year.
struct TimeSeries {
    int start_year = 0;
    std::vector<double> values;
    std::string label;

    std::size_t size() const { return values.size(); }
    int year_at(std::size_t i) const { return start_year + static_cast<int>(i); }
};

/// Rejects empty series and non-finite values.
void require_finite(const TimeSeries& ts);
void require_finite(const std::vector<double>& v, const std::string& what);

enum class FilterTag { DW, EMD, EHP };

std::string to_string(FilterTag tag);

/// Named component of an additive decomposition (wavelet detail, IMF, cycle).
struct NamedSeries {
    std::string name;
    std::vector<double> values;
};

/// Additive split of a series: source = trend + sum(components) up to a
/// filter-specific tolerance.
struct Decomposition {
    TimeSeries source;
    std::vector<double> trend;
    std::vector<NamedSeries> components;
    FilterTag filter_tag = FilterTag::DW;

    /// Max abs deviation of trend + sum(components) from the source.
    double additivity_error() const;
};

struct RngSeed {
    std::uint64_t seed = 0;
};

/// xoshiro256++ with splitmix64 seeding. Fixed project-wide so that a seed
/// reproduces bit-identical draws on every platform; all stochastic routines
/// take this generator (or an RngSeed) explicitly.
class Rng {
public:
    explicit Rng(RngSeed seed);

    std::uint64_t next_u64();
    /// Uniform on [0, 1).
    double uniform();
    /// Standard normal via Box-Muller (cached spare draw).
    double normal();
    /// Gamma(shape, scale) via Marsaglia-Tsang.
    double gamma(double shape, double scale);
    /// Inverse-gamma(shape, scale): 1/X with X ~ Gamma(shape, 1/scale).
    double inv_gamma(double shape, double scale);
    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n);

private:
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// OLS slope of values against 0-based index (per-year change).
double linear_slope(const TimeSeries& series);
double linear_slope(const std::vector<double>& values);

/// Centers and scales to sample (n-1) standard deviation one.
TimeSeries standardize(const TimeSeries& series);

double mean(const std::vector<double>& v);
/// Sample variance with the n-1 divisor.
double sample_variance(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);

}  // namespace aroptk
