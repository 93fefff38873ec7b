#include <algorithm>
#include <cmath>
#include <string>

#include "aroptk/filters.hpp"

namespace aroptk::filters {

namespace {

// Least-asymmetric Daubechies scaling filter, 8 vanishing moments, 16 taps
// (Daubechies 1992 tabulation; spectral-factorization values). Sum = sqrt(2),
// orthonormal to its even shifts.
const std::vector<double> kLa16Scaling = {
    -3.3824159510050026e-03, -5.4213233180001069e-04, 3.1695087811525991e-02,
    7.6074873249766082e-03,  -1.4329423835127266e-01, -6.1273359067811078e-02,
    4.8135965125905339e-01,  7.7718575169962803e-01,  3.6444189483617894e-01,
    -5.1945838107881801e-02, -2.7219029917103486e-02, 4.9137179673730287e-02,
    3.8087520138944895e-03,  -1.4952258337062199e-02, -3.0292051472413308e-04,
    1.8899503327676892e-03,
};

std::vector<double> make_wavelet_filter() {
    const std::size_t L = kLa16Scaling.size();
    std::vector<double> g(L);
    for (std::size_t k = 0; k < L; ++k) {
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        g[k] = sign * kLa16Scaling[L - 1 - k];
    }
    return g;
}

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
    std::ptrdiff_t m = i % static_cast<std::ptrdiff_t>(n);
    if (m < 0) m += static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(m);
}

}  // namespace

const std::vector<double>& la16_scaling_filter() { return kLa16Scaling; }

const std::vector<double>& la16_wavelet_filter() {
    static const std::vector<double> g = make_wavelet_filter();
    return g;
}

void dwt_step(const std::vector<double>& x, std::vector<double>& approx,
              std::vector<double>& detail) {
    const std::size_t n = x.size();
    if (n % 2 != 0) throw DataError("dwt_step: odd length");
    const auto& h = la16_scaling_filter();
    const auto& g = la16_wavelet_filter();
    const std::size_t L = h.size();
    approx.assign(n / 2, 0.0);
    detail.assign(n / 2, 0.0);
    for (std::size_t i = 0; i < n / 2; ++i) {
        double a = 0.0, d = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            double v = x[wrap(static_cast<std::ptrdiff_t>(2 * i + l), n)];
            a += h[l] * v;
            d += g[l] * v;
        }
        approx[i] = a;
        detail[i] = d;
    }
}

std::vector<double> idwt_step(const std::vector<double>& approx,
                              const std::vector<double>& detail) {
    const std::size_t half = approx.size();
    if (detail.size() != half) throw DataError("idwt_step: length mismatch");
    const std::size_t n = 2 * half;
    const auto& h = la16_scaling_filter();
    const auto& g = la16_wavelet_filter();
    const std::size_t L = h.size();
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < half; ++i) {
        for (std::size_t l = 0; l < L; ++l) {
            std::size_t m = wrap(static_cast<std::ptrdiff_t>(2 * i + l), n);
            x[m] += h[l] * approx[i] + g[l] * detail[i];
        }
    }
    return x;
}

namespace {

void check_spec(const TimeSeries& series, const WaveletSpec& spec) {
    require_finite(series);
    if (spec.vanishing_moments != 8)
        throw DataError("wavelet: only the 8-vanishing-moment filter is provided");
    const int n = static_cast<int>(series.size());
    if (n < spec.filter_length()) throw DataError("wavelet: series shorter than filter");
    int max_j = static_cast<int>(std::floor(std::log2(static_cast<double>(n))));
    if (spec.depth_J < 1 || spec.depth_J > max_j)
        throw DataError("wavelet: depth J out of range [1, floor(log2 n)]");
}

Decomposition dwt_mra_periodic(const TimeSeries& series, const WaveletSpec& spec,
                               std::size_t keep) {
    const int J = spec.depth_J;
    std::vector<std::vector<double>> details(static_cast<std::size_t>(J));
    std::vector<double> approx = series.values;
    for (int j = 0; j < J; ++j) {
        std::vector<double> a, d;
        dwt_step(approx, a, d);
        details[static_cast<std::size_t>(j)] = std::move(d);
        approx = std::move(a);
    }

    // Level-j coefficients synthesized back to the sample grid with every
    // other band zeroed; linearity makes the components sum to the input.
    auto lift = [](std::vector<double> coeffs, int from_level, bool is_detail) {
        std::vector<double> zero(coeffs.size(), 0.0);
        std::vector<double> v = is_detail ? idwt_step(zero, coeffs) : idwt_step(coeffs, zero);
        for (int j = from_level - 1; j >= 1; --j) {
            std::vector<double> z(v.size(), 0.0);
            v = idwt_step(v, z);
        }
        return v;
    };

    Decomposition out;
    out.source = series;
    out.filter_tag = FilterTag::DW;
    for (int j = 1; j <= J; ++j) {
        std::vector<double> dj = lift(details[static_cast<std::size_t>(j - 1)], j, true);
        dj.resize(keep);
        out.components.push_back({"D" + std::to_string(j), std::move(dj)});
    }
    out.trend = lift(approx, J, false);
    out.trend.resize(keep);
    return out;
}

}  // namespace

Decomposition dwt_mra(const TimeSeries& series, const WaveletSpec& spec) {
    check_spec(series, spec);
    const std::size_t n = series.size();
    const std::size_t block = std::size_t{1} << spec.depth_J;

    if (spec.boundary == WaveletBoundary::periodic) {
        if (n % block != 0)
            throw DataError(
                "wavelet: decimated transform needs length divisible by 2^J "
                "(use the maximal-overlap variant for other lengths)");
        return dwt_mra_periodic(series, spec, n);
    }

    // Reflection: transform the series concatenated with its reversal, then
    // truncate every component back to the original support.
    if ((2 * n) % block != 0)
        throw DataError("wavelet: reflection boundary needs length divisible by 2^(J-1)");
    TimeSeries ext = series;
    ext.values.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) ext.values.push_back(series.values[n - 1 - i]);
    Decomposition out = dwt_mra_periodic(ext, spec, n);
    out.source = series;
    return out;
}

Decomposition modwt_mra(const TimeSeries& series, const WaveletSpec& spec) {
    check_spec(series, spec);
    const std::size_t n = series.size();
    const auto& hf = la16_scaling_filter();
    const auto& gf = la16_wavelet_filter();
    const std::size_t L = hf.size();
    std::vector<double> h(L), g(L);
    for (std::size_t l = 0; l < L; ++l) {
        h[l] = hf[l] / std::sqrt(2.0);
        g[l] = gf[l] / std::sqrt(2.0);
    }
    const int J = spec.depth_J;

    auto analyze = [&](const std::vector<double>& v, const std::vector<double>& f, int level) {
        std::ptrdiff_t stride = std::ptrdiff_t{1} << (level - 1);
        std::vector<double> out(n, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            double acc = 0.0;
            for (std::size_t l = 0; l < L; ++l)
                acc += f[l] * v[wrap(static_cast<std::ptrdiff_t>(t) -
                                         stride * static_cast<std::ptrdiff_t>(l),
                                     n)];
            out[t] = acc;
        }
        return out;
    };
    auto adjoint = [&](const std::vector<double>& w, const std::vector<double>& f, int level) {
        std::ptrdiff_t stride = std::ptrdiff_t{1} << (level - 1);
        std::vector<double> out(n, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            double acc = 0.0;
            for (std::size_t l = 0; l < L; ++l)
                acc += f[l] * w[wrap(static_cast<std::ptrdiff_t>(t) +
                                         stride * static_cast<std::ptrdiff_t>(l),
                                     n)];
            out[t] = acc;
        }
        return out;
    };

    std::vector<std::vector<double>> detail_coef(static_cast<std::size_t>(J));
    std::vector<double> v = series.values;
    for (int j = 1; j <= J; ++j) {
        detail_coef[static_cast<std::size_t>(j - 1)] = analyze(v, g, j);
        v = analyze(v, h, j);
    }

    Decomposition out;
    out.source = series;
    out.filter_tag = FilterTag::DW;
    for (int j = 1; j <= J; ++j) {
        std::vector<double> dj = adjoint(detail_coef[static_cast<std::size_t>(j - 1)], g, j);
        for (int k = j - 1; k >= 1; --k) dj = adjoint(dj, h, k);
        out.components.push_back({"D" + std::to_string(j), std::move(dj)});
    }
    std::vector<double> sj = v;
    for (int k = J; k >= 1; --k) sj = adjoint(sj, h, k);
    out.trend = std::move(sj);
    return out;
}

std::vector<std::vector<double>> mra_levels(const Decomposition& decomp) {
    if (decomp.filter_tag != FilterTag::DW)
        throw DataError("mra_levels: decomposition is not a wavelet MRA");
    const std::size_t J = decomp.components.size();
    const std::size_t n = decomp.trend.size();
    std::vector<std::vector<double>> levels;
    std::vector<double> acc = decomp.trend;
    levels.push_back(acc);  // level 0: smooth alone
    for (std::size_t k = 1; k <= J; ++k) {
        const auto& dj = decomp.components[J - k].values;  // coarsest first
        for (std::size_t t = 0; t < n; ++t) acc[t] += dj[t];
        levels.push_back(acc);
    }
    return levels;
}

}  // namespace aroptk::filters
