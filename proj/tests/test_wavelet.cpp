#include <cmath>
#include <vector>

#include "aroptk/core.hpp"
#include "aroptk/filters.hpp"
#include "doctest.h"

using namespace aroptk;

namespace {

TimeSeries random_series(int n, std::uint64_t seed) {
    Rng rng(RngSeed{seed});
    TimeSeries ts{1960, {}, "x"};
    for (int t = 0; t < n; ++t) ts.values.push_back(rng.normal());
    return ts;
}

// Independent convolution-decimation oracle: analysis row i of the approx
// operator is h[(m - 2i) mod n], of the detail operator g[(m - 2i) mod n].
void matrix_dwt(const std::vector<double>& x, std::vector<double>& approx,
                std::vector<double>& detail) {
    const auto& h = filters::la16_scaling_filter();
    const auto& g = filters::la16_wavelet_filter();
    const int n = static_cast<int>(x.size());
    approx.assign(static_cast<std::size_t>(n / 2), 0.0);
    detail.assign(static_cast<std::size_t>(n / 2), 0.0);
    for (int i = 0; i < n / 2; ++i) {
        for (int m = 0; m < n; ++m) {
            int k = ((m - 2 * i) % n + n) % n;
            double hk = 0.0, gk = 0.0;
            // Periodized filter: fold taps beyond n back onto [0, n).
            for (int rep = k; rep < static_cast<int>(h.size()); rep += n) {
                hk += h[static_cast<std::size_t>(rep)];
                gk += g[static_cast<std::size_t>(rep)];
            }
            approx[static_cast<std::size_t>(i)] += hk * x[static_cast<std::size_t>(m)];
            detail[static_cast<std::size_t>(i)] += gk * x[static_cast<std::size_t>(m)];
        }
    }
}

}  // namespace

TEST_CASE("scaling filter sums to sqrt(2) and is even-shift orthonormal") {
    const auto& h = filters::la16_scaling_filter();
    REQUIRE(h.size() == 16);
    double sum = 0.0;
    for (double v : h) sum += v;
    CHECK(sum == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    for (int m = 0; m <= 7; ++m) {
        double dot = 0.0;
        for (std::size_t k = 0; k + 2 * static_cast<std::size_t>(m) < h.size(); ++k)
            dot += h[k] * h[k + 2 * static_cast<std::size_t>(m)];
        CHECK(dot == doctest::Approx(m == 0 ? 1.0 : 0.0).epsilon(1e-10));
    }
}

TEST_CASE("details of a constant series vanish") {
    TimeSeries ts{1960, std::vector<double>(64, 3.25), "c"};
    filters::WaveletSpec spec;
    auto d = filters::dwt_mra(ts, spec);
    for (const auto& c : d.components)
        for (double v : c.values) CHECK(std::abs(v) < 1e-10);
    for (double v : d.trend) CHECK(v == doctest::Approx(3.25).epsilon(1e-10));
}

TEST_CASE("one analysis step matches the explicit matrix oracle") {
    auto impulse = std::vector<double>(32, 0.0);
    impulse[5] = 1.0;
    std::vector<double> a, d, oa, od;
    filters::dwt_step(impulse, a, d);
    matrix_dwt(impulse, oa, od);
    REQUIRE(a.size() == oa.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == doctest::Approx(oa[i]).epsilon(1e-10));
        CHECK(d[i] == doctest::Approx(od[i]).epsilon(1e-10));
    }

    // Second level: the oracle applied to the first-level approximation.
    std::vector<double> a2, d2, oa2, od2;
    filters::dwt_step(a, a2, d2);
    matrix_dwt(oa, oa2, od2);
    for (std::size_t i = 0; i < a2.size(); ++i) {
        CHECK(a2[i] == doctest::Approx(oa2[i]).epsilon(1e-10));
        CHECK(d2[i] == doctest::Approx(od2[i]).epsilon(1e-10));
    }
}

TEST_CASE("analysis step conserves energy and inverts exactly") {
    auto ts = random_series(64, 91);
    std::vector<double> a, d;
    filters::dwt_step(ts.values, a, d);
    double in = 0.0, out = 0.0;
    for (double v : ts.values) in += v * v;
    for (double v : a) out += v * v;
    for (double v : d) out += v * v;
    CHECK(out == doctest::Approx(in).epsilon(1e-9));

    auto back = filters::idwt_step(a, d);
    REQUIRE(back.size() == ts.values.size());
    for (std::size_t i = 0; i < back.size(); ++i)
        CHECK(back[i] == doctest::Approx(ts.values[i]).epsilon(1e-10));
}

TEST_CASE("pyramid MRA reconstructs random series perfectly") {
    for (int n : {32, 64, 128}) {
        auto ts = random_series(n, 100 + static_cast<std::uint64_t>(n));
        filters::WaveletSpec spec;
        spec.depth_J = n == 32 ? 3 : 4;
        auto decomp = filters::dwt_mra(ts, spec);
        CHECK(decomp.additivity_error() < 1e-10);
        CHECK(decomp.components.size() == static_cast<std::size_t>(spec.depth_J));
    }
}

TEST_CASE("mra_levels runs from the smooth alone up to the source") {
    auto ts = random_series(64, 7);
    filters::WaveletSpec spec;
    auto decomp = filters::dwt_mra(ts, spec);
    auto levels = filters::mra_levels(decomp);
    REQUIRE(levels.size() == decomp.components.size() + 1);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(levels.front()[i] == doctest::Approx(decomp.trend[i]).epsilon(1e-12));
        CHECK(levels.back()[i] == doctest::Approx(ts.values[i]).epsilon(1e-10));
    }
    // Level 1 adds the coarsest detail DJ.
    const auto& dj = decomp.components.back().values;
    for (std::size_t i = 0; i < ts.size(); ++i)
        CHECK(levels[1][i] == doctest::Approx(decomp.trend[i] + dj[i]).epsilon(1e-12));
}

TEST_CASE("mra_levels rejects non-wavelet decompositions") {
    Decomposition d;
    d.source = {1960, {1, 2, 3}, "x"};
    d.trend = {1, 2, 3};
    d.filter_tag = FilterTag::EMD;
    CHECK_THROWS_AS(filters::mra_levels(d), DataError);
}

TEST_CASE("decimated transform rejects lengths not divisible by 2^J") {
    auto ts = random_series(61, 3);
    filters::WaveletSpec spec;
    CHECK_THROWS_AS(filters::dwt_mra(ts, spec), DataError);
}

TEST_CASE("maximal-overlap MRA handles arbitrary lengths additively") {
    for (int n : {61, 64, 97}) {
        auto ts = random_series(n, 500 + static_cast<std::uint64_t>(n));
        filters::WaveletSpec spec;
        spec.depth_J = 3;
        auto decomp = filters::modwt_mra(ts, spec);
        CHECK(decomp.additivity_error() < 1e-10);
    }
}

TEST_CASE("series shorter than the filter are rejected") {
    auto ts = random_series(12, 9);
    filters::WaveletSpec spec;
    spec.depth_J = 1;
    CHECK_THROWS_AS(filters::dwt_mra(ts, spec), DataError);
}
