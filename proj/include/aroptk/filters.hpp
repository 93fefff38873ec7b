#pragma once

#include <vector>

#include "aroptk/core.hpp"

namespace aroptk::filters {

enum class WaveletBoundary { periodic, reflection };

/// Least-asymmetric Daubechies wavelet, 8 vanishing moments
/// (16-tap scaling filter).
struct WaveletSpec {
    int vanishing_moments = 8;
    int depth_J = 4;
    WaveletBoundary boundary = WaveletBoundary::periodic;

    int filter_length() const { return 2 * vanishing_moments; }
};

/// The embedded 16-tap least-asymmetric scaling filter (sum = sqrt(2),
/// even-shift orthonormal).
const std::vector<double>& la16_scaling_filter();
/// Quadrature-mirror wavelet filter g_k = (-1)^k h_{L-1-k}.
const std::vector<double>& la16_wavelet_filter();

/// One decimated analysis step: circular convolution with the time-reversed
/// filters and downsampling by two. Exposed for the matrix-oracle tests.
void dwt_step(const std::vector<double>& x, std::vector<double>& approx,
              std::vector<double>& detail);
/// Inverse of dwt_step (adjoint of the orthogonal analysis operator).
std::vector<double> idwt_step(const std::vector<double>& approx,
                              const std::vector<double>& detail);

/// Pyramid-algorithm multiresolution analysis: components D1..DJ (finest to
/// coarsest detail), trend = smooth SJ. Decimated transform; requires the
/// length to be divisible by 2^J. Reflection boundary extends the series to
/// its reflection before transforming and truncates after.
Decomposition dwt_mra(const TimeSeries& series, const WaveletSpec& spec);

/// Maximal-overlap (undecimated) variant of the same analysis; handles any
/// length >= filter length with exact additive reconstruction.
Decomposition modwt_mra(const TimeSeries& series, const WaveletSpec& spec);

/// Cumulative trend levels: level k = SJ + sum of the k coarsest details.
/// Level 0 is the smooth alone; level J reproduces the source.
std::vector<std::vector<double>> mra_levels(const Decomposition& decomp);

struct EmdSpec {
    int max_imfs = 10;
    double sift_threshold = 0.2;  // Cauchy SD criterion
    int max_sifts = 50;
};

/// Empirical mode decomposition with natural cubic-spline envelopes and
/// mirrored boundary extrema. Components are the IMFs; trend is the residue.
Decomposition emd(const TimeSeries& series, const EmdSpec& spec);

struct EhpSpec {
    int draws = 10000;  // total iterations; draws - burn_in are retained
    int burn_in = 1000;
    RngSeed seed;
    // Inverse-gamma (shape, scale) priors; non-positive scale means
    // "scale-aware default" (2 * Var(d2 y) for the trend, 2 * Var(y) for the
    // cycle).
    double trend_prior_shape = 3.0;
    double trend_prior_scale = -1.0;
    double cycle_prior_shape = 3.0;
    double cycle_prior_scale = -1.0;
};

struct EhpResult {
    Decomposition mean_trend;       // posterior mean of the trend draws
    Decomposition last_draw_trend;  // final retained draw
    /// Trend value at the series midpoint per retained iteration (convergence
    /// diagnostics).
    std::vector<double> draw_log;
    double post_mean_trend_var = 0.0;  // posterior mean of sigma_tau^2
    double post_mean_cycle_var = 0.0;  // posterior mean of sigma_c^2
};

/// Hodrick-Prescott filter as an unobserved-components model
/// y_t = tau_t + c_t, d2 tau ~ N(0, s_tau^2), c ~ N(0, s_c^2), estimated by
/// Gibbs sampling of the trend vector and the two variances.
EhpResult ehp(const TimeSeries& series, const EhpSpec& spec);

/// Deterministic HP trend (I + lambda D'D)^{-1} y; the cross-check target for
/// the Gibbs sampler at lambda = s_c^2 / s_tau^2.
std::vector<double> hp_filter(const std::vector<double>& y, double lambda);

}  // namespace aroptk::filters
