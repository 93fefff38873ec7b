#pragma once

#include <vector>

#include "aroptk/core.hpp"

namespace aroptk::spectral {

struct PeriodogramEntry {
    double period = 0.0;   // in years, n / k
    double power = 0.0;    // >= 0
};

/// Plain (rectangular) periodogram of the demeaned series at Fourier
/// frequencies k/n, k = 1..floor(n/2), sorted by descending power. Powers
/// satisfy Parseval: sum(power) = sum((x - mean)^2). Ties in power rank the
/// longer period first.
std::vector<PeriodogramEntry> periodogram(const TimeSeries& series);

/// True when every power is (numerically) zero, i.e. a constant series.
bool no_seasonality(const std::vector<PeriodogramEntry>& entries);

struct SeasonalityRow {
    int start_year = 0;
    int end_year = 0;
    int primary_period = 0;
    int secondary_period = 0;
    double primary_power = 0.0;
    double secondary_power = 0.0;
};

struct SeasonalityTable {
    std::vector<SeasonalityRow> rows;
};

/// Splits the series into consecutive spans of window_years (window_years + 1
/// observations, adjacent spans sharing their boundary point), the last span
/// possibly shorter, and reports the top-2 periodogram periods per span.
SeasonalityTable subperiod_seasonality(const TimeSeries& series, int window_years);

enum class Taper { rectangular, hann };

struct Stft {
    /// power(k, c): power at Fourier index k+1 (period window/(k+1)) in hop c.
    std::vector<std::vector<double>> power;  // [frequency][column]
    std::vector<double> periods;             // per frequency row
    std::vector<int> column_start;           // sample offset per column
    int window = 0;
};

/// Short-time periodogram with hop = window - overlap. Each segment is
/// demeaned, tapered, and transformed; the rectangular taper with
/// window = length reduces to the plain periodogram.
Stft stft(const TimeSeries& series, int window, int overlap, Taper taper = Taper::hann);

enum class SeasonalPattern { additive, multiplicative };

/// One-sided t-test on the OLS slope of per-window peak amplitude
/// (sqrt of peak power) against window index: multiplicative iff the slope is
/// significantly positive at the 5% level.
SeasonalPattern additivity_verdict(const SeasonalityTable& table);

}  // namespace aroptk::spectral
