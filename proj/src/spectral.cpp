#include "aroptk/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "aroptk/mathutil.hpp"

namespace aroptk::spectral {

namespace {

// Direct DFT of a demeaned segment; fine at annual-series lengths.
std::vector<PeriodogramEntry> periodogram_values(const std::vector<double>& seg) {
    const std::size_t n = seg.size();
    double m = mean(seg);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = seg[t] - m;

    std::vector<PeriodogramEntry> out;
    const std::size_t kmax = n / 2;
    out.reserve(kmax);
    for (std::size_t k = 1; k <= kmax; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            double ang = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(t) /
                         static_cast<double>(n);
            re += x[t] * std::cos(ang);
            im += x[t] * std::sin(ang);
        }
        double p = (re * re + im * im) / static_cast<double>(n);
        bool nyquist = (n % 2 == 0) && (k == kmax);
        if (!nyquist) p *= 2.0;  // fold in the conjugate frequency
        out.push_back({static_cast<double>(n) / static_cast<double>(k), p});
    }
    // Descending power, ties toward the longer period.
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.power != b.power) return a.power > b.power;
        return a.period > b.period;
    });
    return out;
}

}  // namespace

std::vector<PeriodogramEntry> periodogram(const TimeSeries& series) {
    require_finite(series);
    if (series.size() < 4) throw DataError("periodogram: need at least 4 observations");
    return periodogram_values(series.values);
}

bool no_seasonality(const std::vector<PeriodogramEntry>& entries) {
    for (const auto& e : entries) {
        if (e.power > 1e-14) return false;
    }
    return true;
}

SeasonalityTable subperiod_seasonality(const TimeSeries& series, int window_years) {
    require_finite(series);
    if (window_years < 4) throw DataError("subperiod_seasonality: window must be >= 4 years");
    const int n = static_cast<int>(series.size());
    if (n < window_years + 1) throw DataError("subperiod_seasonality: window longer than series");

    SeasonalityTable table;
    for (int start = 0; start < n - 1; start += window_years) {
        int span = std::min(window_years + 1, n - start);
        if (span < 4) break;  // tail too short for a periodogram
        std::vector<double> seg(series.values.begin() + start,
                                series.values.begin() + start + span);
        auto entries = periodogram_values(seg);
        SeasonalityRow row;
        row.start_year = series.start_year + start;
        row.end_year = series.start_year + start + span - 1;
        row.primary_period = static_cast<int>(std::llround(entries[0].period));
        row.primary_power = entries[0].power;
        if (entries.size() > 1) {
            row.secondary_period = static_cast<int>(std::llround(entries[1].period));
            row.secondary_power = entries[1].power;
            if (row.secondary_period == row.primary_period && entries.size() > 2) {
                // Integer rounding collision; take the next distinct period.
                for (std::size_t i = 2; i < entries.size(); ++i) {
                    int p = static_cast<int>(std::llround(entries[i].period));
                    if (p != row.primary_period) {
                        row.secondary_period = p;
                        row.secondary_power = entries[i].power;
                        break;
                    }
                }
            }
        }
        table.rows.push_back(row);
    }
    return table;
}

Stft stft(const TimeSeries& series, int window, int overlap, Taper taper) {
    require_finite(series);
    const int n = static_cast<int>(series.size());
    if (window < 4 || window > n || overlap < 0 || overlap >= window)
        throw DataError("stft: invalid window/overlap");
    const int hop = window - overlap;

    Stft result;
    result.window = window;
    for (int k = 1; k <= window / 2; ++k)
        result.periods.push_back(static_cast<double>(window) / static_cast<double>(k));
    result.power.assign(result.periods.size(), {});

    for (int start = 0; start + window <= n; start += hop) {
        std::vector<double> seg(series.values.begin() + start,
                                series.values.begin() + start + window);
        double m = mean(seg);
        for (double& v : seg) v -= m;
        if (taper == Taper::hann) {
            for (int t = 0; t < window; ++t)
                seg[static_cast<std::size_t>(t)] *=
                    0.5 * (1.0 - std::cos(2.0 * M_PI * t / (window - 1)));
        }
        auto entries = periodogram_values(seg);
        // periodogram_values sorts by power; re-index by period.
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.period > b.period; });
        for (std::size_t k = 0; k < entries.size(); ++k)
            result.power[k].push_back(entries[k].power);
        result.column_start.push_back(start);
    }
    return result;
}

SeasonalPattern additivity_verdict(const SeasonalityTable& table) {
    const std::size_t m = table.rows.size();
    if (m < 2) throw DataError("additivity_verdict: need at least 2 rows");
    std::vector<double> amp(m);
    for (std::size_t i = 0; i < m; ++i) amp[i] = std::sqrt(std::max(0.0, table.rows[i].primary_power));
    if (m == 2) {
        // No degrees of freedom for a t-test; only a steep doubling counts.
        return amp[1] > 2.0 * amp[0] ? SeasonalPattern::multiplicative
                                     : SeasonalPattern::additive;
    }
    double xbar = static_cast<double>(m - 1) / 2.0;
    double ybar = mean(amp);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double dx = static_cast<double>(i) - xbar;
        sxy += dx * (amp[i] - ybar);
        sxx += dx * dx;
    }
    double slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double fit = ybar + slope * (static_cast<double>(i) - xbar);
        rss += (amp[i] - fit) * (amp[i] - fit);
    }
    double df = static_cast<double>(m - 2);
    double se = std::sqrt(rss / df / sxx);
    if (se == 0.0) return slope > 0.0 ? SeasonalPattern::multiplicative : SeasonalPattern::additive;
    double t = slope / se;
    double p_one_sided = 1.0 - num::student_t_cdf(t, df);
    return p_one_sided < 0.05 ? SeasonalPattern::multiplicative : SeasonalPattern::additive;
}

}  // namespace aroptk::spectral
