#pragma once

#include <map>
#include <string>
#include <vector>

#include "aroptk/core.hpp"

namespace aroptk::unitroot {

enum class Family { ADF, ERS, KPSS, PP };
enum class Deterministic { none, drift, drift_and_trend };
enum class KpssSpec { level, trend };
enum class Bandwidth { short_lags, long_lags };
enum class PpForm { Z_alpha, Z_t };
enum class Verdict { stationary, non_stationary };

std::string to_string(Family f);
std::string to_string(Verdict v);

/// The three standard significance levels of the verdict grid.
inline const std::vector<double>& significance_levels() {
    static const std::vector<double> levels = {0.01, 0.05, 0.10};
    return levels;
}

struct TestRow {
    Family family = Family::ADF;
    std::string variation;                    // row label in the verdict grid
    double statistic = 0.0;
    std::map<double, double> critical_values;  // level -> cv
    std::map<double, Verdict> verdict;         // level -> verdict
    int lags_used = 0;
    std::vector<double> coefficients;          // nuisance regression estimates
};

struct TestReport {
    std::vector<TestRow> rows;
    int sample_size = 0;

    int non_stationary_cells() const;
    int total_cells() const;
};

/// Schwert's rule: floor(12 * (n/100)^(1/4)), the default maximum lag for
/// AIC selection.
int schwert_max_lag(int n);
/// Bartlett bandwidth floor(c * (n/100)^(1/4)) with c = 4 (short) or 12 (long).
int bartlett_bandwidth(int n, Bandwidth bw);

/// Augmented Dickey-Fuller t-test. lags < 0 selects the lag order by AIC up
/// to the Schwert maximum.
TestRow adf(const TimeSeries& series, Deterministic det, int lags = -1);

/// Elliott-Rothenberg-Stock DF-GLS t-test; detrend = false demeans only
/// (alpha-bar = 1 - 7/T), detrend = true removes a linear trend
/// (alpha-bar = 1 - 13.5/T). lags < 0 selects by AIC.
TestRow ers_dfgls(const TimeSeries& series, bool detrend, int lags = 0);

/// ERS feasible point-optimal P-test on the GLS-detrended series
/// (constant + trend). ar_longrun_variance = true uses the AR-spectral
/// long-run variance; false uses the plain residual variance.
TestRow ers_ptest(const TimeSeries& series, bool ar_longrun_variance);

/// KPSS stationarity test (null = stationary; rejects for large statistics).
/// l_override >= 0 fixes the Bartlett bandwidth, otherwise bw applies.
TestRow kpss(const TimeSeries& series, KpssSpec spec, Bandwidth bw,
             int l_override = -1);

/// Phillips-Perron Z(alpha) / Z(t) on the drift-and-trend regression.
TestRow pp(const TimeSeries& series, PpForm form, Bandwidth bw, int l_override = -1);

/// The full 17-variant grid at the three significance levels.
TestReport battery(const TimeSeries& series);

}  // namespace aroptk::unitroot
