#include "aroptk/unitroot.hpp"

#include <algorithm>
#include <cmath>

#include "aroptk/mathutil.hpp"

namespace aroptk::unitroot {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// MacKinnon (2010) response surfaces: cv = b0 + b1/T + b2/T^2 + b3/T^3,
// rows 1% / 5% / 10%.
constexpr double kTauNc[3][4] = {
    {-2.56574, -2.2358, -3.627, 0.0},
    {-1.94100, -0.2686, -3.365, 31.223},
    {-1.61682, 0.2656, -2.714, 25.364},
};
constexpr double kTauC[3][4] = {
    {-3.43035, -6.5393, -16.786, -79.433},
    {-2.86154, -2.8903, -4.234, -40.040},
    {-2.56677, -1.5384, -2.809, 0.0},
};
constexpr double kTauCt[3][4] = {
    {-3.95877, -9.0531, -28.428, -134.155},
    {-3.41049, -4.3904, -9.036, -45.374},
    {-3.12705, -2.5856, -3.925, -22.380},
};

double response_surface(const double (&row)[4], double T) {
    return row[0] + row[1] / T + row[2] / (T * T) + row[3] / (T * T * T);
}

std::map<double, double> dickey_fuller_cvs(Deterministic det, int effective_n) {
    const double T = static_cast<double>(effective_n);
    const auto& table = det == Deterministic::none
                            ? kTauNc
                            : (det == Deterministic::drift ? kTauC : kTauCt);
    return {{0.01, response_surface(table[0], T)},
            {0.05, response_surface(table[1], T)},
            {0.10, response_surface(table[2], T)}};
}

// Elliott-Rothenberg-Stock (1996) Table I, interpolated in sample size.
const std::vector<double> kErsT = {50.0, 100.0, 200.0, 1e9};
const std::map<double, std::vector<double>> kDfGlsTrendCv = {
    {0.01, {-3.77, -3.58, -3.46, -3.48}},
    {0.05, {-3.19, -3.03, -2.93, -2.89}},
    {0.10, {-2.89, -2.74, -2.64, -2.57}},
};
const std::map<double, std::vector<double>> kPtestTrendCv = {
    {0.01, {4.22, 4.26, 4.05, 3.96}},
    {0.05, {5.72, 5.64, 5.66, 5.62}},
    {0.10, {6.77, 6.79, 6.86, 6.89}},
};

// Kwiatkowski et al. (1992) Table 1.
const std::map<double, double> kKpssLevelCv = {{0.01, 0.739}, {0.05, 0.463}, {0.10, 0.347}};
const std::map<double, double> kKpssTrendCv = {{0.01, 0.216}, {0.05, 0.146}, {0.10, 0.119}};

// Fuller (1976) Table 8.5.1: percentiles of n(rho - 1), trend regression.
const std::vector<double> kFullerT = {25.0, 50.0, 100.0, 250.0, 500.0, 1e9};
const std::map<double, std::vector<double>> kZAlphaTrendCv = {
    {0.01, {-22.5, -25.7, -27.4, -28.4, -28.9, -29.5}},
    {0.05, {-17.9, -19.8, -20.7, -21.3, -21.5, -21.8}},
    {0.10, {-15.6, -16.8, -17.5, -18.0, -18.1, -18.3}},
};

std::map<double, double> interpolated_cvs(const std::map<double, std::vector<double>>& table,
                                          const std::vector<double>& grid, double T) {
    std::map<double, double> out;
    for (const auto& [level, ys] : table) out[level] = num::interp_clamped(grid, ys, T);
    return out;
}

// Left-tailed verdicts: reject the unit root (stationary) when the statistic
// is below the critical value.
void left_tailed_verdicts(TestRow& row) {
    for (const auto& [level, cv] : row.critical_values)
        row.verdict[level] = row.statistic < cv ? Verdict::stationary : Verdict::non_stationary;
}

// KPSS: the null is stationarity, rejected when the statistic is large.
void kpss_verdicts(TestRow& row) {
    for (const auto& [level, cv] : row.critical_values)
        row.verdict[level] = row.statistic > cv ? Verdict::non_stationary : Verdict::stationary;
}

struct AdfRegression {
    num::OlsFit fit;
    int rho_index = 0;     // column of the lagged level
    int effective_n = 0;   // observations entering the regression
    double rho = 0.0;      // coefficient on the lagged level
    double t_rho = 0.0;
    double se_rho = 0.0;
};

// Regression of dy_t on y_{t-1}, k lagged differences and deterministics.
AdfRegression adf_regression(const std::vector<double>& y, Deterministic det, int k) {
    const int n = static_cast<int>(y.size());
    const int rows = n - 1 - k;
    int cols = 1 + k;
    if (det != Deterministic::none) ++cols;
    if (det == Deterministic::drift_and_trend) ++cols;
    if (rows < cols + 2) throw DataError("adf: too few observations");

    MatrixXd X(rows, cols);
    VectorXd dy(rows);
    for (int i = 0; i < rows; ++i) {
        int t = k + 1 + i;
        dy(i) = y[t] - y[t - 1];
        int c = 0;
        X(i, c++) = y[t - 1];
        for (int j = 1; j <= k; ++j) X(i, c++) = y[t - j] - y[t - j - 1];
        if (det != Deterministic::none) X(i, c++) = 1.0;
        if (det == Deterministic::drift_and_trend) X(i, c++) = static_cast<double>(t);
    }

    AdfRegression reg;
    reg.fit = num::ols(X, dy);
    reg.rho_index = 0;
    reg.effective_n = rows;
    reg.rho = reg.fit.coef(0);
    reg.se_rho = reg.fit.se(0);
    reg.t_rho = reg.rho / reg.se_rho;
    return reg;
}

double regression_aic(const num::OlsFit& fit, int n_obs, int n_params) {
    return static_cast<double>(n_obs) * std::log(fit.rss / static_cast<double>(n_obs)) +
           2.0 * static_cast<double>(n_params);
}

int select_adf_lags(const std::vector<double>& y, Deterministic det, int max_lag) {
    // Common estimation sample across candidate lag orders.
    const int n = static_cast<int>(y.size());
    int best_k = 0;
    double best_aic = 0.0;
    bool first = true;
    for (int k = 0; k <= max_lag; ++k) {
        const int rows = n - 1 - max_lag;
        int cols = 1 + k;
        if (det != Deterministic::none) ++cols;
        if (det == Deterministic::drift_and_trend) ++cols;
        if (rows < cols + 2) break;
        MatrixXd X(rows, cols);
        VectorXd dy(rows);
        for (int i = 0; i < rows; ++i) {
            int t = max_lag + 1 + i;
            dy(i) = y[t] - y[t - 1];
            int c = 0;
            X(i, c++) = y[t - 1];
            for (int j = 1; j <= k; ++j) X(i, c++) = y[t - j] - y[t - j - 1];
            if (det != Deterministic::none) X(i, c++) = 1.0;
            if (det == Deterministic::drift_and_trend) X(i, c++) = static_cast<double>(t);
        }
        double aic = regression_aic(num::ols(X, dy), rows, cols);
        if (first || aic < best_aic) {
            best_aic = aic;
            best_k = k;
            first = false;
        }
    }
    return best_k;
}

// GLS demeaning/detrending with quasi-difference parameter abar.
std::vector<double> gls_detrend(const std::vector<double>& y, bool detrend, double abar) {
    const int n = static_cast<int>(y.size());
    const int cols = detrend ? 2 : 1;
    MatrixXd Z(n, cols);
    VectorXd z(n);
    z(0) = y[0];
    Z(0, 0) = 1.0;
    if (detrend) Z(0, 1) = 1.0;
    for (int t = 1; t < n; ++t) {
        z(t) = y[t] - abar * y[t - 1];
        Z(t, 0) = 1.0 - abar;
        if (detrend) Z(t, 1) = static_cast<double>(t + 1) - abar * static_cast<double>(t);
    }
    VectorXd beta = (Z.transpose() * Z).ldlt().solve(Z.transpose() * z);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        double det_part = beta(0);
        if (detrend) det_part += beta(1) * static_cast<double>(t + 1);
        out[static_cast<std::size_t>(t)] = y[static_cast<std::size_t>(t)] - det_part;
    }
    return out;
}

double bartlett_longrun_variance(const VectorXd& e, int l) {
    const double T = static_cast<double>(e.size());
    double gamma0 = e.squaredNorm() / T;
    double lrv = gamma0;
    for (int j = 1; j <= l; ++j) {
        double gj = 0.0;
        for (int t = j; t < e.size(); ++t) gj += e(t) * e(t - j);
        gj /= T;
        double w = 1.0 - static_cast<double>(j) / (static_cast<double>(l) + 1.0);
        lrv += 2.0 * w * gj;
    }
    return lrv;
}

}  // namespace

std::string to_string(Family f) {
    switch (f) {
        case Family::ADF: return "ADF";
        case Family::ERS: return "ERS";
        case Family::KPSS: return "KPSS";
        case Family::PP: return "PP";
    }
    return "?";
}

std::string to_string(Verdict v) {
    return v == Verdict::stationary ? "stationary" : "non_stationary";
}

int TestReport::non_stationary_cells() const {
    int c = 0;
    for (const auto& row : rows)
        for (const auto& [level, v] : row.verdict)
            if (v == Verdict::non_stationary) ++c;
    return c;
}

int TestReport::total_cells() const {
    int c = 0;
    for (const auto& row : rows) c += static_cast<int>(row.verdict.size());
    return c;
}

int schwert_max_lag(int n) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

int bartlett_bandwidth(int n, Bandwidth bw) {
    double c = bw == Bandwidth::short_lags ? 4.0 : 12.0;
    return static_cast<int>(std::floor(c * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

TestRow adf(const TimeSeries& series, Deterministic det, int lags) {
    require_finite(series);
    const std::vector<double>& y = series.values;
    const int n = static_cast<int>(y.size());
    int k = lags;
    if (k < 0) k = select_adf_lags(y, det, schwert_max_lag(n));
    AdfRegression reg = adf_regression(y, det, k);

    TestRow row;
    row.family = Family::ADF;
    switch (det) {
        case Deterministic::none: row.variation = "No Drift or Deterministic Trend"; break;
        case Deterministic::drift: row.variation = "Drift but No Deterministic Trend"; break;
        case Deterministic::drift_and_trend: row.variation = "Drift and Deterministic Trend"; break;
    }
    row.statistic = reg.t_rho;
    row.lags_used = k;
    row.critical_values = dickey_fuller_cvs(det, reg.effective_n);
    row.coefficients.assign(reg.fit.coef.data(), reg.fit.coef.data() + reg.fit.coef.size());
    left_tailed_verdicts(row);
    return row;
}

TestRow ers_dfgls(const TimeSeries& series, bool detrend, int lags) {
    require_finite(series);
    const int n = static_cast<int>(series.size());
    if (n < 20) throw DataError("ers: need at least 20 observations");
    const double T = static_cast<double>(n);
    const double abar = detrend ? 1.0 - 13.5 / T : 1.0 - 7.0 / T;
    std::vector<double> yd = gls_detrend(series.values, detrend, abar);

    int k = lags;
    if (k < 0) k = select_adf_lags(yd, Deterministic::none, schwert_max_lag(n));
    AdfRegression reg = adf_regression(yd, Deterministic::none, k);

    TestRow row;
    row.family = Family::ERS;
    row.statistic = reg.t_rho;
    row.lags_used = k;
    row.coefficients.assign(reg.fit.coef.data(), reg.fit.coef.data() + reg.fit.coef.size());
    if (detrend) {
        row.critical_values = interpolated_cvs(kDfGlsTrendCv, kErsT, T);
    } else {
        // Demeaned DF-GLS shares the no-deterministics Dickey-Fuller law.
        row.critical_values = dickey_fuller_cvs(Deterministic::none, reg.effective_n);
    }
    left_tailed_verdicts(row);
    return row;
}

TestRow ers_ptest(const TimeSeries& series, bool ar_longrun_variance) {
    require_finite(series);
    const int n = static_cast<int>(series.size());
    if (n < 20) throw DataError("ers: need at least 20 observations");
    const double T = static_cast<double>(n);
    const double abar = 1.0 - 13.5 / T;

    // SSR of the GLS regression at a given quasi-difference parameter.
    auto ssr_at = [&](double a) {
        const std::vector<double>& y = series.values;
        MatrixXd Z(n, 2);
        VectorXd z(n);
        z(0) = y[0];
        Z(0, 0) = 1.0;
        Z(0, 1) = 1.0;
        for (int t = 1; t < n; ++t) {
            z(t) = y[static_cast<std::size_t>(t)] - a * y[static_cast<std::size_t>(t - 1)];
            Z(t, 0) = 1.0 - a;
            Z(t, 1) = static_cast<double>(t + 1) - a * static_cast<double>(t);
        }
        VectorXd beta = (Z.transpose() * Z).ldlt().solve(Z.transpose() * z);
        return (z - Z * beta).squaredNorm();
    };

    double s_abar = ssr_at(abar);
    double s_one = ssr_at(1.0);

    // Long-run variance from the GLS-detrended series.
    std::vector<double> yd = gls_detrend(series.values, true, abar);
    double omega2 = 0.0;
    int lags_used = 0;
    if (ar_longrun_variance) {
        int k = select_adf_lags(yd, Deterministic::none, schwert_max_lag(n));
        if (k == 0) k = 1;  // the autocorrelation-corrected variant keeps >= 1 lag
        AdfRegression reg = adf_regression(yd, Deterministic::none, k);
        double sum_gamma = 0.0;
        for (int j = 1; j <= k; ++j) sum_gamma += reg.fit.coef(j);
        double denom = (1.0 - sum_gamma) * (1.0 - sum_gamma);
        omega2 = reg.fit.sigma2 / denom;
        lags_used = k;
    } else {
        std::vector<double> dyd(yd.size() - 1);
        for (std::size_t t = 1; t < yd.size(); ++t) dyd[t - 1] = yd[t] - yd[t - 1];
        omega2 = 0.0;
        for (double v : dyd) omega2 += v * v;
        omega2 /= static_cast<double>(dyd.size());
    }
    if (!(omega2 > 0.0)) throw NumericError("ers: degenerate long-run variance");

    TestRow row;
    row.family = Family::ERS;
    row.statistic = (s_abar - abar * s_one) / omega2;
    row.lags_used = lags_used;
    row.critical_values = interpolated_cvs(kPtestTrendCv, kErsT, T);
    // The point-optimal test rejects the unit root for small statistics.
    left_tailed_verdicts(row);
    return row;
}

TestRow kpss(const TimeSeries& series, KpssSpec spec, Bandwidth bw, int l_override) {
    require_finite(series);
    const int n = static_cast<int>(series.size());
    if (n < 10) throw DataError("kpss: need at least 10 observations");

    const int cols = spec == KpssSpec::trend ? 2 : 1;
    MatrixXd X(n, cols);
    VectorXd y = Eigen::Map<const VectorXd>(series.values.data(), n);
    for (int t = 0; t < n; ++t) {
        X(t, 0) = 1.0;
        if (cols == 2) X(t, 1) = static_cast<double>(t + 1);
    }
    VectorXd beta = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    VectorXd e = y - X * beta;
    double s2_raw = e.squaredNorm() / static_cast<double>(n);
    if (s2_raw <= 1e-20 * (y.squaredNorm() / static_cast<double>(n) + 1e-300))
        throw DataError("kpss: degenerate regression (zero residual variance)");

    const int l = l_override >= 0 ? l_override : bartlett_bandwidth(n, bw);
    double s2l = bartlett_longrun_variance(e, l);

    double cumulative = 0.0;
    double num_sum = 0.0;
    for (int t = 0; t < n; ++t) {
        cumulative += e(t);
        num_sum += cumulative * cumulative;
    }
    double eta = num_sum / (static_cast<double>(n) * static_cast<double>(n) * s2l);

    TestRow row;
    row.family = Family::KPSS;
    row.statistic = eta;
    row.lags_used = l;
    row.coefficients.assign(beta.data(), beta.data() + beta.size());
    row.critical_values = spec == KpssSpec::level ? kKpssLevelCv : kKpssTrendCv;
    kpss_verdicts(row);
    return row;
}

TestRow pp(const TimeSeries& series, PpForm form, Bandwidth bw, int l_override) {
    require_finite(series);
    const std::vector<double>& y = series.values;
    const int n = static_cast<int>(y.size());
    if (n < 10) throw DataError("pp: need at least 10 observations");

    // Levels regression y_t = mu + beta t + rho y_{t-1} + e_t.
    const int rows = n - 1;
    MatrixXd X(rows, 3);
    VectorXd yy(rows);
    for (int i = 0; i < rows; ++i) {
        int t = i + 1;
        yy(i) = y[static_cast<std::size_t>(t)];
        X(i, 0) = y[static_cast<std::size_t>(t - 1)];
        X(i, 1) = 1.0;
        X(i, 2) = static_cast<double>(t);
    }
    num::OlsFit fit = num::ols(X, yy);
    const double rho = fit.coef(0);
    const double se_rho = fit.se(0);
    const double t_rho = (rho - 1.0) / se_rho;
    const double Tn = static_cast<double>(rows);
    const double s2 = fit.sigma2;

    const int l = l_override >= 0 ? l_override : bartlett_bandwidth(n, bw);
    const double gamma0 = fit.residuals.squaredNorm() / Tn;
    const double lambda2 = bartlett_longrun_variance(fit.residuals, l);

    TestRow row;
    row.family = Family::PP;
    row.lags_used = l;
    row.coefficients.assign(fit.coef.data(), fit.coef.data() + fit.coef.size());
    if (form == PpForm::Z_t) {
        row.statistic = std::sqrt(gamma0 / lambda2) * t_rho -
                        (lambda2 - gamma0) / (2.0 * std::sqrt(lambda2)) *
                            (Tn * se_rho / std::sqrt(s2));
        row.critical_values = dickey_fuller_cvs(Deterministic::drift_and_trend, rows);
    } else {
        row.statistic = Tn * (rho - 1.0) -
                        0.5 * (lambda2 - gamma0) * (Tn * Tn * se_rho * se_rho / s2);
        row.critical_values = interpolated_cvs(kZAlphaTrendCv, kFullerT, Tn);
    }
    left_tailed_verdicts(row);
    return row;
}

TestReport battery(const TimeSeries& series) {
    require_finite(series);
    if (series.size() < 20) throw DataError("battery: need at least 20 observations");

    TestReport report;
    report.sample_size = static_cast<int>(series.size());
    auto add = [&](TestRow row, const std::string& label) {
        row.variation = label;
        report.rows.push_back(std::move(row));
    };

    report.rows.push_back(adf(series, Deterministic::none));
    report.rows.push_back(adf(series, Deterministic::drift));
    report.rows.push_back(adf(series, Deterministic::drift_and_trend));

    add(ers_dfgls(series, false, 0), "Constant Mean");
    add(ers_dfgls(series, true, 0), "Linear Trend");
    add(ers_ptest(series, false), "Constant Mean and Linear Trend");
    add(ers_dfgls(series, false, -1), "Constant Mean Influenced by Residual Auto-correlation");
    add(ers_dfgls(series, true, -1), "Linear Trend Influenced by Residual Auto-correlation");
    add(ers_ptest(series, true),
        "Constant Mean and Linear Trend Influenced by Residual Autocorrelation");

    add(kpss(series, KpssSpec::level, Bandwidth::short_lags), "Short Lags around a Random Walk");
    add(kpss(series, KpssSpec::trend, Bandwidth::short_lags),
        "Short Lags around a Deterministic Trend");
    add(kpss(series, KpssSpec::level, Bandwidth::long_lags), "Long Lags around a Random Walk");
    add(kpss(series, KpssSpec::trend, Bandwidth::long_lags),
        "Long Lags around a Deterministic Trend");

    add(pp(series, PpForm::Z_alpha, Bandwidth::short_lags), "Short Lags with Z(alpha)");
    add(pp(series, PpForm::Z_t, Bandwidth::short_lags), "Short Lags with Z(t)");
    add(pp(series, PpForm::Z_alpha, Bandwidth::long_lags), "Long Lags with Z(alpha)");
    add(pp(series, PpForm::Z_t, Bandwidth::long_lags), "Long Lags with Z(t)");

    return report;
}

}  // namespace aroptk::unitroot
