#include <algorithm>
#include <cmath>
#include <string>

#include "aroptk/filters.hpp"

namespace aroptk::filters {

namespace {

// Natural cubic spline through (xs, ys), evaluated on the integer grid
// 0..n-1. xs strictly increasing.
std::vector<double> natural_spline(const std::vector<double>& xs,
                                   const std::vector<double>& ys, std::size_t n) {
    const std::size_t m = xs.size();
    if (m < 2) throw NumericError("spline: need at least 2 anchors");
    if (m == 2) {
        std::vector<double> out(n);
        double slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        for (std::size_t t = 0; t < n; ++t)
            out[t] = ys[0] + slope * (static_cast<double>(t) - xs[0]);
        return out;
    }
    // Second derivatives via the standard tridiagonal system.
    std::vector<double> h(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) h[i] = xs[i + 1] - xs[i];
    std::vector<double> a(m, 0.0), b(m, 0.0), c(m, 0.0), r(m, 0.0);
    b[0] = 1.0;
    b[m - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        a[i] = h[i - 1];
        b[i] = 2.0 * (h[i - 1] + h[i]);
        c[i] = h[i];
        r[i] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
    }
    // Thomas algorithm.
    std::vector<double> cp(m, 0.0), rp(m, 0.0);
    cp[0] = c[0] / b[0];
    rp[0] = r[0] / b[0];
    for (std::size_t i = 1; i < m; ++i) {
        double denom = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / denom;
        rp[i] = (r[i] - a[i] * rp[i - 1]) / denom;
    }
    std::vector<double> M(m);
    M[m - 1] = rp[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) M[i] = rp[i] - cp[i] * M[i + 1];

    std::vector<double> out(n);
    std::size_t seg = 0;
    for (std::size_t t = 0; t < n; ++t) {
        double x = static_cast<double>(t);
        while (seg + 2 < m && x > xs[seg + 1]) ++seg;
        double hx = h[seg];
        double A = (xs[seg + 1] - x) / hx;
        double B = (x - xs[seg]) / hx;
        out[t] = A * ys[seg] + B * ys[seg + 1] +
                 ((A * A * A - A) * M[seg] + (B * B * B - B) * M[seg + 1]) * hx * hx / 6.0;
    }
    return out;
}

struct Extrema {
    std::vector<std::size_t> maxima;
    std::vector<std::size_t> minima;
};

Extrema find_extrema(const std::vector<double>& x) {
    Extrema e;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (x[i] > x[i - 1] && x[i] >= x[i + 1]) e.maxima.push_back(i);
        if (x[i] < x[i - 1] && x[i] <= x[i + 1]) e.minima.push_back(i);
    }
    return e;
}

// Spline envelope through the extrema with two reflected anchor points per
// end (mirrored across the series boundaries).
std::vector<double> envelope(const std::vector<double>& x,
                             const std::vector<std::size_t>& idx) {
    const std::size_t n = x.size();
    std::vector<double> xs, ys;
    std::size_t nmir = std::min<std::size_t>(2, idx.size());
    for (std::size_t k = nmir; k-- > 0;) {
        xs.push_back(-static_cast<double>(idx[k]));
        ys.push_back(x[idx[k]]);
    }
    for (std::size_t i : idx) {
        xs.push_back(static_cast<double>(i));
        ys.push_back(x[i]);
    }
    double right = 2.0 * static_cast<double>(n - 1);
    for (std::size_t k = 0; k < nmir; ++k) {
        std::size_t i = idx[idx.size() - 1 - k];
        xs.push_back(right - static_cast<double>(i));
        ys.push_back(x[i]);
    }
    return natural_spline(xs, ys, n);
}

}  // namespace

Decomposition emd(const TimeSeries& series, const EmdSpec& spec) {
    require_finite(series);
    if (series.size() < 4) throw DataError("emd: need at least 4 observations");
    if (spec.sift_threshold <= 0.0 || spec.max_sifts < 1 || spec.max_imfs < 0)
        throw DataError("emd: invalid spec");

    const std::size_t n = series.size();
    Decomposition out;
    out.source = series;
    out.filter_tag = FilterTag::EMD;

    std::vector<double> residue = series.values;
    for (int imf_index = 1; imf_index <= spec.max_imfs; ++imf_index) {
        Extrema e = find_extrema(residue);
        if (e.maxima.size() < 2 || e.minima.size() < 2) break;

        std::vector<double> h = residue;
        for (int sift = 0; sift < spec.max_sifts; ++sift) {
            Extrema eh = find_extrema(h);
            if (eh.maxima.size() < 2 || eh.minima.size() < 2) break;
            std::vector<double> upper = envelope(h, eh.maxima);
            std::vector<double> lower = envelope(h, eh.minima);
            std::vector<double> next(n);
            double sd = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                double local_mean = 0.5 * (upper[t] + lower[t]);
                next[t] = h[t] - local_mean;
                double denom = h[t] * h[t] + 1e-12;
                sd += local_mean * local_mean / denom;
            }
            h = std::move(next);
            if (sd < spec.sift_threshold) break;
        }

        for (std::size_t t = 0; t < n; ++t) residue[t] -= h[t];
        out.components.push_back({"IMF" + std::to_string(imf_index), std::move(h)});
    }

    out.trend = std::move(residue);
    return out;
}

}  // namespace aroptk::filters
