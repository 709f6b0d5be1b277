#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace housing {

inline double mean_of(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (const double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Sample standard deviation (n-1 denominator); 0 for fewer than two points.
inline double stddev_of(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (const double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

/// Median; even counts average the two central order statistics.
inline double median_of(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    const std::size_t n = xs.size();
    const std::size_t mid = n / 2;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
    double hi = xs[mid];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

/// Linearly interpolated percentile of a sorted copy, q in [0, 1].
inline double quantile_of(std::vector<double> xs, double q) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    if (q <= 0.0) return xs.front();
    if (q >= 1.0) return xs.back();
    const double pos = q * static_cast<double>(xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= xs.size()) return xs.back();
    return xs[lo] * (1.0 - frac) + xs[lo + 1] * frac;
}

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares of y on x.
inline OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
    OlsFit fit;
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return fit;
    const double mx = mean_of(x.subspan(0, n));
    const double my = mean_of(y.subspan(0, n));
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

/// Centered moving average; window is clipped at the edges.
inline std::vector<double> moving_average(std::span<const double> xs, int window) {
    std::vector<double> out(xs.size());
    if (window < 1) window = 1;
    const int half = window / 2;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(i) - half);
        const std::ptrdiff_t hi =
            std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(xs.size()) - 1,
                                     static_cast<std::ptrdiff_t>(i) + half);
        double s = 0.0;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) s += xs[static_cast<std::size_t>(j)];
        out[i] = s / static_cast<double>(hi - lo + 1);
    }
    return out;
}

} // namespace housing
