#include "housing/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace housing {

DtwResult dtw(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    const std::size_t m = y.size();
    if (n == 0 || m == 0) throw EmptySeries("dtw needs two nonempty series");

    const double inf = std::numeric_limits<double>::infinity();
    // (n+1) x (m+1) table with an infinite border row/column.
    std::vector<double> d((n + 1) * (m + 1), inf);
    auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };
    d[at(0, 0)] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const double best = std::min({d[at(i - 1, j - 1)], d[at(i, j - 1)], d[at(i - 1, j)]});
            d[at(i, j)] = std::abs(x[i - 1] - y[j - 1]) + best;
        }
    }

    DtwResult res;
    res.cost = d[at(n, m)];

    // Backtrack; preference order on ties fixes one optimal path.
    std::size_t i = n, j = m;
    res.path.emplace_back(static_cast<int>(i), static_cast<int>(j));
    while (i > 1 || j > 1) {
        const double diag = d[at(i - 1, j - 1)];
        const double vert = d[at(i, j - 1)];
        const double horiz = d[at(i - 1, j)];
        const double best = std::min({diag, vert, horiz});
        if (diag == best) {
            --i;
            --j;
        } else if (vert == best) {
            --j;
        } else {
            --i;
        }
        res.path.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
    std::reverse(res.path.begin(), res.path.end());
    return res;
}

double tdi(const WarpPath& path, int n) {
    if (n <= 0 || path.empty()) return 0.0;
    double area = 0.0;
    for (std::size_t l = 0; l + 1 < path.size(); ++l) {
        const double i1 = path[l].first, j1 = path[l].second;
        const double i2 = path[l + 1].first, j2 = path[l + 1].second;
        if (i2 <= i1) continue; // zero-width segment
        // Integral of (x - path(x)) over [i1, i2] with path(x) linear between
        // the two vertices. Steps are at most one unit wide so the integrand
        // cannot change sign inside a segment.
        const double slope = (j2 - j1) / (i2 - i1);
        const double mid = 0.5 * (i1 + i2);
        const double seg = (mid - (j1 + (mid - i1) * slope)) * (i2 - i1);
        area += std::abs(seg);
    }
    return 2.0 * area / (static_cast<double>(n) * static_cast<double>(n));
}

LossReport combined_loss(std::span<const double> actual, std::span<const double> simulated,
                         double lambda) {
    if (actual.empty() || simulated.empty())
        throw EmptySeries("combined_loss needs two nonempty series");
    if (actual.size() != simulated.size())
        throw LengthMismatch("combined_loss requires equal-length series");
    const DtwResult d = dtw(actual, simulated);
    LossReport rep;
    rep.shape = d.cost;
    rep.temporal = tdi(d.path, static_cast<int>(actual.size()));
    rep.combined = lambda * rep.shape + (1.0 - lambda) * rep.temporal;
    return rep;
}

std::pair<std::span<const double>, std::span<const double>>
train_test_split(std::span<const double> series, double ratio) {
    const std::size_t n = series.size();
    const std::size_t cut = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
    if (cut == 0 || cut >= n)
        throw DegenerateSplit("split at " + std::to_string(cut) + " of " + std::to_string(n) +
                              " leaves an empty side");
    return {series.subspan(0, cut), series.subspan(cut)};
}

} // namespace housing
