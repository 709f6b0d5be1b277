#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "housing/loss.hpp"
#include "housing/rng.hpp"

using namespace housing;

namespace {

/// Brute-force alignment oracle: enumerate every monotone path from (1,1) to
/// (n,m) and take the cheapest. Feasible for the short series used here.
double enumerate_min_cost(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    const int m = static_cast<int>(y.size());
    double best = std::numeric_limits<double>::infinity();
    struct Frame {
        int i, j;
        double cost;
    };
    std::vector<Frame> stack{{1, 1, std::abs(x[0] - y[0])}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (f.i == n && f.j == m) {
            best = std::min(best, f.cost);
            continue;
        }
        if (f.i < n && f.j < m)
            stack.push_back({f.i + 1, f.j + 1,
                             f.cost + std::abs(x[static_cast<std::size_t>(f.i)] -
                                               y[static_cast<std::size_t>(f.j)])});
        if (f.i < n)
            stack.push_back({f.i + 1, f.j,
                             f.cost + std::abs(x[static_cast<std::size_t>(f.i)] -
                                               y[static_cast<std::size_t>(f.j - 1)])});
        if (f.j < m)
            stack.push_back({f.i, f.j + 1,
                             f.cost + std::abs(x[static_cast<std::size_t>(f.i - 1)] -
                                               y[static_cast<std::size_t>(f.j)])});
    }
    return best;
}

bool valid_warp_path(const WarpPath& p, int n, int m) {
    if (p.empty() || p.front() != std::pair<int, int>{1, 1} ||
        p.back() != std::pair<int, int>{n, m})
        return false;
    for (std::size_t l = 0; l + 1 < p.size(); ++l) {
        const int di = p[l + 1].first - p[l].first;
        const int dj = p[l + 1].second - p[l].second;
        if (di < 0 || dj < 0 || di > 1 || dj > 1 || (di == 0 && dj == 0)) return false;
    }
    return true;
}

double path_cost(const WarpPath& p, const std::vector<double>& x, const std::vector<double>& y) {
    double c = 0.0;
    for (const auto& [i, j] : p)
        c += std::abs(x[static_cast<std::size_t>(i - 1)] - y[static_cast<std::size_t>(j - 1)]);
    return c;
}

} // namespace

TEST_CASE("alignment of identical series is free and diagonal") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    const DtwResult r = dtw(x, x);
    CHECK(r.cost == doctest::Approx(0.0));
    REQUIRE(r.path.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(r.path[static_cast<std::size_t>(i)] ==
                                      std::pair<int, int>{i + 1, i + 1});
}

TEST_CASE("a one-step lag aligns at zero cost") {
    const std::vector<double> x = {0.0, 0.0, 1.0};
    const std::vector<double> y = {0.0, 1.0, 1.0};
    const DtwResult r = dtw(x, y);
    CHECK(r.cost == doctest::Approx(0.0));
    CHECK(valid_warp_path(r.path, 3, 3));
}

TEST_CASE("dynamic program matches exhaustive enumeration on short series") {
    Rng rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> x(static_cast<std::size_t>(rng.uniform_int(1, 6)));
        std::vector<double> y(static_cast<std::size_t>(rng.uniform_int(1, 6)));
        for (double& v : x) v = rng.uniform(-5.0, 5.0);
        for (double& v : y) v = rng.uniform(-5.0, 5.0);

        const DtwResult r = dtw(x, y);
        const double oracle = enumerate_min_cost(x, y);
        REQUIRE(r.cost == doctest::Approx(oracle).epsilon(1e-12));
        REQUIRE(valid_warp_path(r.path, static_cast<int>(x.size()), static_cast<int>(y.size())));
        REQUIRE(path_cost(r.path, x, y) == doctest::Approx(r.cost).epsilon(1e-12));
    }
}

TEST_CASE("empty series are rejected") {
    const std::vector<double> x = {1.0};
    CHECK_THROWS_AS(dtw({}, x), EmptySeries);
    CHECK_THROWS_AS(dtw(x, {}), EmptySeries);
}

TEST_CASE("timing distortion of hand-integrated paths") {
    // Identity: no distortion.
    CHECK(tdi({{1, 1}, {2, 2}, {3, 3}}, 3) == doctest::Approx(0.0));

    // One horizontal then one vertical step on a 2x2 grid: the path hugs
    // j = 1 across i in [1, 2], area 1/2, normalized 2 * (1/2) / 4.
    CHECK(tdi({{1, 1}, {2, 1}, {2, 2}}, 2) == doctest::Approx(0.25).epsilon(1e-12));

    // Full staircase, all of x before any of y: area (n-1)^2 / 2.
    for (const int n : {2, 3, 5, 8}) {
        WarpPath p;
        for (int i = 1; i <= n; ++i) p.emplace_back(i, 1);
        for (int j = 2; j <= n; ++j) p.emplace_back(n, j);
        const double expect =
            static_cast<double>((n - 1) * (n - 1)) / static_cast<double>(n * n);
        CHECK(tdi(p, n) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(tdi(p, n) <= 1.0);
    }
}

TEST_CASE("combined loss mixes the two terms linearly") {
    const std::vector<double> a = {0.0, 1.0, 2.0, 1.0};
    const std::vector<double> b = {0.5, 0.5, 2.5, 0.5};
    const LossReport full = combined_loss(a, b, 0.5);
    const LossReport shape_only = combined_loss(a, b, 1.0);
    const LossReport time_only = combined_loss(a, b, 0.0);
    CHECK(shape_only.combined == doctest::Approx(full.shape));
    CHECK(time_only.combined == doctest::Approx(full.temporal));
    CHECK(full.combined == doctest::Approx(0.5 * full.shape + 0.5 * full.temporal));

    CHECK_THROWS_AS(combined_loss(a, std::vector<double>{1.0}, 0.5), LengthMismatch);
}

TEST_CASE("a time-shifted peak beats a flat line despite worse pointwise error") {
    // The shifted copy reproduces the boom shape two months late; the flat
    // line is closer point by point but has no peak at all.
    const std::vector<double> actual = {0, 0, 1, 2, 5, 2, 1, 0, 0, 0};
    const std::vector<double> shifted = {0, 0, 0, 0, 1, 2, 5, 2, 1, 0};
    const std::vector<double> flat(10, 1.1);

    auto mse = [](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
        return s / static_cast<double>(x.size());
    };
    REQUIRE(mse(actual, shifted) > mse(actual, flat));

    const double loss_shifted = combined_loss(actual, shifted, 0.5).combined;
    const double loss_flat = combined_loss(actual, flat, 0.5).combined;
    CHECK(loss_shifted < loss_flat);
}

TEST_CASE("series split into contiguous train and test views") {
    std::vector<double> series(48);
    for (std::size_t i = 0; i < series.size(); ++i) series[i] = static_cast<double>(i);

    const auto [train, test] = train_test_split(series, 0.75);
    CHECK(train.size() == 36);
    CHECK(test.size() == 12);
    CHECK(train.front() == 0.0);
    CHECK(train.back() == 35.0);
    CHECK(test.front() == 36.0);
    CHECK(test.back() == 47.0);

    // A 42-month record with a 30-month training window.
    std::vector<double> longer(42, 1.0);
    const auto [tr2, te2] = train_test_split(longer, 30.0 / 42.0);
    CHECK(tr2.size() == 30);
    CHECK(te2.size() == 12);

    CHECK_THROWS_AS(train_test_split(series, 0.0), DegenerateSplit);
    CHECK_THROWS_AS(train_test_split(series, 1.0), DegenerateSplit);
    CHECK_THROWS_AS(train_test_split(std::vector<double>{1.0}, 0.5), DegenerateSplit);
}
