#pragma once

#include <array>
#include <cstddef>
#include <string>

namespace housing {

/// The three behavioral degrees of freedom the calibrator searches over.
/// h   : responsiveness of bids to the yearly price-index change.
/// beta: herding strength in the listing decision.
/// alpha: price-focus of buyers when viewing and choosing listings.
struct ParameterVector {
    double h = 0.0;
    double beta = 0.0;
    double alpha = 0.5;

    double operator[](std::size_t i) const {
        return i == 0 ? h : i == 1 ? beta : alpha;
    }
    double& operator[](std::size_t i) {
        return i == 0 ? h : i == 1 ? beta : alpha;
    }
    static constexpr std::size_t size() { return 3; }
    static const char* name(std::size_t i) {
        static const char* names[3] = {"h", "beta", "alpha"};
        return names[i];
    }
};

/// Box bounds for uniform search, one interval per parameter in the order
/// (h, beta, alpha).
struct SearchSpace {
    std::array<double, 3> lo{-1.0, -10.0, 0.0};
    std::array<double, 3> hi{1.0, 10.0, 1.0};

    double from_unit(std::size_t i, double u) const { return lo[i] + u * (hi[i] - lo[i]); }
    double to_unit(std::size_t i, double x) const {
        return hi[i] > lo[i] ? (x - lo[i]) / (hi[i] - lo[i]) : 0.0;
    }

    ParameterVector from_unit(const std::array<double, 3>& u) const {
        ParameterVector p;
        for (std::size_t i = 0; i < 3; ++i) p[i] = from_unit(i, u[i]);
        return p;
    }
    std::array<double, 3> to_unit(const ParameterVector& p) const {
        std::array<double, 3> u{};
        for (std::size_t i = 0; i < 3; ++i) u[i] = to_unit(i, p[i]);
        return u;
    }
};

} // namespace housing
