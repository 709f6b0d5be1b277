#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace housing {

struct EmptySeries : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LengthMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateSplit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Monotone alignment between two series; 1-based (i, j) vertices from (1, 1)
/// to (n, m), steps limited to (+1,0), (+1,+1), (0,+1).
using WarpPath = std::vector<std::pair<int, int>>;

struct DtwResult {
    double cost = 0.0;
    WarpPath path;
};

/// Exact dynamic-programming alignment cost with absolute-difference pointwise
/// metric. The recovered path is the optimal one; cost ties during backtrack
/// prefer the diagonal step, then the vertical step.
DtwResult dtw(std::span<const double> x, std::span<const double> y);

/// Normalized area between a warp path and the identity alignment for an
/// n-by-n comparison. The path is interpolated linearly between vertices;
/// segments that do not advance the first index have zero width. 0 for the
/// identity path, approaching 1 for the maximal staircase.
double tdi(const WarpPath& path, int n);

struct LossReport {
    double shape = 0.0;    // alignment cost
    double temporal = 0.0; // timing distortion
    double combined = 0.0;
};

/// combined = lambda * shape + (1 - lambda) * temporal, no rescaling of either
/// term. Series must be the same nonzero length.
LossReport combined_loss(std::span<const double> actual, std::span<const double> simulated,
                         double lambda = 0.5);

/// Split a series at floor(ratio * n) into train/test views. Throws
/// DegenerateSplit when either side would be empty.
std::pair<std::span<const double>, std::span<const double>>
train_test_split(std::span<const double> series, double ratio);

} // namespace housing
