#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "housing/rng.hpp"

namespace housing {

struct EmptySamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Gaussian kernel density over observed sale prices. Bandwidth follows
/// Scott's factor for one dimension: sample standard deviation times
/// n^(-1/5). Sampling rejects non-positive draws so dwelling values stay
/// strictly positive.
class PriceDensity {
public:
    explicit PriceDensity(std::span<const double> samples);

    double bandwidth() const { return bandwidth_; }
    std::size_t sample_count() const { return samples_.size(); }

    double pdf(double x) const;

    /// Draw one value: pick a kernel uniformly, perturb by the bandwidth,
    /// retry while the result is not positive.
    double sample(Rng& rng) const;

    double median() const { return median_; }

private:
    std::vector<double> samples_;
    double bandwidth_ = 0.0;
    double median_ = 0.0;
};

/// Per-area densities with a pooled fallback: areas with fewer than
/// `min_samples` observations share a density fitted on all samples combined.
class AreaDensities {
public:
    AreaDensities(const std::vector<std::vector<double>>& per_area, int min_samples);

    const PriceDensity& area(int idx) const;
    bool pooled(int idx) const { return uses_pool_[static_cast<std::size_t>(idx)]; }

private:
    std::vector<PriceDensity> own_;     // slot per area, pooled slots duplicated
    std::vector<bool> uses_pool_;
};

} // namespace housing
