#include "housing/kde.hpp"

#include <cmath>

#include "housing/stats.hpp"

namespace housing {

namespace {
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}

PriceDensity::PriceDensity(std::span<const double> samples)
    : samples_(samples.begin(), samples.end()) {
    if (samples_.empty()) throw EmptySamples("density needs at least one sample");
    const double sd = stddev_of(samples_);
    const double n = static_cast<double>(samples_.size());
    bandwidth_ = sd * std::pow(n, -0.2);
    if (bandwidth_ <= 0.0) {
        // Degenerate sample set (single point or identical values); fall back
        // to a narrow kernel proportional to the level so pdf stays proper.
        bandwidth_ = std::max(1.0, 0.01 * std::abs(samples_.front()));
    }
    median_ = median_of(samples_);
}

double PriceDensity::pdf(double x) const {
    double s = 0.0;
    for (const double xi : samples_) {
        const double z = (x - xi) / bandwidth_;
        s += std::exp(-0.5 * z * z);
    }
    return s * kInvSqrt2Pi / (bandwidth_ * static_cast<double>(samples_.size()));
}

double PriceDensity::sample(Rng& rng) const {
    for (;;) {
        const std::size_t k =
            static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(samples_.size()) - 1));
        const double v = samples_[k] + bandwidth_ * rng.normal();
        if (v > 0.0) return v;
    }
}

AreaDensities::AreaDensities(const std::vector<std::vector<double>>& per_area, int min_samples) {
    std::vector<double> pooled;
    for (const auto& xs : per_area) pooled.insert(pooled.end(), xs.begin(), xs.end());
    if (pooled.empty()) throw EmptySamples("no sale samples in any area");
    const PriceDensity pool(pooled);

    own_.reserve(per_area.size());
    uses_pool_.reserve(per_area.size());
    for (const auto& xs : per_area) {
        if (static_cast<int>(xs.size()) < min_samples) {
            own_.push_back(pool);
            uses_pool_.push_back(true);
        } else {
            own_.emplace_back(xs);
            uses_pool_.push_back(false);
        }
    }
}

const PriceDensity& AreaDensities::area(int idx) const {
    return own_.at(static_cast<std::size_t>(idx));
}

} // namespace housing
