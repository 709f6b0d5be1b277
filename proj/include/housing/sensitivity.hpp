#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "housing/engine.hpp"
#include "housing/scenario.hpp"

namespace housing {

/// Objective over an arbitrary box-bounded parameter space; receives the
/// point in natural (mapped) coordinates.
using VectorObjective = std::function<double(std::span<const double>)>;

struct MorrisConfig {
    int trajectories = 20;
    int levels = 10; // grid resolution per axis, even so the jump stays on-grid
    int bootstrap = 1000;
    std::uint64_t seed = 1;
    int jobs = 1;
};

struct MorrisResult {
    std::vector<double> mu;      // mean elementary effect
    std::vector<double> mu_star; // mean absolute elementary effect
    std::vector<double> sigma;   // spread of effects, flags interactions
    std::vector<std::array<double, 2>> mu_star_ci;  // bootstrap 95% interval
    std::vector<std::vector<double>> effects;       // raw effects, per input
    int failed_trajectories = 0; // dropped because the objective threw
};

/// Randomized one-step-at-a-time screening. Each trajectory perturbs every
/// input once by half the grid span (in random order and direction) and
/// records the normalized response change. Effects are expressed per unit of
/// the normalized [0, 1] input range, so inputs with different natural scales
/// stay comparable. Deterministic in the seed for any job count.
MorrisResult morris_screen(const VectorObjective& f, std::span<const double> lo,
                           std::span<const double> hi, const MorrisConfig& cfg);

/// Names of the behavioral constants exposed to the sweep tooling.
std::vector<std::string> sweepable_constants();

/// Set one named behavioral constant; throws std::invalid_argument on an
/// unknown name.
void apply_constant(BehaviorConstants& b, const std::string& name, double value);
double get_constant(const BehaviorConstants& b, const std::string& name);

struct SweepPoint {
    std::string param;
    double value = 0.0;
    std::vector<double> series; // regional median price path
    double loss = 0.0;          // only filled by the loss-valued sweeps
};

/// Grid over one institutional constant, +-`rel_width` around its configured
/// value, one deterministic run per grid point.
std::vector<SweepPoint> constant_sweep(const Scenario& scn, const RunConfig& cfg,
                                       const std::string& name, int grid_points,
                                       double rel_width, int jobs);

/// Dense grid over one behavioral parameter (h, beta or alpha) across its
/// search interval, scoring each run against `actual`.
std::vector<SweepPoint> behavioral_sweep(const Scenario& scn, const RunConfig& cfg,
                                         std::size_t param_index, int levels,
                                         std::span<const double> actual, double lambda,
                                         int jobs);

} // namespace housing
