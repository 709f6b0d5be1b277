#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "housing/params.hpp"
#include "housing/scenario.hpp"

namespace housing {

/// One objective evaluation: the loss and the simulated series behind it
/// (empty for analytic objectives).
struct EvalOutcome {
    double loss = 0.0;
    std::vector<double> series;
};

/// Objective contract: deterministic given the parameter vector and the seed.
using Objective = std::function<EvalOutcome(const ParameterVector&, std::uint64_t)>;

struct Trial {
    int index = -1;
    ParameterVector params;
    std::vector<double> losses; // one per repeat
    double mean_loss = 0.0;
    std::vector<double> best_series; // series of the lowest-loss repeat
    bool constraint_ok = false;
};

struct OptimizeOptions {
    int n_trials = 100;
    int repeats = 3;
    int startup = 20;    // uniform exploration before the estimator engages
    int candidates = 24; // proposals scored per adaptive step
    double gamma = 0.25; // quantile split between favourable and the rest
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string history_path; // JSON-lines trial log, empty to disable
};

struct OptimizeResult {
    std::vector<Trial> trials;
    int best_index = -1; // lowest mean loss, unconstrained
};

/// Sequential model-based search: after the startup phase, each proposal
/// maximizes the density ratio between a Parzen mixture fitted on the best
/// gamma-quantile of trials and one fitted on the rest. Repeats of one trial
/// run on derived seeds (in parallel when jobs > 1) and average into the
/// trial loss. Fully deterministic in the seed, independent of jobs.
OptimizeResult optimize(const Objective& objective, const SearchSpace& space,
                        const OptimizeOptions& opt);

/// Trace shape gate used after optimization: the mid-series value must exceed
/// both endpoints.
bool global_peak(const std::vector<double>& series);

using TracePredicate = std::function<bool(const std::vector<double>&)>;

struct ConstrainedPick {
    int index = -1;
    bool satisfied = false; // false: no trial passed, index is the fallback best
};

/// Mark each trial against the predicate and return the lowest-loss survivor;
/// with no survivor, fall back to the unconstrained best.
ConstrainedPick apply_global_constraint(std::vector<Trial>& trials,
                                        const TracePredicate& pred = global_peak);

/// Simulation-backed objective: run the scenario at the candidate parameters
/// over the training window and score the regional median series against
/// `actual_train` with the combined shape/timing loss.
Objective make_sim_objective(const Scenario& scn, std::vector<double> actual_train,
                             double lambda = 0.5);

} // namespace housing
