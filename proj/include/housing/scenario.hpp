#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "housing/behavior.hpp"
#include "housing/entities.hpp"
#include "housing/params.hpp"
#include "housing/region_graph.hpp"
#include "housing/rng.hpp"

namespace housing {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Weighted interval of a piecewise-uniform distribution (income, liquidity).
struct Bracket {
    double low = 0.0;
    double high = 0.0;
    double weight = 0.0;
};

/// Draw a value: bracket by weight, uniform inside it.
double sample_bracket(const std::vector<Bracket>& brackets, Rng& rng);
/// Cumulative probability of `value` under the bracket distribution.
double bracket_percentile(const std::vector<Bracket>& brackets, double value);
/// Inverse of bracket_percentile.
double bracket_value_at(const std::vector<Bracket>& brackets, double pct);

/// Exogenous drivers, one entry per simulated month (index 0 is the first
/// recorded month). Totals are full-region counts; the engine divides by the
/// scenario scale.
struct ExogenousSeries {
    std::vector<double> mortgage_rate;      // annual fraction
    std::vector<double> overseas_rate;      // approved purchases per month, full region
    std::vector<double> overseas_avg_price; // dollars per approval
    std::vector<double> households_total;
    std::vector<double> dwellings_total;

    int size() const { return static_cast<int>(mortgage_rate.size()); }
};

/// Complete description of one simulated market: geography, initial price and
/// wealth distributions, exogenous series, institutional constants and the
/// default behavioral parameters.
struct Scenario {
    std::vector<std::string> area_names;
    Topology topology;
    std::vector<double> population_weights;            // per area, sums to 1
    std::vector<std::vector<double>> price_samples;    // per area, recent sale prices
    std::vector<std::vector<Bracket>> income_brackets; // per area, annual income
    std::vector<Bracket> liquidity_brackets;           // region-wide
    ExogenousSeries exo;
    TaxSchedule tax;
    BehaviorConstants behavior;
    FinanceConstants finance;
    ParameterVector params;

    double scale = 100.0; // one agent stands for this many households
    int months = 48;      // recorded simulation length
    int burn_in = 12;     // equilibration steps before recording
    double train_ratio = 0.75;
    double owner_share = 0.65;  // initial owner-occupier fraction
    int min_kde_samples = 30;   // below this an area uses the pooled density

    int n_areas() const { return static_cast<int>(area_names.size()); }
};

/// Structural checks: consistent array sizes, positive weights (renormalized
/// in place), exogenous series covering every month, a connected graph.
/// Throws ScenarioError on violation.
void validate_scenario(Scenario& s);

/// Directory bundle: areas.csv, edges.csv, sales.csv, income_brackets.csv,
/// exogenous.csv and scenario.json. See the README for the column layouts.
Scenario load_scenario(const std::string& dir);
void save_scenario(const Scenario& s, const std::string& dir);

struct SyntheticConfig {
    int n_areas = 38;
    int months = 48;
    double total_households = 1.8e6; // full-region count
    double scale = 100.0;
    int burn_in = 12;
    double train_ratio = 0.75;
};

/// Self-contained random scenario: a connected sparse graph, log-normally
/// spread area price levels, incomes correlated with those levels, and gently
/// trending exogenous series. Deterministic in the seed.
Scenario generate_synthetic_scenario(std::uint64_t seed, const SyntheticConfig& cfg);

/// Stable hash of everything that shapes simulation output (used in
/// provenance headers). The seed is deliberately not part of it.
std::uint64_t scenario_config_hash(const Scenario& s);

} // namespace housing
