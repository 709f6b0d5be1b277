#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "housing/kde.hpp"
#include "housing/market.hpp"
#include "housing/scenario.hpp"

namespace housing {

struct InfeasibleScenario : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    ParameterVector params;
    std::uint64_t seed = 1;
    int months = -1; // -1: run the scenario's full recorded length
    /// Hold mortgage rate and overseas demand at their last training-window
    /// values for months past the split, mirroring an honest forecast.
    bool honor_forecast_boundary = true;
};

/// Per-area slice of one recorded month.
struct AreaMonth {
    double median_price = 0.0; // carried forward on zero-deal months
    double mean_price = 0.0;
    int deals = 0;
    int listings = 0;               // open listings at decision time
    double listings_fraction = 0.0; // listings / dwellings
    double sold_to_list = 1.0;
    double p_list = 0.0; // herding-adjusted listing probability applied
    int households = 0;  // residents at month end
};

struct MonthRow {
    int month = 0; // recorded index, 0-based
    double region_median = 0.0;
    double region_mean = 0.0;
    double hpi = 0.0;
    double hpi_yearly_change = 0.0;
    int deals = 0;
    int listings = 0;
    int dwellings = 0;
    int households = 0;
    std::vector<AreaMonth> areas;
};

struct DealRecord {
    int month = 0;
    int area = 0;
    double price = 0.0;
    double initial_price = 0.0;
    HouseholdKind buyer_kind = HouseholdKind::Renter;
};

enum class MoverKind { NewRenter, NewOwner, FirstTimeBuyer, LocalInvestor, OverseasInvestor };

struct MovementRecord {
    int month = 0;
    MoverKind kind = MoverKind::NewRenter;
    int from_area = -1; // -1: entered from outside the region
    int to_area = 0;
    int household = -1;
};

/// Money-flow ledger for one month. Everything that moves a liquid balance is
/// either a transfer inside the household set (cancels in the sum) or appears
/// here, so
///   liquid_after - liquid_before = income - tax - consumption
///     - liquid_consumption - upkeep - property_tax - fees
///     - mortgage_interest - mortgage_principal - payoffs + disbursements
///     + inflow_migrants + inflow_overseas
/// up to floating-point noise. residual() evaluates that difference.
struct AuditRow {
    int month = 0;
    double liquid_before = 0.0;
    double liquid_after = 0.0;
    double income = 0.0;
    double tax = 0.0;
    double consumption = 0.0;
    double liquid_consumption = 0.0;
    double upkeep = 0.0;
    double property_tax = 0.0;
    double rent_paid = 0.0;
    double rent_received = 0.0;
    double fees = 0.0;
    double mortgage_interest = 0.0;
    double mortgage_principal = 0.0;
    double payoffs = 0.0;
    double disbursements = 0.0;
    double inflow_migrants = 0.0;
    double inflow_overseas = 0.0;

    double residual() const {
        return (liquid_after - liquid_before) -
               (income - tax - consumption - liquid_consumption - upkeep - property_tax - fees -
                mortgage_interest - mortgage_principal - payoffs + disbursements +
                inflow_migrants + inflow_overseas);
    }
    /// Scale for relative comparison of the residual.
    double gross_flow() const {
        return std::abs(income) + std::abs(tax) + std::abs(consumption) +
               std::abs(liquid_consumption) + std::abs(upkeep) + std::abs(property_tax) +
               std::abs(fees) + std::abs(mortgage_interest) + std::abs(mortgage_principal) +
               std::abs(payoffs) + std::abs(disbursements) + std::abs(inflow_migrants) +
               std::abs(inflow_overseas) + 1.0;
    }
};

struct SimulationTrace {
    std::vector<MonthRow> months; // recorded months only
    std::vector<DealRecord> deals;
    std::vector<MovementRecord> moves;
    std::vector<AuditRow> audits;

    std::vector<double> region_median_series() const {
        std::vector<double> out;
        out.reserve(months.size());
        for (const MonthRow& r : months) out.push_back(r.region_median);
        return out;
    }
};

/// One realized market. Construction builds the initial stock from the
/// scenario; step() advances a month through the fixed update order:
/// demographics, cashflows, rental renewals and allocation, listing
/// decisions, bid formation, matching, settlement, indicator refresh.
class World {
public:
    World(const Scenario& scn, const RunConfig& cfg);

    void step();
    SimulationTrace run(); // burn-in plus the recorded months

    int current_step() const { return t_; }
    int recorded_month() const { return t_ - scn_->burn_in; }
    const SimulationTrace& trace() const { return trace_; }

    const std::vector<Household>& households() const { return households_; }
    const std::vector<Dwelling>& dwellings() const { return dwellings_; }
    const std::vector<Mortgage>& mortgages() const { return mortgages_; }
    const std::vector<RentalContract>& contracts() const { return contracts_; }
    const RegionGraph& graph() const { return graph_; }

    /// Structural consistency: ownership bijection, occupancy states matching
    /// contracts and residences, every local household housed or queued.
    /// Returns human-readable violations, empty when healthy.
    std::vector<std::string> check_invariants() const;

private:
    struct SaleRecord {
        double quality = 0.0;
        double price = 0.0;
        int step = 0;
    };

    void init_stock();
    void add_dwelling(int area);
    void add_household(int area, bool entered_during_sim);
    void make_developer();
    double exo_rate(int recorded_month) const;
    double exo_overseas_rate(int recorded_month) const;
    double exo_overseas_price(int recorded_month) const;
    double exo_total(const std::vector<double>& series, int recorded_month) const;
    int clamp_forecast(int recorded_month) const;
    double hpi_at(int step_index) const; // pre-history resolves to the initial index
    double hpi_yearly_change() const;
    double valuation_ratio() const;
    double similar_sales_mean(int area, double quality) const;
    void reclassify(Household& h);
    void house_tenant(int household, int dwelling, double rent, int duration);
    int pick_area(Rng& rng) const;

    void phase_demographics();
    void phase_cashflows();
    void phase_rentals();
    void phase_listings();
    std::vector<Bid> phase_bids();
    void phase_match_and_settle(std::vector<Bid> bids);
    void phase_indicators();

    const Scenario* scn_;
    RunConfig cfg_;
    RegionGraph graph_;
    Bank bank_;
    std::optional<AreaDensities> densities_;
    std::vector<double> init_median_;

    std::vector<Household> households_;
    std::vector<Dwelling> dwellings_;
    std::vector<Mortgage> mortgages_; // kept sorted by borrower id
    std::vector<RentalContract> contracts_;
    std::vector<int> rental_queue_;
    std::vector<Listing> open_listings_;
    std::vector<Bid> overseas_carry_;
    int developer_ = -1;

    std::vector<std::vector<SaleRecord>> sale_history_;
    std::vector<double> sold_to_list_;     // latest per-area ratio
    std::vector<double> area_median_carry_;
    std::vector<double> area_mean_carry_;
    double region_median_carry_ = 0.0;
    double region_mean_carry_ = 0.0;
    double hpi_init_ = 0.0;
    std::vector<double> hpi_history_; // one entry per executed step
    std::deque<std::vector<double>> last_months_prices_;

    std::vector<int> initial_dwelling_share_; // per-area counts at init

    int t_ = 0;
    Rng rng_;
    SimulationTrace trace_;

    // scratch, collected during a step
    std::vector<DealRecord> month_deals_;
    std::vector<std::vector<double>> month_sold_to_list_;
    std::vector<double> month_fractions_;
    std::vector<double> month_p_list_;
    std::vector<int> month_listing_count_;
    double month_dhpi_ = 0.0;
    AuditRow audit_;
};

SimulationTrace simulate(const Scenario& scn, const RunConfig& cfg);

struct EnsembleSummary {
    int runs = 0;
    int months = 0;
    std::vector<double> mean, median, min, max, sd; // region median price, per month
    std::vector<double> area_final_mean, area_final_sd;
};

struct MonteCarloResult {
    std::vector<SimulationTrace> traces;
    EnsembleSummary summary;
};

/// Independent runs on derived seeds. `jobs` only controls scheduling; the
/// traces and the summary are identical for any job count.
MonteCarloResult monte_carlo(const Scenario& scn, const RunConfig& cfg, int runs, int jobs);

EnsembleSummary summarize(const std::vector<SimulationTrace>& traces);

struct Provenance {
    std::string version = "0.1.0";
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;

    std::string line() const;
};

void write_trace_csv(const SimulationTrace& tr, const Scenario& scn, const std::string& path,
                     const Provenance& prov);
void write_deals_csv(const SimulationTrace& tr, const Scenario& scn, const std::string& path,
                     const Provenance& prov);
void write_moves_csv(const SimulationTrace& tr, const Scenario& scn, const std::string& path,
                     const Provenance& prov);
void write_summary_json(const MonteCarloResult& mc, const Scenario& scn, const std::string& path,
                        const Provenance& prov);

const char* to_string(HouseholdKind k);
const char* to_string(MoverKind k);

} // namespace housing
