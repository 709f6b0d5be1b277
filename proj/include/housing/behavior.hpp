#pragma once

#include <optional>
#include <span>
#include <vector>

#include "housing/params.hpp"
#include "housing/rng.hpp"

namespace housing {

/// Fixed behavioral constants of the pricing and listing rules. Defaults are
/// the 2016-2019 configuration; scenarios may override any of them.
struct BehaviorConstants {
    double income_multiplier = 81.75; // scales the income-driven budget
    double income_exponent = 0.80;    // concavity of budget in income
    double heterogeneity = 0.10;      // full width of the uniform price jitter
    double list_markup = 1.75;        // base markup over recent similar sales
    double sold_to_list_power = 0.22; // exposure of list prices to market heat
    double months_listed_power = -0.01;
    double base_listing_probability = 0.01;
    int similar_sales = 10;           // reference sales when anchoring a list price
    double urgency_stress = 0.20;     // seller discount growth per stressed month
    double urgency_rental = 0.02;     // buyer urgency growth per month since selling
    double urgency_cash = 0.20;       // reserved; no defined role in pricing yet
    double match_probability = 0.80;  // a matched deal survives with this chance
    double downshift_ratio = 0.60;    // min acceptable loan as a share of the bid
    double invest_propensity = 0.03;  // monthly chance an owner enters the buy side
    double stress_listing = 0.05;     // extra listing probability per stressed month
};

/// Market state a household reads when pricing. `hpi_yearly_change` is the
/// relative change of the price index over the previous year; `sold_to_list`
/// is the area's average ratio of sale price to initial list price.
struct MarketIndicators {
    double hpi_yearly_change = 0.0;
    double sold_to_list = 1.0;
};

/// Desired purchase expenditure. Empty when the carrying-cost denominator
/// (mortgage rate + upkeep rate - h * index change) is not positive, in which
/// case the household sits the month out.
std::optional<double> bid_price(const BehaviorConstants& c, double h_param,
                                double monthly_income, double mortgage_rate,
                                double house_care_rate, double hpi_yearly_change,
                                double urgency_to_buy, Rng& rng);

/// Buyer urgency term: grows with the number of months since the household
/// sold a dwelling without having bought a replacement; 1 otherwise.
double urgency_to_buy(const BehaviorConstants& c, int months_since_last_sale);

/// Seller urgency divisor: grows with consecutive months of financial stress.
double urgency_to_sell(const BehaviorConstants& c, int months_in_stress);

/// Asking price for a dwelling: recent similar-quality sale average, marked
/// up, cooled by time on market and discounted by seller urgency.
double list_price(const BehaviorConstants& c, double similar_sales_mean, double sold_to_list,
                  int months_on_market, double urgency_sell, Rng& rng);

/// Herding-adjusted monthly listing probability for an area whose open
/// listings fraction is `area_fraction` against the regional mean. beta = 0 or
/// a zero mean reduce to the base probability; the result is clamped to [0,1].
double listing_probability(const BehaviorConstants& c, double beta, double area_fraction,
                           double mean_fraction);

/// Probability that a buyer in `from` views a listing in `to`:
/// alpha * outreach^2 for spatially constrained buyers, alpha for investors
/// and overseas buyers (pass outreach = 1).
double viewing_probability(double alpha, double outreach);

/// Walk the price-descending candidate list accepting each entry with
/// probability alpha; if every entry is rejected, fall back to a uniform
/// choice. alpha = 1 selects the head (the most expensive candidate),
/// alpha = 0 is a uniform draw. Returns an index into `candidates`, or
/// nullopt when empty.
std::optional<std::size_t> choose_listing(std::span<const double> candidate_prices,
                                          double alpha, Rng& rng);

} // namespace housing
