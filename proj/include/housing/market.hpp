#pragma once

#include <optional>
#include <vector>

#include "housing/behavior.hpp"
#include "housing/entities.hpp"
#include "housing/region_graph.hpp"
#include "housing/rng.hpp"

namespace housing {

struct Bid {
    int bidder = -1;
    double amount = 0.0;     // affordability ceiling used for matching
    double desired = 0.0;    // raw desired expenditure before financing limits
    double loan_offer = 0.0; // pre-approved loan, 0 for cash buyers
    int area = 0;            // buyer location, for outreach
    bool spatial = true;     // false for investors and overseas buyers
    HouseholdKind kind = HouseholdKind::Renter;
};

struct Listing {
    int dwelling = -1;
    int seller = -1;
    int area = 0;
    double price = 0.0;         // current asking price
    double initial_price = 0.0; // asking at first listing; sold-to-list base
};

struct Deal {
    int bidder = -1;
    int dwelling = -1;
    int seller = -1;
    int area = 0;
    double price = 0.0; // the asking price at match time
    double bid_amount = 0.0;
    double initial_price = 0.0;
    double loan_offer = 0.0;
    HouseholdKind buyer_kind = HouseholdKind::Renter;
};

struct MatchOutcome {
    std::vector<Deal> deals;
    std::vector<Bid> unmatched_bids;
    std::vector<Listing> unsold_listings;
};

/// One month of market clearing. Bids are served in descending amount order
/// (ties by bidder id), listings are offered in descending price order (ties
/// by dwelling id). Each bidder samples which affordable listings it views,
/// picks one through the alpha acceptance walk, and the tentative deal
/// survives with the match probability; a broken deal returns the listing to
/// the pool for lower bidders. Unserved bids and unsold listings come back in
/// the outcome. Pass graph = nullptr for full visibility (outreach 1).
MatchOutcome match(std::vector<Bid> bids, std::vector<Listing> listings,
                   const BehaviorConstants& c, double alpha, const RegionGraph* graph,
                   Rng& rng);

struct SettleResult {
    bool completed = false;
    double loan_principal = 0.0; // new mortgage, 0 for cash purchases
    double seller_payoff = 0.0;  // outstanding balance cleared at sale
    double fees = 0.0;           // stamp duty + purchase costs, a sink
};

/// Execute a matched deal: verify the buyer's deposit, move money, retire the
/// seller's mortgage on the dwelling, originate the buyer's, and transfer
/// ownership. Returns completed = false (and leaves everyone untouched) when
/// the buyer cannot fund deposit plus fees. Overseas buyers settle in cash.
SettleResult settle(const Deal& deal, Household& buyer, Household& seller, Dwelling& dwelling,
                    Bank& bank, std::vector<Mortgage>& book);

struct RentalAssignment {
    int tenant = -1;
    int dwelling = -1;
    double rent = 0.0;
    int duration = 0;
};

/// Match unhoused tenants to vacant rentals. Each tenant draws uniformly from
/// vacancies renting at 10-30% of income; with no such vacancy they take the
/// most expensive one below the band, else the cheapest one above it. Tenants
/// are served in the given order and vacancies deplete; latecomers may stay
/// unhoused. Rent is the annual yield on quality divided by 12; durations are
/// uniform on [6, 18] months.
std::vector<RentalAssignment> allocate_rentals(const std::vector<const Household*>& tenants,
                                               const std::vector<const Dwelling*>& vacancies,
                                               const FinanceConstants& fin, Rng& rng);

} // namespace housing
