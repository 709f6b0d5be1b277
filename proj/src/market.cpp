#include "housing/market.hpp"

#include <algorithm>
#include <cmath>

namespace housing {

MatchOutcome match(std::vector<Bid> bids, std::vector<Listing> listings,
                   const BehaviorConstants& c, double alpha, const RegionGraph* graph,
                   Rng& rng) {
    std::sort(bids.begin(), bids.end(), [](const Bid& a, const Bid& b) {
        if (a.amount != b.amount) return a.amount > b.amount;
        return a.bidder < b.bidder;
    });
    std::sort(listings.begin(), listings.end(), [](const Listing& a, const Listing& b) {
        if (a.price != b.price) return a.price > b.price;
        return a.dwelling < b.dwelling;
    });

    MatchOutcome out;
    std::vector<bool> sold(listings.size(), false);
    std::size_t n_unsold = listings.size();
    double min_unsold = listings.empty() ? 0.0 : listings.back().price;

    std::vector<std::size_t> viewed; // indices into listings, price-descending
    for (const Bid& bid : bids) {
        if (n_unsold == 0 || bid.amount < min_unsold) {
            out.unmatched_bids.push_back(bid);
            continue;
        }
        viewed.clear();
        for (std::size_t i = 0; i < listings.size(); ++i) {
            if (sold[i]) continue;
            const Listing& l = listings[i];
            if (l.price > bid.amount) continue;
            if (l.seller == bid.bidder) continue;
            const double reach =
                bid.spatial && graph != nullptr ? graph->outreach(bid.area, l.area) : 1.0;
            if (rng.bernoulli(viewing_probability(alpha, reach))) viewed.push_back(i);
        }
        std::vector<double> prices(viewed.size());
        for (std::size_t k = 0; k < viewed.size(); ++k) prices[k] = listings[viewed[k]].price;
        const auto pick = choose_listing(prices, alpha, rng);
        if (!pick) {
            out.unmatched_bids.push_back(bid);
            continue;
        }
        if (!rng.bernoulli(c.match_probability)) { // deal breaker, listing stays
            out.unmatched_bids.push_back(bid);
            continue;
        }
        const std::size_t idx = viewed[*pick];
        const Listing& l = listings[idx];
        Deal d;
        d.bidder = bid.bidder;
        d.dwelling = l.dwelling;
        d.seller = l.seller;
        d.area = l.area;
        d.price = l.price;
        d.bid_amount = bid.amount;
        d.initial_price = l.initial_price;
        d.loan_offer = bid.loan_offer;
        d.buyer_kind = bid.kind;
        out.deals.push_back(d);
        sold[idx] = true;
        --n_unsold;
        if (n_unsold > 0) {
            for (std::size_t i = listings.size(); i-- > 0;) {
                if (!sold[i]) {
                    min_unsold = listings[i].price;
                    break;
                }
            }
        }
    }
    for (std::size_t i = 0; i < listings.size(); ++i)
        if (!sold[i]) out.unsold_listings.push_back(listings[i]);
    return out;
}

SettleResult settle(const Deal& deal, Household& buyer, Household& seller, Dwelling& dwelling,
                    Bank& bank, std::vector<Mortgage>& book) {
    SettleResult res;
    const double price = deal.price;
    const bool cash = deal.buyer_kind == HouseholdKind::Overseas || deal.loan_offer <= 0.0;
    const double loan = cash ? 0.0 : std::min(deal.loan_offer, price);
    const double deposit = price - loan;
    res.fees = (bank.fin.stamp_duty + bank.fin.purchase_fee) * price;
    if (buyer.liquid < deposit + res.fees) return res; // voided, nothing moved

    // Seller's outstanding mortgage on this dwelling clears from the proceeds.
    double payoff = 0.0;
    for (std::size_t i = 0; i < book.size(); ++i) {
        if (book[i].dwelling == dwelling.id) {
            payoff = book[i].principal;
            book.erase(book.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }

    buyer.liquid -= deposit + res.fees;
    seller.liquid += price - payoff;
    if (loan > 0.0) {
        book.push_back(originate(bank, buyer.id, dwelling.id, loan));
        res.loan_principal = loan;
    }
    res.seller_payoff = payoff;

    std::erase(seller.owned, dwelling.id);
    buyer.owned.push_back(dwelling.id);
    dwelling.owner = buyer.id;
    dwelling.listed = false;
    dwelling.months_on_market = 0;
    dwelling.last_sale_price = price;
    dwelling.occupancy = Dwelling::Occupancy::Vacant; // caller decides who moves in
    res.completed = true;
    return res;
}

std::vector<RentalAssignment> allocate_rentals(const std::vector<const Household*>& tenants,
                                               const std::vector<const Dwelling*>& vacancies,
                                               const FinanceConstants& fin, Rng& rng) {
    struct Slot {
        int dwelling;
        double rent;
    };
    std::vector<Slot> open;
    open.reserve(vacancies.size());
    for (const Dwelling* d : vacancies)
        open.push_back({d->id, fin.rent_yield / 12.0 * d->quality});
    std::sort(open.begin(), open.end(), [](const Slot& a, const Slot& b) {
        if (a.rent != b.rent) return a.rent < b.rent;
        return a.dwelling < b.dwelling;
    });

    std::vector<RentalAssignment> out;
    std::vector<std::size_t> band;
    for (const Household* t : tenants) {
        if (open.empty()) break;
        const double lo = 0.10 * t->monthly_income;
        const double hi = 0.30 * t->monthly_income;
        band.clear();
        std::size_t best_below = open.size(); // most expensive under the band
        std::size_t best_above = open.size(); // cheapest over the band
        for (std::size_t i = 0; i < open.size(); ++i) {
            if (open[i].rent < lo) {
                best_below = i;
            } else if (open[i].rent >= hi) {
                if (best_above == open.size()) best_above = i;
            } else {
                band.push_back(i);
            }
        }
        std::size_t chosen;
        if (!band.empty()) {
            chosen = band[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(band.size()) - 1))];
        } else if (best_below != open.size()) {
            chosen = best_below;
        } else {
            chosen = best_above;
        }
        RentalAssignment a;
        a.tenant = t->id;
        a.dwelling = open[chosen].dwelling;
        a.rent = open[chosen].rent;
        a.duration = static_cast<int>(rng.uniform_int(6, 18));
        out.push_back(a);
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(chosen));
    }
    return out;
}

} // namespace housing
