#include "housing/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "housing/csv.hpp"
#include "housing/stats.hpp"
#include "json.hpp"

namespace housing {

namespace {
double total_liquid(const std::vector<Household>& hs) {
    double s = 0.0;
    for (const Household& h : hs) s += h.liquid;
    return s;
}
} // namespace

World::World(const Scenario& scn, const RunConfig& cfg)
    : scn_(&scn), cfg_(cfg), graph_(scn.topology), rng_(derive_seed(cfg.seed, "world")) {
    bank_.tax = scn.tax;
    bank_.fin = scn.finance;
    bank_.mortgage_rate = exo_rate(-scn.burn_in);
    init_stock();
}

int World::clamp_forecast(int recorded_month) const {
    if (!cfg_.honor_forecast_boundary) return recorded_month;
    const int train_end = static_cast<int>(std::floor(scn_->train_ratio * scn_->months));
    if (train_end >= 1 && recorded_month >= train_end) return train_end - 1;
    return recorded_month;
}

double World::exo_rate(int recorded_month) const {
    const auto& s = scn_->exo.mortgage_rate;
    const int m = clamp_forecast(recorded_month);
    if (m <= 0) return s.front();
    if (m >= static_cast<int>(s.size())) return s.back();
    return s[static_cast<std::size_t>(m)];
}

double World::exo_overseas_rate(int recorded_month) const {
    const auto& s = scn_->exo.overseas_rate;
    const int m = clamp_forecast(recorded_month);
    if (m <= 0) return s.front();
    if (m >= static_cast<int>(s.size())) return s.back();
    return s[static_cast<std::size_t>(m)];
}

double World::exo_overseas_price(int recorded_month) const {
    const auto& s = scn_->exo.overseas_avg_price;
    const int m = clamp_forecast(recorded_month);
    if (m <= 0) return s.front();
    if (m >= static_cast<int>(s.size())) return s.back();
    return s[static_cast<std::size_t>(m)];
}

double World::exo_total(const std::vector<double>& series, int recorded_month) const {
    // Demographic projections are taken as given over the whole horizon;
    // months before the first record extrapolate the first year's slope back.
    const int n = static_cast<int>(series.size());
    if (recorded_month >= 0)
        return series[static_cast<std::size_t>(std::min(recorded_month, n - 1))];
    const int k = std::min(12, n - 1);
    const double slope = k > 0 ? (series[static_cast<std::size_t>(k)] - series[0]) / k : 0.0;
    return std::max(0.0, series[0] + slope * recorded_month);
}

double World::hpi_at(int step_index) const {
    if (step_index < 0 || hpi_history_.empty()) return hpi_init_;
    return hpi_history_[static_cast<std::size_t>(
        std::min(step_index, static_cast<int>(hpi_history_.size()) - 1))];
}

double World::hpi_yearly_change() const {
    const double now = hpi_at(t_ - 1);
    const double ago = hpi_at(t_ - 13);
    return ago > 0.0 ? (now - ago) / ago : 0.0;
}

double World::valuation_ratio() const {
    return hpi_init_ > 0.0 ? hpi_at(t_ - 1) / hpi_init_ : 1.0;
}

double World::similar_sales_mean(int area, double quality) const {
    const auto& hist = sale_history_[static_cast<std::size_t>(area)];
    if (hist.empty()) return init_median_[static_cast<std::size_t>(area)];
    const std::size_t want = static_cast<std::size_t>(std::max(1, scn_->behavior.similar_sales));
    if (hist.size() <= want) {
        double s = 0.0;
        for (const SaleRecord& r : hist) s += r.price;
        return s / static_cast<double>(hist.size());
    }
    std::vector<std::size_t> idx(hist.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(want - 1), idx.end(),
                     [&hist, quality](std::size_t a, std::size_t b) {
                         const double da = std::abs(hist[a].quality - quality);
                         const double db = std::abs(hist[b].quality - quality);
                         if (da != db) return da < db;
                         if (hist[a].step != hist[b].step) return hist[a].step > hist[b].step;
                         return a < b;
                     });
    double s = 0.0;
    for (std::size_t k = 0; k < want; ++k) s += hist[idx[k]].price;
    return s / static_cast<double>(want);
}

void World::reclassify(Household& h) {
    if (h.kind == HouseholdKind::Developer || h.kind == HouseholdKind::Overseas) return;
    if (h.owned.empty()) {
        h.kind = HouseholdKind::Renter;
        return;
    }
    const bool lives_in_own =
        h.residence && std::find(h.owned.begin(), h.owned.end(), *h.residence) != h.owned.end();
    h.kind = lives_in_own && h.owned.size() == 1 ? HouseholdKind::OwnerOccupier
                                                 : HouseholdKind::LocalInvestor;
}

int World::pick_area(Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t a = 0; a < scn_->population_weights.size(); ++a) {
        acc += scn_->population_weights[a];
        if (u < acc) return static_cast<int>(a);
    }
    return scn_->n_areas() - 1;
}

void World::add_dwelling(int area) {
    Dwelling d;
    d.id = static_cast<int>(dwellings_.size());
    d.area = area;
    d.quality = densities_->area(area).sample(rng_);
    d.owner = developer_;
    d.occupancy = Dwelling::Occupancy::Vacant;
    dwellings_.push_back(d);
    households_[static_cast<std::size_t>(developer_)].owned.push_back(d.id);
}

void World::add_household(int area, bool entered_during_sim) {
    Household h;
    h.id = static_cast<int>(households_.size());
    h.kind = HouseholdKind::Renter;
    h.area = area;
    const auto& brackets = scn_->income_brackets[static_cast<std::size_t>(area)];
    const double annual = sample_bracket(brackets, rng_);
    h.monthly_income = annual / 12.0;
    // Wealth rank mirrors income rank: the liquidity draw sits at the same
    // percentile of the region-wide liquidity distribution.
    h.liquid = bracket_value_at(scn_->liquidity_brackets, bracket_percentile(brackets, annual));
    h.income_growth = rng_.uniform(scn_->finance.income_growth - scn_->finance.income_growth_halfwidth,
                                   scn_->finance.income_growth + scn_->finance.income_growth_halfwidth);
    h.house_care_rate = rng_.uniform(scn_->finance.house_care - scn_->finance.house_care_halfwidth,
                                     scn_->finance.house_care + scn_->finance.house_care_halfwidth);
    h.entered_during_sim = entered_during_sim;
    h.entry_month = recorded_month();
    households_.push_back(h);
    rental_queue_.push_back(h.id);
    if (entered_during_sim) audit_.inflow_migrants += h.liquid;
}

void World::make_developer() {
    Household dev;
    dev.id = 0;
    dev.kind = HouseholdKind::Developer;
    developer_ = 0;
    households_.push_back(dev);
}

void World::init_stock() {
    const int n = scn_->n_areas();
    densities_.emplace(scn_->price_samples, scn_->min_kde_samples);
    init_median_.resize(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a)
        init_median_[static_cast<std::size_t>(a)] = densities_->area(a).median();

    std::vector<double> pooled;
    for (const auto& xs : scn_->price_samples) pooled.insert(pooled.end(), xs.begin(), xs.end());
    hpi_init_ = median_of(pooled);
    region_median_carry_ = hpi_init_;
    region_mean_carry_ = mean_of(pooled);
    area_median_carry_ = init_median_;
    area_mean_carry_.resize(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        const auto& xs = scn_->price_samples[static_cast<std::size_t>(a)];
        area_mean_carry_[static_cast<std::size_t>(a)] =
            xs.empty() ? region_mean_carry_ : mean_of(xs);
    }
    sold_to_list_.assign(static_cast<std::size_t>(n), 1.0);
    sale_history_.resize(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a)
        for (const double p : scn_->price_samples[static_cast<std::size_t>(a)])
            sale_history_[static_cast<std::size_t>(a)].push_back({p, p, -1});

    make_developer();

    const int start = -scn_->burn_in;
    const long n_dw = std::lround(exo_total(scn_->exo.dwellings_total, start) / scn_->scale);
    const long n_hh = std::lround(exo_total(scn_->exo.households_total, start) / scn_->scale);
    if (n_hh > n_dw)
        throw InfeasibleScenario("initial households (" + std::to_string(n_hh) +
                                 ") exceed dwellings (" + std::to_string(n_dw) + ")");

    initial_dwelling_share_.assign(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> unowned(static_cast<std::size_t>(n));
    for (long k = 0; k < n_dw; ++k) {
        const int area = pick_area(rng_);
        Dwelling d;
        d.id = static_cast<int>(dwellings_.size());
        d.area = area;
        d.quality = densities_->area(area).sample(rng_);
        d.owner = -1;
        dwellings_.push_back(d);
        unowned[static_cast<std::size_t>(area)].push_back(d.id);
        ++initial_dwelling_share_[static_cast<std::size_t>(area)];
    }

    for (long k = 0; k < n_hh; ++k) {
        const int area = pick_area(rng_);
        add_household(area, /*entered_during_sim=*/false);
        Household& h = households_.back();
        auto& pool = unowned[static_cast<std::size_t>(area)];
        if (rng_.bernoulli(scn_->owner_share) && !pool.empty()) {
            const std::size_t pickp = static_cast<std::size_t>(
                rng_.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1));
            const int did = pool[pickp];
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pickp));
            Dwelling& d = dwellings_[static_cast<std::size_t>(did)];
            d.owner = h.id;
            d.occupancy = Dwelling::Occupancy::OwnerOccupied;
            h.owned.push_back(did);
            h.residence = did;
            h.ever_housed = true;
            h.kind = HouseholdKind::OwnerOccupier;
            rental_queue_.pop_back(); // add_household queued them
        }
    }

    // Remaining stock goes to randomly drawn resident landlords.
    const int n_local = static_cast<int>(households_.size()) - 1;
    if (n_local > 0) {
        for (auto& pool : unowned) {
            for (const int did : pool) {
                const int owner = static_cast<int>(rng_.uniform_int(1, n_local));
                Dwelling& d = dwellings_[static_cast<std::size_t>(did)];
                d.owner = owner;
                d.occupancy = Dwelling::Occupancy::Vacant;
                households_[static_cast<std::size_t>(owner)].owned.push_back(did);
            }
        }
        for (Household& h : households_) reclassify(h);
    }

    // First pass of the rental market houses the initial renter population.
    phase_rentals();
}

void World::phase_demographics() {
    const int m = recorded_month();
    const long dw_target = std::lround(exo_total(scn_->exo.dwellings_total, m) / scn_->scale);
    while (static_cast<long>(dwellings_.size()) < dw_target) {
        // New construction follows the initial spatial distribution of stock.
        double total = 0.0;
        for (const int c : initial_dwelling_share_) total += c;
        int area = scn_->n_areas() - 1;
        if (total > 0.0) {
            const double u = rng_.uniform() * total;
            double acc = 0.0;
            for (std::size_t a = 0; a < initial_dwelling_share_.size(); ++a) {
                acc += initial_dwelling_share_[a];
                if (u < acc) {
                    area = static_cast<int>(a);
                    break;
                }
            }
        }
        add_dwelling(area);
    }

    long local = 0;
    for (const Household& h : households_)
        if (h.kind != HouseholdKind::Developer && h.kind != HouseholdKind::Overseas) ++local;
    const long hh_target = std::lround(exo_total(scn_->exo.households_total, m) / scn_->scale);
    while (local < hh_target) {
        add_household(pick_area(rng_), /*entered_during_sim=*/true);
        ++local;
    }
}

void World::phase_cashflows() {
    const std::size_t n = households_.size();
    std::vector<double> rent_due(n, 0.0), rent_recv(n, 0.0), upkeep(n, 0.0), property(n, 0.0);
    for (const RentalContract& c : contracts_) {
        rent_due[static_cast<std::size_t>(c.tenant)] += c.rent;
        rent_recv[static_cast<std::size_t>(
            dwellings_[static_cast<std::size_t>(c.dwelling)].owner)] += c.rent;
    }
    const double ratio = valuation_ratio();
    for (const Dwelling& d : dwellings_) {
        if (d.owner == developer_) continue; // construction stock carries no cost
        const Household& h = households_[static_cast<std::size_t>(d.owner)];
        const double value = d.quality * ratio;
        upkeep[static_cast<std::size_t>(d.owner)] += h.house_care_rate * value / 12.0;
        property[static_cast<std::size_t>(d.owner)] +=
            bank_.fin.house_tax_rate * value / 12.0;
    }

    // mortgages_ stays sorted by borrower; walk it in household order.
    std::size_t mi = 0;
    std::vector<Mortgage*> slice;
    for (std::size_t i = 0; i < n; ++i) {
        Household& h = households_[i];
        if (h.kind == HouseholdKind::Developer) continue;
        slice.clear();
        while (mi < mortgages_.size() &&
               mortgages_[mi].borrower < static_cast<int>(i))
            ++mi;
        std::size_t mj = mi;
        while (mj < mortgages_.size() && mortgages_[mj].borrower == static_cast<int>(i))
            slice.push_back(&mortgages_[mj++]);
        const CashflowBreakdown flow =
            monthly_cashflow(h, bank_, upkeep[i], property[i], rent_due[i], rent_recv[i], slice);
        audit_.income += flow.income;
        audit_.tax += flow.tax;
        audit_.consumption += flow.consumption;
        audit_.liquid_consumption += flow.liquid_consumption;
        audit_.upkeep += flow.upkeep;
        audit_.property_tax += flow.property_tax;
        audit_.rent_paid += flow.rent_paid;
        audit_.rent_received += flow.rent_received;
        audit_.mortgage_interest += flow.mortgage_interest;
        audit_.mortgage_principal += flow.mortgage_principal;
    }
    std::erase_if(mortgages_, [](const Mortgage& m) { return m.principal <= 0.0; });
}

void World::phase_rentals() {
    for (RentalContract& c : contracts_) {
        if (--c.remaining_months <= 0)
            c.remaining_months = static_cast<int>(rng_.uniform_int(6, 18)); // stay put, roll over
    }
    if (rental_queue_.empty()) return;

    std::vector<const Household*> tenants;
    tenants.reserve(rental_queue_.size());
    for (const int id : rental_queue_)
        tenants.push_back(&households_[static_cast<std::size_t>(id)]);
    std::vector<const Dwelling*> vacancies;
    for (const Dwelling& d : dwellings_)
        if (d.occupancy == Dwelling::Occupancy::Vacant && !d.listed && d.owner != developer_)
            vacancies.push_back(&d);

    const auto assignments = allocate_rentals(tenants, vacancies, bank_.fin, rng_);
    for (const RentalAssignment& a : assignments)
        house_tenant(a.tenant, a.dwelling, a.rent, a.duration);
}

void World::house_tenant(int household, int dwelling, double rent, int duration) {
    Household& h = households_[static_cast<std::size_t>(household)];
    Dwelling& d = dwellings_[static_cast<std::size_t>(dwelling)];
    contracts_.push_back({household, dwelling, rent, duration});
    d.occupancy = Dwelling::Occupancy::Rented;
    h.residence = dwelling;
    h.area = d.area;
    std::erase(rental_queue_, household);
    if (h.entered_during_sim && !h.ever_housed && recorded_month() >= 0)
        trace_.moves.push_back(
            {recorded_month(), MoverKind::NewRenter, -1, d.area, household});
    h.ever_housed = true;
}

void World::phase_listings() {
    const int n = scn_->n_areas();
    const BehaviorConstants& c = scn_->behavior;

    // Existing listings age one month and refresh their asking price.
    for (Listing& l : open_listings_) {
        Dwelling& d = dwellings_[static_cast<std::size_t>(l.dwelling)];
        ++d.months_on_market;
        const Household& seller = households_[static_cast<std::size_t>(l.seller)];
        l.price = list_price(c, similar_sales_mean(l.area, d.quality),
                             sold_to_list_[static_cast<std::size_t>(l.area)], d.months_on_market,
                             urgency_to_sell(c, seller.months_in_stress), rng_);
    }

    month_listing_count_.assign(static_cast<std::size_t>(n), 0);
    std::vector<int> dwellings_per_area(static_cast<std::size_t>(n), 0);
    for (const Dwelling& d : dwellings_) ++dwellings_per_area[static_cast<std::size_t>(d.area)];
    for (const Listing& l : open_listings_)
        ++month_listing_count_[static_cast<std::size_t>(l.area)];

    month_fractions_.assign(static_cast<std::size_t>(n), 0.0);
    double mean_fraction = 0.0;
    for (int a = 0; a < n; ++a) {
        const auto ai = static_cast<std::size_t>(a);
        month_fractions_[ai] = dwellings_per_area[ai] > 0
                                   ? static_cast<double>(month_listing_count_[ai]) /
                                         dwellings_per_area[ai]
                                   : 0.0;
        mean_fraction += month_fractions_[ai];
    }
    mean_fraction /= n;

    month_p_list_.assign(static_cast<std::size_t>(n), 0.0);
    for (int a = 0; a < n; ++a)
        month_p_list_[static_cast<std::size_t>(a)] = listing_probability(
            c, cfg_.params.beta, month_fractions_[static_cast<std::size_t>(a)], mean_fraction);

    for (Dwelling& d : dwellings_) {
        if (d.listed || d.occupancy == Dwelling::Occupancy::Rented) continue;
        const bool develop = d.owner == developer_;
        const Household& seller = households_[static_cast<std::size_t>(d.owner)];
        // Financial stress pushes owners to sell: the longer the squeeze, the
        // likelier the listing, on top of the area's herding-adjusted rate.
        const double p_this =
            std::min(1.0, month_p_list_[static_cast<std::size_t>(d.area)] +
                              c.stress_listing * seller.months_in_stress);
        if (!develop && !rng_.bernoulli(p_this)) continue;
        d.listed = true;
        d.months_on_market = 0;
        Listing l;
        l.dwelling = d.id;
        l.seller = d.owner;
        l.area = d.area;
        l.price = list_price(c, similar_sales_mean(d.area, d.quality),
                             sold_to_list_[static_cast<std::size_t>(d.area)], 0,
                             urgency_to_sell(c, seller.months_in_stress), rng_);
        l.initial_price = l.price;
        open_listings_.push_back(l);
    }
}

std::vector<Bid> World::phase_bids() {
    const BehaviorConstants& c = scn_->behavior;
    const FinanceConstants& f = scn_->finance;
    const int m = recorded_month();
    const double dhpi = hpi_yearly_change();
    month_dhpi_ = dhpi;
    const double fee_rate = f.stamp_duty + f.purchase_fee;

    std::vector<Bid> bids;
    for (Household& h : households_) {
        if (h.kind == HouseholdKind::Developer || h.kind == HouseholdKind::Overseas) continue;
        // Households that already own enter the buy side only occasionally;
        // unhoused and renting households search every month.
        const bool owner_side =
            h.kind == HouseholdKind::OwnerOccupier || h.kind == HouseholdKind::LocalInvestor;
        if (owner_side && !rng_.bernoulli(c.invest_propensity)) continue;
        const auto desired =
            bid_price(c, cfg_.params.h, h.monthly_income, bank_.mortgage_rate, h.house_care_rate,
                      dhpi, urgency_to_buy(c, h.months_since_last_sale), rng_);
        if (!desired || *desired <= 0.0) continue;
        const double ltv_sample =
            rng_.uniform(f.ltv - f.ltv_halfwidth, f.ltv + f.ltv_halfwidth);
        const double offer = offer_loan(bank_, h.monthly_income, *desired, ltv_sample);
        if (offer < c.downshift_ratio * *desired) continue;
        // Price ceiling the household can actually close on: fees always come
        // from liquid, and the loan cannot exceed the price. With thin cash
        // the fees bind (price <= liquid / fee rate); with enough cash the
        // spare balance tops up the loan-capped budget.
        const double liquid = std::max(h.liquid, 0.0);
        const double financeable = liquid >= fee_rate * offer
                                       ? (liquid + offer) / (1.0 + fee_rate)
                                       : liquid / fee_rate;
        const double amount = std::min(*desired, financeable);
        if (amount <= 0.0) continue;
        Bid b;
        b.bidder = h.id;
        b.amount = amount;
        b.desired = *desired;
        b.loan_offer = offer;
        b.area = h.area;
        b.spatial =
            h.kind == HouseholdKind::Renter || h.kind == HouseholdKind::OwnerOccupier;
        b.kind = h.kind;
        bids.push_back(b);
    }

    // Overseas cohort: the scaled monthly approval count enters at the average
    // approved price, fully funded; fractional counts are dropped.
    const int arrivals = static_cast<int>(std::floor(exo_overseas_rate(m) / scn_->scale));
    const double avg_price = exo_overseas_price(m);
    for (int k = 0; k < arrivals; ++k) {
        Household h;
        h.id = static_cast<int>(households_.size());
        h.kind = HouseholdKind::Overseas;
        h.liquid = avg_price * (1.0 + fee_rate);
        h.entry_month = m;
        h.entered_during_sim = true;
        households_.push_back(h);
        audit_.inflow_overseas += h.liquid;
        Bid b;
        b.bidder = h.id;
        b.amount = avg_price;
        b.desired = avg_price;
        b.loan_offer = 0.0;
        b.spatial = false;
        b.kind = HouseholdKind::Overseas;
        bids.push_back(b);
    }
    for (const Bid& b : overseas_carry_) bids.push_back(b);
    overseas_carry_.clear();
    return bids;
}

void World::phase_match_and_settle(std::vector<Bid> bids) {
    const int m = recorded_month();
    MatchOutcome out = match(std::move(bids), std::move(open_listings_), scn_->behavior,
                             cfg_.params.alpha, &graph_, rng_);
    open_listings_ = std::move(out.unsold_listings);
    for (const Bid& b : out.unmatched_bids)
        if (b.kind == HouseholdKind::Overseas) overseas_carry_.push_back(b);

    bool book_dirty = false;
    for (const Deal& deal : out.deals) {
        Household& buyer = households_[static_cast<std::size_t>(deal.bidder)];
        Household& seller = households_[static_cast<std::size_t>(deal.seller)];
        Dwelling& dwelling = dwellings_[static_cast<std::size_t>(deal.dwelling)];
        const SettleResult res = settle(deal, buyer, seller, dwelling, bank_, mortgages_);
        if (!res.completed) {
            Listing back;
            back.dwelling = deal.dwelling;
            back.seller = deal.seller;
            back.area = deal.area;
            back.price = deal.price;
            back.initial_price = deal.initial_price;
            open_listings_.push_back(back);
            if (deal.buyer_kind == HouseholdKind::Overseas) {
                Bid retry;
                retry.bidder = deal.bidder;
                retry.amount = deal.bid_amount;
                retry.desired = deal.bid_amount;
                retry.spatial = false;
                retry.kind = HouseholdKind::Overseas;
                overseas_carry_.push_back(retry);
            }
            continue;
        }
        book_dirty = book_dirty || res.loan_principal > 0.0 || res.seller_payoff > 0.0;
        audit_.fees += res.fees;
        audit_.payoffs += res.seller_payoff;
        audit_.disbursements += res.loan_principal;

        sale_history_[static_cast<std::size_t>(deal.area)].push_back(
            {dwelling.quality, deal.price, t_});
        month_sold_to_list_[static_cast<std::size_t>(deal.area)].push_back(
            deal.initial_price > 0.0 ? deal.price / deal.initial_price : 1.0);
        month_deals_.push_back({m, deal.area, deal.price, deal.initial_price, deal.buyer_kind});

        // Seller transitions: losing the roof over your head starts the
        // urgent-rebuy clock and sends you to the rental queue.
        seller.months_since_last_sale = 0;
        if (seller.residence && *seller.residence == deal.dwelling) {
            seller.residence.reset();
            rental_queue_.push_back(seller.id);
        }
        reclassify(seller);

        buyer.months_since_last_sale = -1;
        const int from_area = buyer.residence ? buyer.area : -1;
        MoverKind mover = MoverKind::LocalInvestor;
        switch (deal.buyer_kind) {
        case HouseholdKind::Renter: {
            for (std::size_t i = 0; i < contracts_.size(); ++i) {
                if (contracts_[i].tenant == buyer.id) {
                    dwellings_[static_cast<std::size_t>(contracts_[i].dwelling)].occupancy =
                        Dwelling::Occupancy::Vacant;
                    contracts_.erase(contracts_.begin() + static_cast<std::ptrdiff_t>(i));
                    break;
                }
            }
            std::erase(rental_queue_, buyer.id);
            buyer.residence = deal.dwelling;
            buyer.area = dwelling.area;
            buyer.ever_housed = true;
            dwelling.occupancy = Dwelling::Occupancy::OwnerOccupied;
            mover = buyer.entered_during_sim ? MoverKind::NewOwner : MoverKind::FirstTimeBuyer;
            break;
        }
        case HouseholdKind::OwnerOccupier:
        case HouseholdKind::LocalInvestor:
            mover = MoverKind::LocalInvestor; // extra stock goes to the rental pool
            break;
        case HouseholdKind::Overseas:
            mover = MoverKind::OverseasInvestor;
            break;
        case HouseholdKind::Developer:
            break;
        }
        reclassify(buyer);
        if (m >= 0)
            trace_.moves.push_back({m, mover,
                                    deal.buyer_kind == HouseholdKind::Overseas ? -1 : from_area,
                                    dwelling.area, buyer.id});
    }
    if (book_dirty)
        std::sort(mortgages_.begin(), mortgages_.end(), [](const Mortgage& a, const Mortgage& b) {
            if (a.borrower != b.borrower) return a.borrower < b.borrower;
            return a.dwelling < b.dwelling;
        });
}

void World::phase_indicators() {
    const int n = scn_->n_areas();
    const int m = recorded_month();

    std::vector<double> prices;
    std::vector<std::vector<double>> area_prices(static_cast<std::size_t>(n));
    for (const DealRecord& d : month_deals_) {
        prices.push_back(d.price);
        area_prices[static_cast<std::size_t>(d.area)].push_back(d.price);
    }
    if (!prices.empty()) {
        region_median_carry_ = median_of(prices);
        region_mean_carry_ = mean_of(prices);
    }
    for (int a = 0; a < n; ++a) {
        const auto ai = static_cast<std::size_t>(a);
        if (!area_prices[ai].empty()) {
            area_median_carry_[ai] = median_of(area_prices[ai]);
            area_mean_carry_[ai] = mean_of(area_prices[ai]);
        }
        if (!month_sold_to_list_[ai].empty())
            sold_to_list_[ai] = mean_of(month_sold_to_list_[ai]);
    }

    last_months_prices_.push_back(prices);
    while (last_months_prices_.size() > 3) last_months_prices_.pop_front();
    std::vector<double> window;
    for (const auto& v : last_months_prices_) window.insert(window.end(), v.begin(), v.end());
    const double hpi = window.empty() ? hpi_at(t_ - 1) : median_of(window);
    hpi_history_.push_back(hpi);

    // Old sale records age out; each area keeps at least a core of the most
    // recent trades so the similar-sales anchor never goes stale-empty.
    const std::size_t min_keep =
        static_cast<std::size_t>(std::max(1, scn_->behavior.similar_sales));
    for (auto& hist : sale_history_) {
        if (hist.size() <= min_keep) continue;
        std::vector<SaleRecord> pruned;
        pruned.reserve(hist.size());
        for (const SaleRecord& r : hist)
            if (r.step >= t_ - 24) pruned.push_back(r);
        if (pruned.size() >= min_keep) {
            hist = std::move(pruned);
        } else {
            hist.erase(hist.begin(),
                       hist.end() - static_cast<std::ptrdiff_t>(min_keep));
        }
    }

    if (m >= 0) {
        MonthRow row;
        row.month = m;
        row.region_median = region_median_carry_;
        row.region_mean = region_mean_carry_;
        row.hpi = hpi;
        row.hpi_yearly_change = month_dhpi_;
        row.deals = static_cast<int>(month_deals_.size());
        row.dwellings = static_cast<int>(dwellings_.size());
        int total_listings = 0;
        for (const int c : month_listing_count_) total_listings += c;
        row.listings = total_listings;

        std::vector<int> residents(static_cast<std::size_t>(n), 0);
        int locals = 0;
        for (const Household& h : households_) {
            if (h.kind == HouseholdKind::Developer || h.kind == HouseholdKind::Overseas)
                continue;
            ++residents[static_cast<std::size_t>(h.area)];
            ++locals;
        }
        row.households = locals;

        row.areas.resize(static_cast<std::size_t>(n));
        for (int a = 0; a < n; ++a) {
            const auto ai = static_cast<std::size_t>(a);
            AreaMonth& am = row.areas[ai];
            am.median_price = area_median_carry_[ai];
            am.mean_price = area_mean_carry_[ai];
            am.deals = static_cast<int>(area_prices[ai].size());
            am.listings = month_listing_count_[ai];
            am.listings_fraction = month_fractions_[ai];
            am.sold_to_list = sold_to_list_[ai];
            am.p_list = month_p_list_[ai];
            am.households = residents[ai];
        }
        for (const DealRecord& d : month_deals_) trace_.deals.push_back(d);
        trace_.months.push_back(std::move(row));

        audit_.liquid_after = total_liquid(households_);
        trace_.audits.push_back(audit_);
    }

    month_deals_.clear();
    for (auto& v : month_sold_to_list_) v.clear();
}

void World::step() {
    const int m = recorded_month();
    bank_.mortgage_rate = exo_rate(m);
    audit_ = AuditRow{};
    audit_.month = m;
    audit_.liquid_before = total_liquid(households_);
    month_sold_to_list_.resize(static_cast<std::size_t>(scn_->n_areas()));
    month_deals_.clear();

    phase_demographics();
    phase_cashflows();
    phase_rentals();
    phase_listings();
    phase_match_and_settle(phase_bids());
    phase_indicators();
    ++t_;
}

SimulationTrace World::run() {
    const int months = cfg_.months < 0 ? scn_->months : std::min(cfg_.months, scn_->months);
    const int total = scn_->burn_in + months;
    while (t_ < total) step();
    return trace_;
}

std::vector<std::string> World::check_invariants() const {
    std::vector<std::string> bad;
    auto complain = [&bad](const std::string& s) {
        if (bad.size() < 32) bad.push_back(s);
    };

    std::vector<int> resident_of(dwellings_.size(), -1);
    for (const Household& h : households_) {
        for (const int did : h.owned) {
            if (did < 0 || did >= static_cast<int>(dwellings_.size())) {
                complain("household " + std::to_string(h.id) + " owns invalid dwelling");
                continue;
            }
            if (dwellings_[static_cast<std::size_t>(did)].owner != h.id)
                complain("ownership mismatch on dwelling " + std::to_string(did));
        }
        if (h.residence) {
            if (*h.residence < 0 || *h.residence >= static_cast<int>(dwellings_.size())) {
                complain("household " + std::to_string(h.id) + " resides in invalid dwelling");
            } else if (resident_of[static_cast<std::size_t>(*h.residence)] != -1) {
                complain("two households share dwelling " + std::to_string(*h.residence));
            } else {
                resident_of[static_cast<std::size_t>(*h.residence)] = h.id;
            }
        }
    }
    for (const Dwelling& d : dwellings_) {
        if (d.owner < 0 || d.owner >= static_cast<int>(households_.size())) {
            complain("dwelling " + std::to_string(d.id) + " has no owner");
            continue;
        }
        const auto& owned = households_[static_cast<std::size_t>(d.owner)].owned;
        if (std::find(owned.begin(), owned.end(), d.id) == owned.end())
            complain("dwelling " + std::to_string(d.id) + " missing from owner's list");
        if (d.occupancy == Dwelling::Occupancy::Rented && d.listed)
            complain("dwelling " + std::to_string(d.id) + " rented while listed");
    }

    std::vector<int> contract_count(dwellings_.size(), 0);
    for (const RentalContract& c : contracts_) {
        ++contract_count[static_cast<std::size_t>(c.dwelling)];
        const Dwelling& d = dwellings_[static_cast<std::size_t>(c.dwelling)];
        if (d.occupancy != Dwelling::Occupancy::Rented)
            complain("contract on non-rented dwelling " + std::to_string(c.dwelling));
        const Household& t = households_[static_cast<std::size_t>(c.tenant)];
        if (!t.residence || *t.residence != c.dwelling)
            complain("tenant " + std::to_string(c.tenant) + " not living in contract dwelling");
    }
    for (const Dwelling& d : dwellings_) {
        const int cc = contract_count[static_cast<std::size_t>(d.id)];
        if (d.occupancy == Dwelling::Occupancy::Rented && cc != 1)
            complain("rented dwelling " + std::to_string(d.id) + " has " + std::to_string(cc) +
                     " contracts");
        if (d.occupancy != Dwelling::Occupancy::Rented && cc != 0)
            complain("contract on dwelling " + std::to_string(d.id) + " not marked rented");
        if (d.occupancy == Dwelling::Occupancy::OwnerOccupied) {
            const int res = resident_of[static_cast<std::size_t>(d.id)];
            if (res != d.owner)
                complain("owner-occupied dwelling " + std::to_string(d.id) +
                         " not occupied by owner");
        }
        if (d.occupancy == Dwelling::Occupancy::Vacant &&
            resident_of[static_cast<std::size_t>(d.id)] != -1)
            complain("vacant dwelling " + std::to_string(d.id) + " has a resident");
    }

    for (const Household& h : households_) {
        if (h.kind == HouseholdKind::Developer || h.kind == HouseholdKind::Overseas) {
            if (h.residence) complain("non-resident household " + std::to_string(h.id) +
                                      " has a residence");
            continue;
        }
        if (!h.residence &&
            std::find(rental_queue_.begin(), rental_queue_.end(), h.id) == rental_queue_.end())
            complain("household " + std::to_string(h.id) + " unhoused and not queued");
    }

    for (const Mortgage& mo : mortgages_) {
        if (mo.borrower < 0 || mo.borrower >= static_cast<int>(households_.size()) ||
            mo.dwelling < 0 || mo.dwelling >= static_cast<int>(dwellings_.size())) {
            complain("mortgage with invalid parties");
            continue;
        }
        if (dwellings_[static_cast<std::size_t>(mo.dwelling)].owner != mo.borrower)
            complain("mortgage borrower no longer owns dwelling " + std::to_string(mo.dwelling));
    }
    return bad;
}

SimulationTrace simulate(const Scenario& scn, const RunConfig& cfg) {
    World w(scn, cfg);
    return w.run();
}

EnsembleSummary summarize(const std::vector<SimulationTrace>& traces) {
    EnsembleSummary s;
    s.runs = static_cast<int>(traces.size());
    if (traces.empty()) return s;
    std::size_t months = traces.front().months.size();
    for (const auto& t : traces) months = std::min(months, t.months.size());
    s.months = static_cast<int>(months);

    std::vector<double> col(traces.size());
    for (std::size_t mth = 0; mth < months; ++mth) {
        for (std::size_t r = 0; r < traces.size(); ++r)
            col[r] = traces[r].months[mth].region_median;
        s.mean.push_back(mean_of(col));
        s.median.push_back(median_of(col));
        s.min.push_back(*std::min_element(col.begin(), col.end()));
        s.max.push_back(*std::max_element(col.begin(), col.end()));
        s.sd.push_back(stddev_of(col));
    }

    if (months > 0) {
        const std::size_t n_areas = traces.front().months.back().areas.size();
        for (std::size_t a = 0; a < n_areas; ++a) {
            for (std::size_t r = 0; r < traces.size(); ++r)
                col[r] = traces[r].months[months - 1].areas[a].median_price;
            s.area_final_mean.push_back(mean_of(col));
            s.area_final_sd.push_back(stddev_of(col));
        }
    }
    return s;
}

MonteCarloResult monte_carlo(const Scenario& scn, const RunConfig& cfg, int runs, int jobs) {
    MonteCarloResult result;
    if (runs <= 0) return result;
    result.traces.resize(static_cast<std::size_t>(runs));

    jobs = std::max(1, std::min(jobs, runs));
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= runs) return;
            try {
                RunConfig rc = cfg;
                rc.seed = derive_seed(cfg.seed, "run", static_cast<std::uint64_t>(i));
                result.traces[static_cast<std::size_t>(i)] = simulate(scn, rc);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    result.summary = summarize(result.traces);
    return result;
}

std::string Provenance::line() const {
    char buf[128];
    std::snprintf(buf, sizeof buf, "# housing-abm v%s seed=%llu config=%016llx", version.c_str(),
                  static_cast<unsigned long long>(seed),
                  static_cast<unsigned long long>(config_hash));
    return buf;
}

const char* to_string(HouseholdKind k) {
    switch (k) {
    case HouseholdKind::OwnerOccupier: return "owner_occupier";
    case HouseholdKind::Renter: return "renter";
    case HouseholdKind::LocalInvestor: return "local_investor";
    case HouseholdKind::Overseas: return "overseas";
    case HouseholdKind::Developer: return "developer";
    }
    return "?";
}

const char* to_string(MoverKind k) {
    switch (k) {
    case MoverKind::NewRenter: return "new_renter";
    case MoverKind::NewOwner: return "new_owner";
    case MoverKind::FirstTimeBuyer: return "first_time_buyer";
    case MoverKind::LocalInvestor: return "local_investor";
    case MoverKind::OverseasInvestor: return "overseas_investor";
    }
    return "?";
}

void write_trace_csv(const SimulationTrace& tr, const Scenario& scn, const std::string& path,
                     const Provenance& prov) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write " + path);
    out << prov.line() << "\n";
    out << "month,area,median_price,mean_price,hpi,deals,listings,listings_fraction,"
           "sold_to_list,p_list,households\n";
    for (const MonthRow& r : tr.months) {
        const double frac =
            r.dwellings > 0 ? static_cast<double>(r.listings) / r.dwellings : 0.0;
        double p_mean = 0.0, stl_mean = 0.0;
        for (const AreaMonth& a : r.areas) {
            p_mean += a.p_list;
            stl_mean += a.sold_to_list;
        }
        const double n_areas = r.areas.empty() ? 1.0 : static_cast<double>(r.areas.size());
        out << r.month << ",region," << fmt_double(r.region_median) << ","
            << fmt_double(r.region_mean) << "," << fmt_double(r.hpi) << "," << r.deals << ","
            << r.listings << "," << fmt_double(frac) << "," << fmt_double(stl_mean / n_areas)
            << "," << fmt_double(p_mean / n_areas) << "," << r.households << "\n";
        for (std::size_t a = 0; a < r.areas.size(); ++a) {
            const AreaMonth& am = r.areas[a];
            out << r.month << "," << scn.area_names[a] << "," << fmt_double(am.median_price)
                << "," << fmt_double(am.mean_price) << "," << fmt_double(r.hpi) << ","
                << am.deals << "," << am.listings << "," << fmt_double(am.listings_fraction)
                << "," << fmt_double(am.sold_to_list) << "," << fmt_double(am.p_list) << ","
                << am.households << "\n";
        }
    }
}

void write_deals_csv(const SimulationTrace& tr, const Scenario& scn, const std::string& path,
                     const Provenance& prov) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write " + path);
    out << prov.line() << "\n";
    out << "month,area,price,initial_price,buyer_kind\n";
    for (const DealRecord& d : tr.deals)
        out << d.month << "," << scn.area_names[static_cast<std::size_t>(d.area)] << ","
            << fmt_double(d.price) << "," << fmt_double(d.initial_price) << ","
            << to_string(d.buyer_kind) << "\n";
}

void write_moves_csv(const SimulationTrace& tr, const Scenario& scn, const std::string& path,
                     const Provenance& prov) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write " + path);
    out << prov.line() << "\n";
    out << "month,kind,from_area,to_area,household\n";
    for (const MovementRecord& mv : tr.moves)
        out << mv.month << "," << to_string(mv.kind) << ","
            << (mv.from_area < 0 ? std::string("outside")
                                 : scn.area_names[static_cast<std::size_t>(mv.from_area)])
            << "," << scn.area_names[static_cast<std::size_t>(mv.to_area)] << "," << mv.household
            << "\n";
}

void write_summary_json(const MonteCarloResult& mc, const Scenario& scn, const std::string& path,
                        const Provenance& prov) {
    nlohmann::json j;
    j["provenance"] = {{"version", prov.version},
                       {"seed", prov.seed},
                       {"config_hash", prov.config_hash}};
    j["runs"] = mc.summary.runs;
    j["months"] = mc.summary.months;
    j["region_median"] = {{"mean", mc.summary.mean},
                          {"median", mc.summary.median},
                          {"min", mc.summary.min},
                          {"max", mc.summary.max},
                          {"sd", mc.summary.sd}};
    j["area_final"] = {{"names", scn.area_names},
                       {"mean", mc.summary.area_final_mean},
                       {"sd", mc.summary.area_final_sd}};
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write " + path);
    out << j.dump(2) << "\n";
}

} // namespace housing
