#include "housing/behavior.hpp"

#include <algorithm>
#include <cmath>

namespace housing {

namespace {
/// Multiplicative heterogeneity: uniform on [1 - w/2, 1 + w/2].
double jitter(const BehaviorConstants& c, Rng& rng) {
    return rng.uniform(1.0 - 0.5 * c.heterogeneity, 1.0 + 0.5 * c.heterogeneity);
}
} // namespace

double urgency_to_buy(const BehaviorConstants& c, int months_since_last_sale) {
    if (months_since_last_sale < 0) return 1.0;
    return 1.0 + c.urgency_rental * months_since_last_sale;
}

double urgency_to_sell(const BehaviorConstants& c, int months_in_stress) {
    return 1.0 + c.urgency_stress * std::max(0, months_in_stress);
}

std::optional<double> bid_price(const BehaviorConstants& c, double h_param,
                                double monthly_income, double mortgage_rate,
                                double house_care_rate, double hpi_yearly_change,
                                double urgency, Rng& rng) {
    const double denom = mortgage_rate + house_care_rate - h_param * hpi_yearly_change;
    const double het = jitter(c, rng); // drawn before any early-out, keeps draw order fixed
    if (denom <= 0.0) return std::nullopt;
    if (monthly_income <= 0.0) return 0.0;
    const double budget = c.income_multiplier * std::pow(monthly_income, c.income_exponent);
    return het * urgency * budget / denom;
}

double list_price(const BehaviorConstants& c, double similar_sales_mean, double sold_to_list,
                  int months_on_market, double urgency_sell, Rng& rng) {
    const double het = jitter(c, rng);
    const double heat = std::pow(std::max(sold_to_list, 1e-12), c.sold_to_list_power);
    const double aging = std::pow(1.0 + std::max(0, months_on_market), c.months_listed_power);
    return het * c.list_markup * similar_sales_mean * heat * aging /
           std::max(urgency_sell, 1e-12);
}

double listing_probability(const BehaviorConstants& c, double beta, double area_fraction,
                           double mean_fraction) {
    const double base = c.base_listing_probability;
    if (beta == 0.0 || mean_fraction <= 0.0) return base;
    const double p = base + base * beta * (area_fraction / mean_fraction - 1.0);
    return std::clamp(p, 0.0, 1.0);
}

double viewing_probability(double alpha, double outreach) {
    return alpha * outreach * outreach;
}

std::optional<std::size_t> choose_listing(std::span<const double> candidate_prices,
                                          double alpha, Rng& rng) {
    const std::size_t n = candidate_prices.size();
    if (n == 0) return std::nullopt;
    if (alpha >= 1.0) return 0;
    if (alpha > 0.0) {
        for (std::size_t k = 0; k < n; ++k)
            if (rng.bernoulli(alpha)) return k;
    }
    // Every candidate rejected (or alpha = 0): indifferent uniform choice.
    return static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
}

} // namespace housing
