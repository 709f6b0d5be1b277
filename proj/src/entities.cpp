#include "housing/entities.hpp"

#include <algorithm>
#include <cmath>

namespace housing {

double income_tax(const TaxSchedule& tax, double annual_income) {
    if (tax.thresholds.size() != tax.rates.size() || tax.thresholds.empty())
        throw InvalidSchedule("tax schedule needs matching thresholds and rates");
    if (annual_income <= 0.0) return 0.0;
    double due = 0.0;
    for (std::size_t i = 0; i < tax.thresholds.size(); ++i) {
        const double lo = tax.thresholds[i];
        if (annual_income <= lo) break;
        const double hi =
            i + 1 < tax.thresholds.size() ? tax.thresholds[i + 1] : annual_income;
        due += tax.rates[i] * (std::min(annual_income, hi) - lo);
    }
    return due;
}

double annuity_payment(double principal, double annual_rate, int months) {
    if (months <= 0 || principal <= 0.0) return 0.0;
    const double r = annual_rate / 12.0;
    if (r <= 0.0) return principal / months;
    const double f = std::pow(1.0 + r, -months);
    return principal * r / (1.0 - f);
}

double annuity_principal(double payment, double annual_rate, int months) {
    if (months <= 0 || payment <= 0.0) return 0.0;
    const double r = annual_rate / 12.0;
    if (r <= 0.0) return payment * months;
    const double f = std::pow(1.0 + r, -months);
    return payment * (1.0 - f) / r;
}

double offer_loan(const Bank& bank, double monthly_income, double bid, double ltv_sample) {
    if (bid <= 0.0 || monthly_income <= 0.0) return 0.0;
    const double by_value = ltv_sample * bid;
    const double by_income = annuity_principal(bank.fin.serviceability * monthly_income,
                                               bank.mortgage_rate, bank.fin.mortgage_years * 12);
    return std::min(by_value, by_income);
}

Mortgage originate(const Bank& bank, int borrower, int dwelling, double principal) {
    Mortgage m;
    m.borrower = borrower;
    m.dwelling = dwelling;
    m.principal = principal;
    m.annual_rate = bank.mortgage_rate;
    m.remaining_months = bank.fin.mortgage_years * 12;
    m.payment = annuity_payment(principal, bank.mortgage_rate, m.remaining_months);
    return m;
}

MortgagePaymentSplit advance_month(Mortgage& m) {
    MortgagePaymentSplit split;
    if (m.remaining_months <= 0 || m.principal <= 0.0) {
        m.principal = 0.0;
        m.remaining_months = 0;
        return split;
    }
    split.interest = m.principal * m.annual_rate / 12.0;
    split.principal = std::min(m.payment - split.interest, m.principal);
    if (m.remaining_months == 1) split.principal = m.principal; // close out exactly
    m.principal -= split.principal;
    --m.remaining_months;
    if (m.principal < 1e-9) {
        m.principal = 0.0;
        m.remaining_months = 0;
    }
    return split;
}

CashflowBreakdown monthly_cashflow(Household& h, const Bank& bank, double upkeep_due,
                                   double property_tax_due, double rent_due,
                                   double rent_received, std::span<Mortgage*> mortgages) {
    CashflowBreakdown flow;
    flow.income = h.monthly_income;
    flow.tax = income_tax(bank.tax, 12.0 * h.monthly_income) / 12.0;
    flow.consumption = bank.fin.income_consumption * h.monthly_income;
    flow.rent_paid = rent_due;
    flow.rent_received = rent_received;
    flow.upkeep = upkeep_due;
    flow.property_tax = property_tax_due;

    h.liquid += flow.income - flow.tax - flow.consumption + rent_received - rent_due -
                upkeep_due - property_tax_due;

    for (Mortgage* m : mortgages) {
        const MortgagePaymentSplit split = advance_month(*m);
        flow.mortgage_interest += split.interest;
        flow.mortgage_principal += split.principal;
        h.liquid -= split.interest + split.principal;
    }

    if (h.liquid > 0.0) {
        flow.liquid_consumption = h.liquid * bank.fin.liquid_consumption / 12.0;
        h.liquid -= flow.liquid_consumption;
    }

    h.months_in_stress = h.liquid < 0.0 ? h.months_in_stress + 1 : 0;
    if (h.months_since_last_sale >= 0) ++h.months_since_last_sale;
    h.monthly_income *= h.income_growth;
    return flow;
}

} // namespace housing
