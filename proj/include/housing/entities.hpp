#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace housing {

struct InvalidSchedule : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Progressive income tax: `thresholds[i]` opens the bracket taxed at
/// `rates[i]`. Thresholds are annual amounts, strictly increasing, starting
/// at 0.
struct TaxSchedule {
    std::vector<double> thresholds;
    std::vector<double> rates;
};

double income_tax(const TaxSchedule& tax, double annual_income);

/// Level monthly payment that amortizes `principal` at annual `rate` over
/// `months` payments.
double annuity_payment(double principal, double annual_rate, int months);

/// Inverse of annuity_payment: the principal a given monthly payment can
/// service.
double annuity_principal(double payment, double annual_rate, int months);

/// Tunable constants of the financial side of the model: lending rules,
/// transaction costs, recurring consumption and upkeep rates.
struct FinanceConstants {
    double ltv = 0.80;             // loan-to-value midpoint
    double ltv_halfwidth = 0.10;   // per-loan draw is uniform around ltv
    int mortgage_years = 30;
    double serviceability = 0.80;  // income share available for repayments
    double house_tax_rate = 0.004; // annual, on current valuation
    double stamp_duty = 0.025;     // buyer, on price
    double purchase_fee = 0.025;   // buyer, on price
    double income_consumption = 0.30;   // non-housing, share of gross income
    double liquid_consumption = 0.025;  // annual, on positive balances
    double income_growth = 1.002;       // monthly factor midpoint
    double income_growth_halfwidth = 0.001;
    double house_care = 0.0325; // annual upkeep midpoint (also in bid pricing)
    double house_care_halfwidth = 0.0075;
    double rent_yield = 0.03;  // annual rent as a share of dwelling quality
};

enum class HouseholdKind { OwnerOccupier, Renter, LocalInvestor, Overseas, Developer };

struct Household {
    int id = -1;
    HouseholdKind kind = HouseholdKind::Renter;
    double monthly_income = 0.0; // gross
    double liquid = 0.0;
    int area = 0;                        // residence area, or assigned area while unhoused
    std::optional<int> residence;        // dwelling lived in (owned or rented)
    std::vector<int> owned;              // dwelling ids
    double income_growth = 1.002;        // per-household monthly factor
    double house_care_rate = 0.025;      // per-household upkeep rate (annual)
    int months_in_stress = 0;            // consecutive months with negative liquid
    int months_since_last_sale = -1;     // >= 0 while urgent to rebuy after a sale
    bool entered_during_sim = false;
    bool ever_housed = false;
    int entry_month = 0;
};

struct Dwelling {
    enum class Occupancy { OwnerOccupied, Rented, Vacant };

    int id = -1;
    int area = 0;
    double quality = 0.0; // intrinsic value anchor, fixed for life
    int owner = -1;       // household id
    Occupancy occupancy = Occupancy::Vacant;
    bool listed = false;
    int months_on_market = 0;      // while listed
    double last_sale_price = 0.0;  // 0 until first trade
};

struct Mortgage {
    int borrower = -1;
    int dwelling = -1;
    double principal = 0.0; // outstanding
    double annual_rate = 0.0;
    int remaining_months = 0;
    double payment = 0.0; // fixed monthly instalment
};

struct RentalContract {
    int tenant = -1;
    int dwelling = -1;
    double rent = 0.0; // monthly
    int remaining_months = 0;
};

/// Lender state: the current exogenous mortgage rate plus the rules above.
struct Bank {
    double mortgage_rate = 0.05; // annual
    TaxSchedule tax;
    FinanceConstants fin;
};

/// Loan the bank is willing to extend against a bid: the smaller of the
/// loan-to-value share of the bid and the principal serviceable from the
/// household's income at the current rate over the full mortgage term.
double offer_loan(const Bank& bank, double monthly_income, double bid, double ltv_sample);

Mortgage originate(const Bank& bank, int borrower, int dwelling, double principal);

struct MortgagePaymentSplit {
    double interest = 0.0;
    double principal = 0.0;
};

/// Advance one month: pays interest then principal; the final instalment is
/// clipped so the balance lands exactly on zero.
MortgagePaymentSplit advance_month(Mortgage& m);

/// One month of non-market money flow for one household, with the
/// dwelling-related dues computed by the caller. Applied in a fixed order:
/// income, income tax, non-housing consumption, rent flows, upkeep and
/// property tax, mortgage instalments, then liquid consumption on whatever
/// positive balance remains. Ends by updating the stress counter and growing
/// income.
struct CashflowBreakdown {
    double income = 0.0;
    double tax = 0.0;
    double consumption = 0.0;
    double liquid_consumption = 0.0;
    double upkeep = 0.0;
    double property_tax = 0.0;
    double rent_paid = 0.0;
    double rent_received = 0.0;
    double mortgage_interest = 0.0;
    double mortgage_principal = 0.0;
};

CashflowBreakdown monthly_cashflow(Household& h, const Bank& bank, double upkeep_due,
                                   double property_tax_due, double rent_due,
                                   double rent_received, std::span<Mortgage*> mortgages);

} // namespace housing
