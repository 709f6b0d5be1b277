#include "housing/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "housing/csv.hpp"
#include "json.hpp"

namespace housing {

using nlohmann::json;
namespace fs = std::filesystem;

double sample_bracket(const std::vector<Bracket>& brackets, Rng& rng) {
    if (brackets.empty()) throw ScenarioError("empty bracket list");
    double total = 0.0;
    for (const Bracket& b : brackets) total += b.weight;
    double u = rng.uniform() * total;
    for (const Bracket& b : brackets) {
        if (u < b.weight || &b == &brackets.back())
            return rng.uniform(b.low, b.high);
        u -= b.weight;
    }
    return brackets.back().low;
}

double bracket_percentile(const std::vector<Bracket>& brackets, double value) {
    double total = 0.0;
    for (const Bracket& b : brackets) total += b.weight;
    if (total <= 0.0) return 0.0;
    double acc = 0.0;
    for (const Bracket& b : brackets) {
        if (value >= b.high) {
            acc += b.weight;
        } else if (value > b.low) {
            acc += b.weight * (value - b.low) / (b.high - b.low);
            break;
        } else {
            break;
        }
    }
    return acc / total;
}

double bracket_value_at(const std::vector<Bracket>& brackets, double pct) {
    if (brackets.empty()) throw ScenarioError("empty bracket list");
    double total = 0.0;
    for (const Bracket& b : brackets) total += b.weight;
    double target = std::clamp(pct, 0.0, 1.0) * total;
    for (const Bracket& b : brackets) {
        if (target <= b.weight || &b == &brackets.back()) {
            const double frac = b.weight > 0.0 ? std::clamp(target / b.weight, 0.0, 1.0) : 0.0;
            return b.low + frac * (b.high - b.low);
        }
        target -= b.weight;
    }
    return brackets.back().high;
}

void validate_scenario(Scenario& s) {
    const int n = s.n_areas();
    if (n <= 0) throw ScenarioError("scenario has no areas");
    if (s.topology.n_areas != n) throw ScenarioError("topology size does not match area list");
    if (static_cast<int>(s.population_weights.size()) != n)
        throw ScenarioError("population weight per area required");
    if (static_cast<int>(s.price_samples.size()) != n)
        throw ScenarioError("sale sample list per area required");
    if (static_cast<int>(s.income_brackets.size()) != n)
        throw ScenarioError("income brackets per area required");
    if (s.liquidity_brackets.empty()) throw ScenarioError("liquidity brackets required");
    if (s.months < 1) throw ScenarioError("months must be >= 1");
    if (s.burn_in < 0) throw ScenarioError("burn_in must be >= 0");
    if (s.scale <= 0.0) throw ScenarioError("scale must be positive");
    if (s.exo.size() < s.months) throw ScenarioError("exogenous series shorter than months");
    if (static_cast<int>(s.exo.overseas_rate.size()) < s.months ||
        static_cast<int>(s.exo.overseas_avg_price.size()) < s.months ||
        static_cast<int>(s.exo.households_total.size()) < s.months ||
        static_cast<int>(s.exo.dwellings_total.size()) < s.months)
        throw ScenarioError("all exogenous columns must cover every month");

    double wsum = 0.0;
    for (const double w : s.population_weights) {
        if (w < 0.0) throw ScenarioError("negative population weight");
        wsum += w;
    }
    if (wsum <= 0.0) throw ScenarioError("population weights sum to zero");
    for (double& w : s.population_weights) w /= wsum;

    bool any_samples = false;
    for (const auto& xs : s.price_samples)
        for (const double p : xs) {
            if (p <= 0.0) throw ScenarioError("non-positive sale price sample");
            any_samples = true;
        }
    if (!any_samples) throw ScenarioError("at least one area needs sale samples");

    RegionGraph check(s.topology); // throws DisconnectedGraph when not connected
    (void)check;
}

namespace {

json brackets_to_json(const std::vector<Bracket>& bs) {
    json arr = json::array();
    for (const Bracket& b : bs)
        arr.push_back({{"low", b.low}, {"high", b.high}, {"weight", b.weight}});
    return arr;
}

std::vector<Bracket> brackets_from_json(const json& arr, const std::string& what) {
    std::vector<Bracket> out;
    if (!arr.is_array()) throw ScenarioError(what + " must be an array");
    for (const auto& e : arr)
        out.push_back({e.at("low").get<double>(), e.at("high").get<double>(),
                       e.at("weight").get<double>()});
    return out;
}

} // namespace

Scenario load_scenario(const std::string& dir) {
    Scenario s;
    const fs::path base(dir);

    std::ifstream cfg(base / "scenario.json");
    if (!cfg) throw ScenarioError("missing scenario.json in " + dir);
    json j;
    try {
        cfg >> j;
    } catch (const std::exception& e) {
        throw ScenarioError(std::string("scenario.json parse error: ") + e.what());
    }

    try {
        s.scale = j.value("scale", 100.0);
        s.months = j.value("months", 48);
        s.burn_in = j.value("burn_in", 12);
        s.train_ratio = j.value("train_ratio", 0.75);
        s.owner_share = j.value("owner_share", 0.65);
        s.min_kde_samples = j.value("min_kde_samples", 30);
        if (j.contains("params")) {
            s.params.h = j["params"].value("h", 0.0);
            s.params.beta = j["params"].value("beta", 0.0);
            s.params.alpha = j["params"].value("alpha", 0.5);
        }
        if (j.contains("behavior")) {
            const json& b = j["behavior"];
            BehaviorConstants& c = s.behavior;
            c.income_multiplier = b.value("income_multiplier", c.income_multiplier);
            c.income_exponent = b.value("income_exponent", c.income_exponent);
            c.heterogeneity = b.value("heterogeneity", c.heterogeneity);
            c.list_markup = b.value("list_markup", c.list_markup);
            c.sold_to_list_power = b.value("sold_to_list_power", c.sold_to_list_power);
            c.months_listed_power = b.value("months_listed_power", c.months_listed_power);
            c.base_listing_probability =
                b.value("base_listing_probability", c.base_listing_probability);
            c.similar_sales = b.value("similar_sales", c.similar_sales);
            c.urgency_stress = b.value("urgency_stress", c.urgency_stress);
            c.urgency_rental = b.value("urgency_rental", c.urgency_rental);
            c.urgency_cash = b.value("urgency_cash", c.urgency_cash);
            c.match_probability = b.value("match_probability", c.match_probability);
            c.downshift_ratio = b.value("downshift_ratio", c.downshift_ratio);
            c.invest_propensity = b.value("invest_propensity", c.invest_propensity);
            c.stress_listing = b.value("stress_listing", c.stress_listing);
        }
        if (j.contains("finance")) {
            const json& f = j["finance"];
            FinanceConstants& c = s.finance;
            c.ltv = f.value("ltv", c.ltv);
            c.ltv_halfwidth = f.value("ltv_halfwidth", c.ltv_halfwidth);
            c.mortgage_years = f.value("mortgage_years", c.mortgage_years);
            c.serviceability = f.value("serviceability", c.serviceability);
            c.house_tax_rate = f.value("house_tax_rate", c.house_tax_rate);
            c.stamp_duty = f.value("stamp_duty", c.stamp_duty);
            c.purchase_fee = f.value("purchase_fee", c.purchase_fee);
            c.income_consumption = f.value("income_consumption", c.income_consumption);
            c.liquid_consumption = f.value("liquid_consumption", c.liquid_consumption);
            c.income_growth = f.value("income_growth", c.income_growth);
            c.income_growth_halfwidth =
                f.value("income_growth_halfwidth", c.income_growth_halfwidth);
            c.house_care = f.value("house_care", c.house_care);
            c.house_care_halfwidth = f.value("house_care_halfwidth", c.house_care_halfwidth);
            c.rent_yield = f.value("rent_yield", c.rent_yield);
        }
        if (j.contains("tax")) {
            s.tax.thresholds = j["tax"].at("thresholds").get<std::vector<double>>();
            s.tax.rates = j["tax"].at("rates").get<std::vector<double>>();
        }
        s.liquidity_brackets =
            brackets_from_json(j.at("liquidity_brackets"), "liquidity_brackets");
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario.json field error: ") + e.what());
    }

    // areas.csv fixes the area order; every other file resolves names into it.
    const auto area_rows = csv_read((base / "areas.csv").string());
    if (area_rows.size() < 2) throw ScenarioError("areas.csv has no data rows");
    for (std::size_t r = 1; r < area_rows.size(); ++r) {
        if (area_rows[r].size() < 2) throw ScenarioError("areas.csv row needs 2 fields");
        s.area_names.push_back(area_rows[r][0]);
        s.population_weights.push_back(csv_double(area_rows[r][1], "areas.csv"));
    }
    auto area_index = [&s](const std::string& name, const std::string& file) {
        for (std::size_t i = 0; i < s.area_names.size(); ++i)
            if (s.area_names[i] == name) return static_cast<int>(i);
        throw ScenarioError("unknown area '" + name + "' in " + file);
    };

    const auto edge_rows = csv_read((base / "edges.csv").string());
    std::vector<std::pair<int, int>> edges;
    for (std::size_t r = 1; r < edge_rows.size(); ++r) {
        if (edge_rows[r].size() < 2) throw ScenarioError("edges.csv row needs 2 fields");
        edges.emplace_back(area_index(edge_rows[r][0], "edges.csv"),
                           area_index(edge_rows[r][1], "edges.csv"));
    }
    s.topology = s.n_areas() == 1 && edges.empty()
                     ? Topology::singleton()
                     : Topology::adjacency(s.n_areas(), std::move(edges));

    s.price_samples.assign(s.area_names.size(), {});
    const auto sale_rows = csv_read((base / "sales.csv").string());
    for (std::size_t r = 1; r < sale_rows.size(); ++r) {
        if (sale_rows[r].size() < 3) throw ScenarioError("sales.csv row needs 3 fields");
        const int a = area_index(sale_rows[r][0], "sales.csv");
        s.price_samples[static_cast<std::size_t>(a)].push_back(
            csv_double(sale_rows[r][2], "sales.csv"));
    }

    s.income_brackets.assign(s.area_names.size(), {});
    const auto inc_rows = csv_read((base / "income_brackets.csv").string());
    for (std::size_t r = 1; r < inc_rows.size(); ++r) {
        if (inc_rows[r].size() < 4) throw ScenarioError("income_brackets.csv row needs 4 fields");
        const int a = area_index(inc_rows[r][0], "income_brackets.csv");
        s.income_brackets[static_cast<std::size_t>(a)].push_back(
            {csv_double(inc_rows[r][1], "income_brackets.csv"),
             csv_double(inc_rows[r][2], "income_brackets.csv"),
             csv_double(inc_rows[r][3], "income_brackets.csv")});
    }

    const auto exo_rows = csv_read((base / "exogenous.csv").string());
    for (std::size_t r = 1; r < exo_rows.size(); ++r) {
        if (exo_rows[r].size() < 6) throw ScenarioError("exogenous.csv row needs 6 fields");
        s.exo.mortgage_rate.push_back(csv_double(exo_rows[r][1], "exogenous.csv"));
        s.exo.overseas_rate.push_back(csv_double(exo_rows[r][2], "exogenous.csv"));
        s.exo.overseas_avg_price.push_back(csv_double(exo_rows[r][3], "exogenous.csv"));
        s.exo.households_total.push_back(csv_double(exo_rows[r][4], "exogenous.csv"));
        s.exo.dwellings_total.push_back(csv_double(exo_rows[r][5], "exogenous.csv"));
    }

    validate_scenario(s);
    return s;
}

void save_scenario(const Scenario& s, const std::string& dir) {
    const fs::path base(dir);
    fs::create_directories(base);

    json j;
    j["scale"] = s.scale;
    j["months"] = s.months;
    j["burn_in"] = s.burn_in;
    j["train_ratio"] = s.train_ratio;
    j["owner_share"] = s.owner_share;
    j["min_kde_samples"] = s.min_kde_samples;
    j["params"] = {{"h", s.params.h}, {"beta", s.params.beta}, {"alpha", s.params.alpha}};
    const BehaviorConstants& c = s.behavior;
    j["behavior"] = {{"income_multiplier", c.income_multiplier},
                     {"income_exponent", c.income_exponent},
                     {"heterogeneity", c.heterogeneity},
                     {"list_markup", c.list_markup},
                     {"sold_to_list_power", c.sold_to_list_power},
                     {"months_listed_power", c.months_listed_power},
                     {"base_listing_probability", c.base_listing_probability},
                     {"similar_sales", c.similar_sales},
                     {"urgency_stress", c.urgency_stress},
                     {"urgency_rental", c.urgency_rental},
                     {"urgency_cash", c.urgency_cash},
                     {"match_probability", c.match_probability},
                     {"downshift_ratio", c.downshift_ratio},
                     {"invest_propensity", c.invest_propensity},
                     {"stress_listing", c.stress_listing}};
    const FinanceConstants& f = s.finance;
    j["finance"] = {{"ltv", f.ltv},
                    {"ltv_halfwidth", f.ltv_halfwidth},
                    {"mortgage_years", f.mortgage_years},
                    {"serviceability", f.serviceability},
                    {"house_tax_rate", f.house_tax_rate},
                    {"stamp_duty", f.stamp_duty},
                    {"purchase_fee", f.purchase_fee},
                    {"income_consumption", f.income_consumption},
                    {"liquid_consumption", f.liquid_consumption},
                    {"income_growth", f.income_growth},
                    {"income_growth_halfwidth", f.income_growth_halfwidth},
                    {"house_care", f.house_care},
                    {"house_care_halfwidth", f.house_care_halfwidth},
                    {"rent_yield", f.rent_yield}};
    j["tax"] = {{"thresholds", s.tax.thresholds}, {"rates", s.tax.rates}};
    j["liquidity_brackets"] = brackets_to_json(s.liquidity_brackets);
    std::ofstream(base / "scenario.json") << j.dump(2) << "\n";

    std::ofstream areas(base / "areas.csv");
    areas << "area,population_weight\n";
    for (int a = 0; a < s.n_areas(); ++a)
        areas << s.area_names[static_cast<std::size_t>(a)] << ","
              << fmt_double(s.population_weights[static_cast<std::size_t>(a)]) << "\n";

    std::ofstream edges(base / "edges.csv");
    edges << "area_a,area_b\n";
    for (const auto& [a, b] : s.topology.edges)
        edges << s.area_names[static_cast<std::size_t>(a)] << ","
              << s.area_names[static_cast<std::size_t>(b)] << "\n";

    std::ofstream sales(base / "sales.csv");
    sales << "area,month,price\n";
    for (int a = 0; a < s.n_areas(); ++a) {
        const auto& xs = s.price_samples[static_cast<std::size_t>(a)];
        for (std::size_t k = 0; k < xs.size(); ++k)
            sales << s.area_names[static_cast<std::size_t>(a)] << ","
                  << -3 + static_cast<int>(k % 3) << "," << fmt_double(xs[k]) << "\n";
    }

    std::ofstream inc(base / "income_brackets.csv");
    inc << "area,low,high,weight\n";
    for (int a = 0; a < s.n_areas(); ++a)
        for (const Bracket& b : s.income_brackets[static_cast<std::size_t>(a)])
            inc << s.area_names[static_cast<std::size_t>(a)] << "," << fmt_double(b.low) << ","
                << fmt_double(b.high) << "," << fmt_double(b.weight) << "\n";

    std::ofstream exo(base / "exogenous.csv");
    exo << "month,mortgage_rate,overseas_rate,overseas_avg_price,households_total,dwellings_"
           "total\n";
    for (int m = 0; m < s.exo.size(); ++m) {
        const auto i = static_cast<std::size_t>(m);
        exo << m << "," << fmt_double(s.exo.mortgage_rate[i]) << ","
            << fmt_double(s.exo.overseas_rate[i]) << ","
            << fmt_double(s.exo.overseas_avg_price[i]) << ","
            << fmt_double(s.exo.households_total[i]) << ","
            << fmt_double(s.exo.dwellings_total[i]) << "\n";
    }
}

Scenario generate_synthetic_scenario(std::uint64_t seed, const SyntheticConfig& cfg) {
    if (cfg.n_areas < 1) throw ScenarioError("need at least one area");
    if (cfg.months < 1) throw ScenarioError("need at least one month");
    Rng rng(derive_seed(seed, "scenario"));
    Scenario s;
    const int n = cfg.n_areas;
    s.scale = cfg.scale;
    s.months = cfg.months;
    s.burn_in = cfg.burn_in;
    s.train_ratio = cfg.train_ratio;

    for (int a = 0; a < n; ++a) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "A%02d", a);
        s.area_names.emplace_back(buf);
    }

    // Random spanning tree keeps the graph connected; extra edges add shortcuts.
    if (n == 1) {
        s.topology = Topology::singleton();
    } else {
        std::vector<std::pair<int, int>> edges;
        for (int v = 1; v < n; ++v)
            edges.emplace_back(static_cast<int>(rng.uniform_int(0, v - 1)), v);
        const int extra = n / 3;
        for (int k = 0; k < extra; ++k) {
            const int a = static_cast<int>(rng.uniform_int(0, n - 1));
            const int b = static_cast<int>(rng.uniform_int(0, n - 1));
            if (a != b) edges.emplace_back(std::min(a, b), std::max(a, b));
        }
        s.topology = Topology::adjacency(n, std::move(edges));
    }

    // Population shares from a Dirichlet draw, floored so no area is empty.
    std::vector<double> w(static_cast<std::size_t>(n));
    double wsum = 0.0;
    for (double& x : w) {
        x = rng.gamma(2.0);
        wsum += x;
    }
    const double floor_w = 0.2 / n;
    double renorm = 0.0;
    for (double& x : w) {
        x = std::max(x / wsum, floor_w);
        renorm += x;
    }
    for (double& x : w) x /= renorm;
    s.population_weights = w;

    // Area price levels are log-normal around a common regional level; sale
    // samples scatter log-normally around each area level.
    const double region_level = 900000.0;
    std::vector<double> level(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        level[static_cast<std::size_t>(a)] = region_level * std::exp(rng.normal(0.0, 0.35));
        const int n_samples = static_cast<int>(rng.uniform_int(45, 80));
        std::vector<double> xs;
        xs.reserve(static_cast<std::size_t>(n_samples));
        for (int k = 0; k < n_samples; ++k)
            xs.push_back(level[static_cast<std::size_t>(a)] * std::exp(rng.normal(0.0, 0.28)));
        s.price_samples.push_back(std::move(xs));
    }

    // Annual household income tracks the area price level sub-linearly.
    for (int a = 0; a < n; ++a) {
        const double med =
            78000.0 * std::pow(level[static_cast<std::size_t>(a)] / region_level, 0.3);
        s.income_brackets.push_back({{0.4 * med, 0.7 * med, 0.20},
                                     {0.7 * med, 0.95 * med, 0.25},
                                     {0.95 * med, 1.25 * med, 0.25},
                                     {1.25 * med, 1.8 * med, 0.20},
                                     {1.8 * med, 3.5 * med, 0.10}});
    }
    s.liquidity_brackets = {{0.0, 25000.0, 0.20},
                            {25000.0, 75000.0, 0.30},
                            {75000.0, 180000.0, 0.25},
                            {180000.0, 400000.0, 0.15},
                            {400000.0, 1200000.0, 0.10}};

    // Exogenous drivers: gently rising mortgage rate, flat overseas demand,
    // linear demographic growth, 5% structural vacancy.
    const double hh0 = cfg.total_households;
    const double growth = 0.015 / 12.0;
    for (int m = 0; m < cfg.months; ++m) {
        const double frac = cfg.months > 1 ? static_cast<double>(m) / (cfg.months - 1) : 0.0;
        s.exo.mortgage_rate.push_back(0.042 + frac * (0.0455 - 0.042));
        s.exo.overseas_rate.push_back(6000.0 / 12.0);
        s.exo.overseas_avg_price.push_back(1.3 * region_level);
        s.exo.households_total.push_back(hh0 * (1.0 + growth * m));
        s.exo.dwellings_total.push_back(1.05 * hh0 * (1.0 + growth * m));
    }

    s.tax.thresholds = {0.0, 18200.0, 37000.0, 87000.0, 180000.0};
    s.tax.rates = {0.0, 0.19, 0.325, 0.37, 0.45};

    validate_scenario(s);
    return s;
}

std::uint64_t scenario_config_hash(const Scenario& s) {
    std::string blob;
    auto add = [&blob](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g;", v);
        blob += buf;
    };
    add(s.scale);
    add(s.months);
    add(s.burn_in);
    add(s.train_ratio);
    add(s.owner_share);
    add(s.params.h);
    add(s.params.beta);
    add(s.params.alpha);
    add(s.n_areas());
    add(static_cast<double>(s.topology.edges.size()));
    add(s.behavior.income_multiplier);
    add(s.behavior.income_exponent);
    add(s.behavior.list_markup);
    add(s.behavior.base_listing_probability);
    add(s.behavior.invest_propensity);
    add(s.behavior.stress_listing);
    add(s.finance.ltv);
    add(s.finance.serviceability);
    for (const double v : s.exo.mortgage_rate) add(v);
    for (const double w : s.population_weights) add(w);

    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : blob) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace housing
