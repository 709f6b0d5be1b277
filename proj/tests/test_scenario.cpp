#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <vector>

#include "housing/scenario.hpp"

using namespace housing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("housing_scn_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

} // namespace

TEST_CASE("bracket sampling, percentile and inverse agree") {
    const std::vector<Bracket> bs = {{0.0, 100.0, 1.0}, {100.0, 200.0, 3.0}};
    CHECK(bracket_percentile(bs, 0.0) == doctest::Approx(0.0));
    CHECK(bracket_percentile(bs, 100.0) == doctest::Approx(0.25));
    CHECK(bracket_percentile(bs, 150.0) == doctest::Approx(0.25 + 0.75 * 0.5));
    CHECK(bracket_percentile(bs, 200.0) == doctest::Approx(1.0));
    CHECK(bracket_value_at(bs, 0.25) == doctest::Approx(100.0));
    CHECK(bracket_value_at(bs, 0.625) == doctest::Approx(150.0));

    Rng rng(12);
    int in_second = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double v = sample_bracket(bs, rng);
        REQUIRE(v >= 0.0);
        REQUIRE(v < 200.0);
        if (v >= 100.0) ++in_second;
    }
    CHECK(static_cast<double>(in_second) / n == doctest::Approx(0.75).epsilon(0.01));

    CHECK_THROWS_AS(sample_bracket({}, rng), ScenarioError);
}

TEST_CASE("synthetic scenarios are well formed and seed-stable") {
    SyntheticConfig cfg;
    cfg.n_areas = 12;
    cfg.months = 30;
    cfg.total_households = 200000.0;
    cfg.scale = 100.0;

    Scenario a = generate_synthetic_scenario(41, cfg);
    CHECK(a.n_areas() == 12);
    CHECK(a.months == 30);
    CHECK(a.exo.size() >= 30);
    CHECK_NOTHROW(validate_scenario(a));

    double wsum = 0.0;
    for (const double w : a.population_weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0));

    // Same seed, same scenario; different seed, different price levels.
    Scenario b = generate_synthetic_scenario(41, cfg);
    CHECK(scenario_config_hash(a) == scenario_config_hash(b));
    Scenario c = generate_synthetic_scenario(42, cfg);
    CHECK(scenario_config_hash(a) != scenario_config_hash(c));
}

TEST_CASE("a scenario survives the directory round trip") {
    SyntheticConfig cfg;
    cfg.n_areas = 6;
    cfg.months = 18;
    cfg.total_households = 50000.0;
    const Scenario orig = generate_synthetic_scenario(7, cfg);

    TempDir tmp;
    save_scenario(orig, tmp.path.string());
    for (const char* f : {"areas.csv", "edges.csv", "sales.csv", "income_brackets.csv",
                          "exogenous.csv", "scenario.json"})
        CHECK(fs::exists(tmp.path / f));

    const Scenario back = load_scenario(tmp.path.string());
    CHECK(back.area_names == orig.area_names);
    CHECK(back.months == orig.months);
    CHECK(back.burn_in == orig.burn_in);
    CHECK(back.scale == doctest::Approx(orig.scale));
    CHECK(back.train_ratio == doctest::Approx(orig.train_ratio));
    CHECK(back.topology.edges.size() == orig.topology.edges.size());
    REQUIRE(back.price_samples.size() == orig.price_samples.size());
    for (std::size_t i = 0; i < orig.price_samples.size(); ++i)
        CHECK(back.price_samples[i] == orig.price_samples[i]);
    CHECK(back.exo.mortgage_rate == orig.exo.mortgage_rate);
    CHECK(back.behavior.list_markup == doctest::Approx(orig.behavior.list_markup));
    CHECK(back.behavior.invest_propensity == doctest::Approx(orig.behavior.invest_propensity));
    CHECK(back.finance.serviceability == doctest::Approx(orig.finance.serviceability));
    CHECK(back.params[0] == doctest::Approx(orig.params[0]));

    // The stable hash covers everything that shapes output.
    CHECK(scenario_config_hash(back) == scenario_config_hash(orig));
}

TEST_CASE("loading an empty directory fails cleanly") {
    TempDir tmp;
    CHECK_THROWS_AS(load_scenario(tmp.path.string()), ScenarioError);
}

TEST_CASE("structural defects are named") {
    SyntheticConfig cfg;
    cfg.n_areas = 4;
    cfg.months = 12;
    cfg.total_households = 20000.0;
    const Scenario good = generate_synthetic_scenario(3, cfg);

    Scenario s = good;
    s.population_weights.pop_back();
    CHECK_THROWS_AS(validate_scenario(s), ScenarioError);

    s = good;
    s.months = s.exo.size() + 1;
    CHECK_THROWS_AS(validate_scenario(s), ScenarioError);

    s = good;
    s.price_samples.assign(4, {});
    CHECK_THROWS_AS(validate_scenario(s), ScenarioError);

    s = good;
    s.price_samples[0][0] = -5.0;
    CHECK_THROWS_AS(validate_scenario(s), ScenarioError);

    s = good;
    s.scale = 0.0;
    CHECK_THROWS_AS(validate_scenario(s), ScenarioError);

    s = good;
    s.topology = Topology::adjacency(4, {{0, 1}, {2, 3}});
    CHECK_THROWS_AS(validate_scenario(s), DisconnectedGraph);
}

TEST_CASE("population weights renormalize in place") {
    SyntheticConfig cfg;
    cfg.n_areas = 3;
    cfg.months = 12;
    cfg.total_households = 20000.0;
    Scenario s = generate_synthetic_scenario(5, cfg);
    s.population_weights = {2.0, 2.0, 4.0};
    validate_scenario(s);
    CHECK(s.population_weights[0] == doctest::Approx(0.25));
    CHECK(s.population_weights[2] == doctest::Approx(0.5));
}
