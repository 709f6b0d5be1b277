#include "housing/sensitivity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "housing/loss.hpp"
#include "housing/rng.hpp"
#include "housing/stats.hpp"

namespace housing {

namespace {

void run_parallel(int count, int jobs, const std::function<void(int)>& task) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct Trajectory {
    std::vector<std::vector<double>> points; // k+1 unit-cube points
    std::vector<int> input_order;            // which input moves at each step
    std::vector<double> deltas;              // signed jump applied at each step
};

Trajectory build_trajectory(std::size_t k, int levels, Rng& rng) {
    const double grid = 1.0 / (levels - 1);
    const int jump = levels / 2; // grid steps covered by one perturbation
    const double delta = jump * grid;

    Trajectory tr;
    std::vector<double> x(k);
    std::vector<double> signs(k);
    for (std::size_t d = 0; d < k; ++d) {
        const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
        signs[d] = sign;
        // Base level chosen so the perturbed point stays inside the grid.
        const long max_base = levels - 1 - jump;
        long level = rng.uniform_int(0, max_base);
        if (sign < 0.0) level += jump;
        x[d] = level * grid;
    }
    std::vector<int> order(k);
    for (std::size_t d = 0; d < k; ++d) order[d] = static_cast<int>(d);
    for (std::size_t d = k; d > 1; --d) {
        const long j = rng.uniform_int(0, static_cast<long>(d) - 1);
        std::swap(order[d - 1], order[static_cast<std::size_t>(j)]);
    }

    tr.points.push_back(x);
    for (std::size_t step = 0; step < k; ++step) {
        const int d = order[step];
        x[static_cast<std::size_t>(d)] += signs[static_cast<std::size_t>(d)] * delta;
        tr.points.push_back(x);
        tr.input_order.push_back(d);
        tr.deltas.push_back(signs[static_cast<std::size_t>(d)] * delta);
    }
    return tr;
}

} // namespace

MorrisResult morris_screen(const VectorObjective& f, std::span<const double> lo,
                           std::span<const double> hi, const MorrisConfig& cfg) {
    const std::size_t k = lo.size();
    if (k == 0 || hi.size() != k)
        throw std::invalid_argument("morris_screen: bounds must be nonempty and equal length");
    if (cfg.levels < 2 || cfg.levels % 2 != 0)
        throw std::invalid_argument("morris_screen: levels must be even and at least 2");
    if (cfg.trajectories < 2)
        throw std::invalid_argument("morris_screen: need at least two trajectories");

    // Designs are drawn up front from one stream; evaluation order then has
    // no bearing on the results.
    Rng design_rng(derive_seed(cfg.seed, "morris-design"));
    std::vector<Trajectory> designs;
    designs.reserve(static_cast<std::size_t>(cfg.trajectories));
    for (int r = 0; r < cfg.trajectories; ++r)
        designs.push_back(build_trajectory(k, cfg.levels, design_rng));

    // A trajectory whose objective throws anywhere is dropped whole; its
    // slot stays empty and the screen proceeds on the survivors.
    std::vector<std::vector<double>> values(designs.size());
    std::vector<std::string> failures(designs.size());
    run_parallel(cfg.trajectories, cfg.jobs, [&](int r) {
        const Trajectory& tr = designs[static_cast<std::size_t>(r)];
        std::vector<double> mapped(k), vals;
        vals.reserve(tr.points.size());
        try {
            for (const std::vector<double>& u : tr.points) {
                for (std::size_t d = 0; d < k; ++d) mapped[d] = lo[d] + u[d] * (hi[d] - lo[d]);
                vals.push_back(f(mapped));
            }
        } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(r)] = e.what();
            return;
        }
        values[static_cast<std::size_t>(r)] = std::move(vals);
    });

    MorrisResult res;
    res.effects.assign(k, {});
    for (std::size_t r = 0; r < designs.size(); ++r) {
        if (values[r].empty()) {
            ++res.failed_trajectories;
            std::cerr << "morris: trajectory " << r << " dropped: " << failures[r] << "\n";
            continue;
        }
        const Trajectory& tr = designs[r];
        for (std::size_t step = 0; step < k; ++step) {
            const double ee = (values[r][step + 1] - values[r][step]) / tr.deltas[step];
            res.effects[static_cast<std::size_t>(tr.input_order[step])].push_back(ee);
        }
    }
    if (cfg.trajectories - res.failed_trajectories < 2)
        throw std::runtime_error("morris_screen: fewer than two trajectories evaluated cleanly");

    res.mu.resize(k);
    res.mu_star.resize(k);
    res.sigma.resize(k);
    res.mu_star_ci.resize(k);
    Rng boot_rng(derive_seed(cfg.seed, "morris-bootstrap"));
    for (std::size_t d = 0; d < k; ++d) {
        const std::vector<double>& ee = res.effects[d];
        res.mu[d] = mean_of(ee);
        std::vector<double> abs_ee(ee.size());
        for (std::size_t i = 0; i < ee.size(); ++i) abs_ee[i] = std::abs(ee[i]);
        res.mu_star[d] = mean_of(abs_ee);
        res.sigma[d] = stddev_of(ee);

        std::vector<double> boot(static_cast<std::size_t>(std::max(1, cfg.bootstrap)));
        for (double& b : boot) {
            double acc = 0.0;
            for (std::size_t i = 0; i < abs_ee.size(); ++i)
                acc += abs_ee[static_cast<std::size_t>(
                    boot_rng.uniform_int(0, static_cast<long>(abs_ee.size()) - 1))];
            b = acc / static_cast<double>(abs_ee.size());
        }
        res.mu_star_ci[d] = {quantile_of(boot, 0.025), quantile_of(boot, 0.975)};
    }
    return res;
}

namespace {

struct ConstantSlot {
    const char* name;
    double BehaviorConstants::* member;
};

const std::vector<ConstantSlot>& constant_slots() {
    static const std::vector<ConstantSlot> slots = {
        {"income_multiplier", &BehaviorConstants::income_multiplier},
        {"income_exponent", &BehaviorConstants::income_exponent},
        {"heterogeneity", &BehaviorConstants::heterogeneity},
        {"list_markup", &BehaviorConstants::list_markup},
        {"sold_to_list_power", &BehaviorConstants::sold_to_list_power},
        {"months_listed_power", &BehaviorConstants::months_listed_power},
        {"base_listing_probability", &BehaviorConstants::base_listing_probability},
        {"urgency_stress", &BehaviorConstants::urgency_stress},
        {"urgency_rental", &BehaviorConstants::urgency_rental},
        {"match_probability", &BehaviorConstants::match_probability},
        {"downshift_ratio", &BehaviorConstants::downshift_ratio},
        {"invest_propensity", &BehaviorConstants::invest_propensity},
        {"stress_listing", &BehaviorConstants::stress_listing},
    };
    return slots;
}

} // namespace

std::vector<std::string> sweepable_constants() {
    std::vector<std::string> names;
    for (const ConstantSlot& s : constant_slots()) names.emplace_back(s.name);
    return names;
}

void apply_constant(BehaviorConstants& b, const std::string& name, double value) {
    for (const ConstantSlot& s : constant_slots())
        if (name == s.name) {
            b.*(s.member) = value;
            return;
        }
    throw std::invalid_argument("unknown behavioral constant: " + name);
}

double get_constant(const BehaviorConstants& b, const std::string& name) {
    for (const ConstantSlot& s : constant_slots())
        if (name == s.name) return b.*(s.member);
    throw std::invalid_argument("unknown behavioral constant: " + name);
}

std::vector<SweepPoint> constant_sweep(const Scenario& scn, const RunConfig& cfg,
                                       const std::string& name, int grid_points,
                                       double rel_width, int jobs) {
    if (grid_points < 2) throw std::invalid_argument("constant_sweep: need at least 2 points");
    const double center = get_constant(scn.behavior, name);
    std::vector<SweepPoint> out(static_cast<std::size_t>(grid_points));
    run_parallel(grid_points, jobs, [&](int i) {
        const double frac = static_cast<double>(i) / (grid_points - 1);
        const double value = center * (1.0 - rel_width + 2.0 * rel_width * frac);
        Scenario s = scn;
        apply_constant(s.behavior, name, value);
        SweepPoint& pt = out[static_cast<std::size_t>(i)];
        pt.param = name;
        pt.value = value;
        pt.series = simulate(s, cfg).region_median_series();
    });
    return out;
}

std::vector<SweepPoint> behavioral_sweep(const Scenario& scn, const RunConfig& cfg,
                                         std::size_t param_index, int levels,
                                         std::span<const double> actual, double lambda,
                                         int jobs) {
    if (param_index >= ParameterVector::size())
        throw std::invalid_argument("behavioral_sweep: parameter index out of range");
    if (levels < 2) throw std::invalid_argument("behavioral_sweep: need at least 2 levels");
    if (actual.empty()) throw std::invalid_argument("behavioral_sweep: empty reference series");
    SearchSpace space;
    std::vector<SweepPoint> out(static_cast<std::size_t>(levels));
    run_parallel(levels, jobs, [&](int i) {
        const double u = static_cast<double>(i) / (levels - 1);
        const double value = space.from_unit(param_index, u);
        Scenario s = scn;
        RunConfig rc = cfg;
        rc.months = static_cast<int>(actual.size());
        rc.params[param_index] = value;
        s.params = rc.params;
        SweepPoint& pt = out[static_cast<std::size_t>(i)];
        pt.param = ParameterVector::name(param_index);
        pt.value = value;
        pt.series = simulate(s, rc).region_median_series();
        pt.loss = combined_loss(actual, pt.series, lambda).combined;
    });
    return out;
}

} // namespace housing
