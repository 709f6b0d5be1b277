#include "housing/calibrate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "housing/csv.hpp"
#include "housing/engine.hpp"
#include "housing/loss.hpp"
#include "housing/rng.hpp"

namespace housing {

namespace {

constexpr int kDims = static_cast<int>(ParameterVector::size());
constexpr std::size_t kDimsZ = ParameterVector::size();

/// Run `count` index-addressed tasks on up to `jobs` threads. Task bodies
/// write only to their own slot, so scheduling order never shows in results.
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

double normal_pdf(double z) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// One-dimensional Parzen mixture on the unit interval: one truncated
/// Gaussian per observation plus a wide prior component anchored at 0.5.
/// Bandwidths follow the larger gap to a neighbouring observation, with a
/// floor that shrinks as the mixture grows so small populations stay broad
/// while large ones may sharpen.
struct ParzenDim {
    std::vector<double> mu;
    std::vector<double> sigma;

    explicit ParzenDim(std::vector<double> obs) {
        std::sort(obs.begin(), obs.end());
        const std::size_t n = obs.size();
        mu.reserve(n + 1);
        sigma.reserve(n + 1);
        mu.push_back(0.5); // prior keeps mass everywhere
        sigma.push_back(1.0);
        const double floor_bw = 1.0 / std::min(100.0, static_cast<double>(n) + 2.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double left = k == 0 ? obs[k] - 0.0 : obs[k] - obs[k - 1];
            const double right = k + 1 == n ? 1.0 - obs[k] : obs[k + 1] - obs[k];
            const double bw = std::clamp(std::max(left, right), floor_bw, 1.0);
            mu.push_back(obs[k]);
            sigma.push_back(bw);
        }
    }

    double log_pdf(double x) const {
        double acc = 0.0;
        const double w = 1.0 / static_cast<double>(mu.size());
        for (std::size_t k = 0; k < mu.size(); ++k) {
            const double s = sigma[k];
            const double trunc = normal_cdf((1.0 - mu[k]) / s) - normal_cdf((0.0 - mu[k]) / s);
            acc += w * normal_pdf((x - mu[k]) / s) / (s * std::max(trunc, 1e-12));
        }
        return std::log(std::max(acc, 1e-300));
    }

    double sample(Rng& rng) const {
        const std::size_t k =
            static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(mu.size()) - 1));
        for (int attempt = 0; attempt < 100; ++attempt) {
            const double x = rng.normal(mu[k], sigma[k]);
            if (x >= 0.0 && x <= 1.0) return x;
        }
        return std::clamp(mu[k], 0.0, 1.0);
    }
};

void append_history(const std::string& path, const Trial& t, const SearchSpace& space) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open trial history file: " + path);
    out << "{\"trial\":" << t.index;
    for (int d = 0; d < kDims; ++d)
        out << ",\"" << ParameterVector::name(d) << "\":" << fmt_double(t.params[d]);
    out << ",\"losses\":[";
    for (std::size_t r = 0; r < t.losses.size(); ++r)
        out << (r ? "," : "") << fmt_double(t.losses[r]);
    out << "],\"mean_loss\":" << fmt_double(t.mean_loss) << "}\n";
    (void)space;
}

} // namespace

OptimizeResult optimize(const Objective& objective, const SearchSpace& space,
                        const OptimizeOptions& opt) {
    if (opt.n_trials <= 0) throw std::invalid_argument("optimize: n_trials must be positive");
    if (opt.repeats <= 0) throw std::invalid_argument("optimize: repeats must be positive");
    const int startup = std::min(std::max(opt.startup, 1), opt.n_trials);

    OptimizeResult result;
    result.trials.reserve(static_cast<std::size_t>(opt.n_trials));
    Rng proposal_rng(derive_seed(opt.seed, "tpe-proposals"));

    // Unit-cube coordinates of every completed trial, per dimension.
    std::vector<std::vector<double>> unit(kDimsZ);

    auto evaluate_block = [&](const std::vector<ParameterVector>& block, int first_index) {
        const int reps = opt.repeats;
        const int tasks = static_cast<int>(block.size()) * reps;
        std::vector<EvalOutcome> outs(static_cast<std::size_t>(tasks));
        run_parallel(tasks, opt.jobs, [&](int i) {
            const int b = i / reps, r = i % reps;
            const std::uint64_t s = derive_seed(
                opt.seed, "trial", static_cast<std::uint64_t>(first_index + b) * 64 +
                                       static_cast<std::uint64_t>(r));
            outs[static_cast<std::size_t>(i)] = objective(block[static_cast<std::size_t>(b)], s);
        });
        for (std::size_t b = 0; b < block.size(); ++b) {
            Trial t;
            t.index = first_index + static_cast<int>(b);
            t.params = block[b];
            double sum = 0.0;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < reps; ++r) {
                const EvalOutcome& o = outs[b * static_cast<std::size_t>(reps) +
                                            static_cast<std::size_t>(r)];
                t.losses.push_back(o.loss);
                sum += o.loss;
                if (o.loss < best) {
                    best = o.loss;
                    t.best_series = o.series;
                }
            }
            t.mean_loss = sum / reps;
            append_history(opt.history_path, t, space);
            for (int d = 0; d < kDims; ++d)
                unit[static_cast<std::size_t>(d)].push_back(space.to_unit(d, t.params[d]));
            result.trials.push_back(std::move(t));
        }
    };

    // Startup block: independent uniform draws, evaluated together.
    std::vector<ParameterVector> warm;
    warm.reserve(static_cast<std::size_t>(startup));
    for (int i = 0; i < startup; ++i) {
        ParameterVector p;
        for (int d = 0; d < kDims; ++d)
            p[d] = space.from_unit(d, proposal_rng.uniform());
        warm.push_back(p);
    }
    evaluate_block(warm, 0);

    // Adaptive phase: one proposal at a time, conditioned on all history.
    for (int i = startup; i < opt.n_trials; ++i) {
        const int n = static_cast<int>(result.trials.size());
        std::vector<int> order(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const Trial& ta = result.trials[static_cast<std::size_t>(a)];
            const Trial& tb = result.trials[static_cast<std::size_t>(b)];
            if (ta.mean_loss != tb.mean_loss) return ta.mean_loss < tb.mean_loss;
            return a < b;
        });
        // The reference-density set is the best quantile of the history,
        // capped at 25 observations so late proposals concentrate near the
        // best trials instead of diluting across the whole upper quartile.
        const int n_good =
            std::max(1, std::min(static_cast<int>(std::ceil(opt.gamma * n)), 25));

        std::vector<ParzenDim> good, bad;
        good.reserve(kDimsZ);
        bad.reserve(kDimsZ);
        for (int d = 0; d < kDims; ++d) {
            std::vector<double> g, b;
            for (int k = 0; k < n; ++k) {
                const double x = unit[static_cast<std::size_t>(d)]
                                     [static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
                (k < n_good ? g : b).push_back(x);
            }
            good.emplace_back(std::move(g));
            bad.emplace_back(std::move(b));
        }

        ParameterVector pick;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < std::max(1, opt.candidates); ++c) {
            ParameterVector cand;
            double score = 0.0;
            for (int d = 0; d < kDims; ++d) {
                const double x = good[static_cast<std::size_t>(d)].sample(proposal_rng);
                score += good[static_cast<std::size_t>(d)].log_pdf(x) -
                         bad[static_cast<std::size_t>(d)].log_pdf(x);
                cand[d] = space.from_unit(d, x);
            }
            if (score > best_score) {
                best_score = score;
                pick = cand;
            }
        }
        evaluate_block({pick}, i);
    }

    double best = std::numeric_limits<double>::infinity();
    for (const Trial& t : result.trials)
        if (t.mean_loss < best) {
            best = t.mean_loss;
            result.best_index = t.index;
        }
    return result;
}

bool global_peak(const std::vector<double>& series) {
    if (series.size() < 3) return false;
    const std::size_t mid = series.size() / 2;
    return series[mid] > series.front() && series[mid] > series.back();
}

ConstrainedPick apply_global_constraint(std::vector<Trial>& trials, const TracePredicate& pred) {
    ConstrainedPick pick;
    double best_ok = std::numeric_limits<double>::infinity();
    double best_any = std::numeric_limits<double>::infinity();
    int any = -1;
    for (Trial& t : trials) {
        t.constraint_ok = pred(t.best_series);
        if (t.mean_loss < best_any) {
            best_any = t.mean_loss;
            any = t.index;
        }
        if (t.constraint_ok && t.mean_loss < best_ok) {
            best_ok = t.mean_loss;
            pick.index = t.index;
            pick.satisfied = true;
        }
    }
    if (!pick.satisfied) pick.index = any;
    return pick;
}

Objective make_sim_objective(const Scenario& scn, std::vector<double> actual_train,
                             double lambda) {
    if (actual_train.empty())
        throw std::invalid_argument("make_sim_objective: empty training series");
    Scenario base = scn;
    base.months = static_cast<int>(actual_train.size());
    return [base, actual = std::move(actual_train), lambda](const ParameterVector& p,
                                                            std::uint64_t seed) {
        Scenario s = base;
        s.params = p;
        RunConfig cfg;
        cfg.params = p;
        cfg.seed = seed;
        cfg.months = s.months;
        SimulationTrace tr = simulate(s, cfg);
        EvalOutcome out;
        out.series = tr.region_median_series();
        out.loss = combined_loss(actual, out.series, lambda).combined;
        return out;
    };
}

} // namespace housing
