// Command line front end: scenario generation, simulation, scoring,
// calibration, sensitivity screening, parameter sweeps and reporting.
//
// Exit codes: 0 success, 2 usage error, 3 unreadable or inconsistent input
// data, 4 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "housing/calibrate.hpp"
#include "housing/csv.hpp"
#include "housing/engine.hpp"
#include "housing/loss.hpp"
#include "housing/report.hpp"
#include "housing/rng.hpp"
#include "housing/scenario.hpp"
#include "housing/sensitivity.hpp"

namespace fs = std::filesystem;
using namespace housing;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

/// Destination directory: the --out value when given, else $HOUSING_OUT_DIR,
/// else the current directory. Created on demand.
fs::path resolve_out(const std::string& opt_out) {
    fs::path dir = opt_out;
    if (dir.empty()) {
        const char* env = std::getenv("HOUSING_OUT_DIR");
        dir = env && *env ? fs::path(env) : fs::path(".");
    }
    fs::create_directories(dir);
    return dir;
}

/// Read a monthly price series from a CSV file. Comment lines start with '#'.
/// Plain series files (optional header, value in the last column) are read
/// straight through. Simulation trace files are recognized by their header
/// (`area` and `median_price` columns) and reduced to the region-level
/// median_price rows, so a stored run can serve as the observed series.
std::vector<double> read_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open series file: " + path);
    std::vector<double> out;
    std::string line;
    bool first_row = true;
    std::size_t value_col = 0, area_col = 0;
    bool has_cols = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> cells = csv_split(line);
        if (cells.empty()) continue;
        if (first_row) {
            first_row = false;
            std::size_t value_idx = cells.size(), area_idx = cells.size();
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (cells[i] == "median_price") value_idx = i;
                if (cells[i] == "area") area_idx = i;
            }
            if (value_idx < cells.size() && area_idx < cells.size()) {
                value_col = value_idx;
                area_col = area_idx;
                has_cols = true;
                continue;
            }
            try {
                out.push_back(csv_double(cells.back(), path));
            } catch (const CsvError&) {
                // header row of a plain series file
            }
            continue;
        }
        if (has_cols) {
            if (cells[area_col] != "region") continue;
            out.push_back(csv_double(cells[value_col], path));
        } else {
            out.push_back(csv_double(cells.back(), path));
        }
    }
    if (out.empty()) throw CsvError("no numeric rows in series file: " + path);
    return out;
}

void write_series_csv(const std::vector<double>& xs, const std::string& path,
                      const Provenance& prov, const char* value_name) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot open output file: " + path);
    out << "# " << prov.line() << "\n";
    out << "month," << value_name << "\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        out << i << "," << fmt_double(xs[i]) << "\n";
}

struct CommonOpts {
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out;
};

/// Parse "h=-0.11,beta=-1.03,alpha=0.59" into a full parameter vector based
/// on `defaults`. Keys may appear in any order; omitted keys keep their
/// default.
ParameterVector parse_params(const std::string& text, ParameterVector defaults) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = text.substr(pos, comma - pos);
        pos = comma + 1;
        if (item.empty()) continue;
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--params expects name=value pairs, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        std::size_t idx = ParameterVector::size();
        for (std::size_t d = 0; d < ParameterVector::size(); ++d)
            if (key == ParameterVector::name(d)) idx = d;
        if (idx == ParameterVector::size())
            throw CLI::ValidationError("--params: unknown parameter '" + key + "'");
        try {
            defaults[idx] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--params: bad number in '" + item + "'");
        }
    }
    return defaults;
}

int cmd_generate(const CommonOpts& com, const SyntheticConfig& gen) {
    Scenario scn = generate_synthetic_scenario(com.seed, gen);
    const fs::path dir = resolve_out(com.out);
    save_scenario(scn, dir.string());
    std::cout << "scenario: " << scn.n_areas() << " areas, " << scn.months
              << " months, scale 1:" << scn.scale << " -> " << dir.string() << "\n";
    return kExitOk;
}

int cmd_simulate(const CommonOpts& com, const std::string& scenario_dir, int runs, int months,
                 const std::string& params_override, bool full_logs) {
    Scenario scn = load_scenario(scenario_dir);
    if (!params_override.empty()) scn.params = parse_params(params_override, scn.params);
    RunConfig cfg;
    cfg.params = scn.params;
    cfg.seed = com.seed;
    cfg.months = months;

    MonteCarloResult mc = monte_carlo(scn, cfg, runs, com.jobs);

    Provenance prov;
    prov.seed = com.seed;
    prov.config_hash = scenario_config_hash(scn);
    const fs::path dir = resolve_out(com.out);
    fs::create_directories(dir / "runs");
    char name[64];
    for (std::size_t i = 0; i < mc.traces.size(); ++i) {
        std::snprintf(name, sizeof name, "run_%03zu.csv", i);
        write_trace_csv(mc.traces[i], scn, (dir / "runs" / name).string(), prov);
        if (full_logs || i == 0) {
            std::snprintf(name, sizeof name, "deals_%03zu.csv", i);
            write_deals_csv(mc.traces[i], scn, (dir / "runs" / name).string(), prov);
            std::snprintf(name, sizeof name, "moves_%03zu.csv", i);
            write_moves_csv(mc.traces[i], scn, (dir / "runs" / name).string(), prov);
        }
    }
    write_summary_json(mc, scn, (dir / "summary.json").string(), prov);

    const std::vector<double>& med = mc.summary.median;
    std::cout << "simulated " << runs << " run(s) x " << mc.summary.months << " months; "
              << "final regional median " << fmt_double(med.empty() ? 0.0 : med.back())
              << " -> " << dir.string() << "\n";
    return kExitOk;
}

int cmd_score(const std::string& actual_path, const std::string& simulated_path, double lambda) {
    std::vector<double> actual = read_series(actual_path);
    std::vector<double> simulated = read_series(simulated_path);
    const std::size_t n = std::min(actual.size(), simulated.size());
    actual.resize(n);
    simulated.resize(n);
    const LossReport rep = combined_loss(actual, simulated, lambda);
    std::cout << "{\"months\": " << n << ", \"shape\": " << fmt_double(rep.shape)
              << ", \"temporal\": " << fmt_double(rep.temporal)
              << ", \"combined\": " << fmt_double(rep.combined) << "}\n";
    return kExitOk;
}

int cmd_calibrate(const CommonOpts& com, const std::string& scenario_dir,
                  const std::string& actual_path, OptimizeOptions opt, double lambda,
                  double split_override, const std::string& constraint) {
    if (constraint != "peak" && constraint != "none")
        throw CLI::ValidationError("--constraint must be peak or none");
    Scenario scn = load_scenario(scenario_dir);
    if (split_override > 0.0) scn.train_ratio = split_override;
    const std::vector<double> actual = read_series(actual_path);
    const auto [train, test] = train_test_split(actual, scn.train_ratio);

    const fs::path dir = resolve_out(com.out);
    opt.seed = com.seed;
    opt.jobs = com.jobs;
    opt.history_path = (dir / "trials.jsonl").string();
    std::error_code ec;
    fs::remove(opt.history_path, ec); // history is append-only per run

    const Objective obj =
        make_sim_objective(scn, std::vector<double>(train.begin(), train.end()), lambda);
    OptimizeResult res = optimize(obj, SearchSpace{}, opt);
    ConstrainedPick pick;
    if (constraint == "peak") {
        pick = apply_global_constraint(res.trials);
    } else {
        pick.index = res.best_index;
        pick.satisfied = true;
    }
    const Trial& best = res.trials[static_cast<std::size_t>(pick.index)];

    // Out-of-sample check: rerun the winner over the full horizon and score
    // the held-out tail.
    Scenario full = scn;
    full.params = best.params;
    RunConfig cfg;
    cfg.params = best.params;
    cfg.seed = derive_seed(com.seed, "holdout");
    cfg.months = static_cast<int>(actual.size());
    const std::vector<double> sim = simulate(full, cfg).region_median_series();
    const std::size_t split = train.size();
    double test_loss = 0.0;
    if (!test.empty() && sim.size() >= actual.size()) {
        const std::vector<double> sim_test(sim.begin() + static_cast<std::ptrdiff_t>(split),
                                           sim.end());
        test_loss =
            combined_loss(test, std::span<const double>(sim_test), lambda).combined;
    }

    std::ofstream out(dir / "calibration.json");
    if (!out) throw CsvError("cannot open calibration output");
    out << "{\n  \"best\": {";
    for (std::size_t d = 0; d < ParameterVector::size(); ++d)
        out << (d ? ", " : "") << "\"" << ParameterVector::name(d)
            << "\": " << fmt_double(best.params[d]);
    out << "},\n  \"train_loss\": " << fmt_double(best.mean_loss)
        << ",\n  \"test_loss\": " << fmt_double(test_loss)
        << ",\n  \"constraint_satisfied\": " << (pick.satisfied ? "true" : "false")
        << ",\n  \"trial\": " << best.index << ",\n  \"trials\": " << res.trials.size()
        << "\n}\n";

    if (!pick.satisfied)
        std::cerr << "warning: no trial produced a mid-series peak; reporting the "
                     "unconstrained best\n";
    std::cout << "best";
    for (std::size_t d = 0; d < ParameterVector::size(); ++d)
        std::cout << " " << ParameterVector::name(d) << "=" << fmt_double(best.params[d]);
    std::cout << " train_loss=" << fmt_double(best.mean_loss)
              << " test_loss=" << fmt_double(test_loss) << "\n";
    return kExitOk;
}

int cmd_sensitivity(const CommonOpts& com, const std::string& scenario_dir,
                    const std::string& actual_path, MorrisConfig mcfg, double lambda) {
    Scenario scn = load_scenario(scenario_dir);
    const std::vector<double> actual = read_series(actual_path);
    const auto [train, test] = train_test_split(actual, scn.train_ratio);
    const Objective obj =
        make_sim_objective(scn, std::vector<double>(train.begin(), train.end()), lambda);

    // One fixed evaluation seed: effects then isolate the parameter change
    // from simulation noise.
    const std::uint64_t eval_seed = derive_seed(com.seed, "morris-eval");
    const VectorObjective f = [&](std::span<const double> x) {
        ParameterVector p;
        for (std::size_t d = 0; d < ParameterVector::size(); ++d) p[d] = x[d];
        return obj(p, eval_seed).loss;
    };
    SearchSpace space;
    mcfg.seed = com.seed;
    mcfg.jobs = com.jobs;
    const MorrisResult res = morris_screen(
        f, std::span<const double>(space.lo.data(), space.lo.size()),
        std::span<const double>(space.hi.data(), space.hi.size()), mcfg);

    Provenance prov;
    prov.seed = com.seed;
    prov.config_hash = scenario_config_hash(scn);
    const fs::path dir = resolve_out(com.out);
    std::ofstream out(dir / "morris.csv");
    if (!out) throw CsvError("cannot open morris output");
    out << "# " << prov.line() << "\n";
    out << "param,mu,mu_star,sigma,ci_lo,ci_hi\n";
    for (std::size_t d = 0; d < ParameterVector::size(); ++d) {
        out << ParameterVector::name(d) << "," << fmt_double(res.mu[d]) << ","
            << fmt_double(res.mu_star[d]) << "," << fmt_double(res.sigma[d]) << ","
            << fmt_double(res.mu_star_ci[d][0]) << "," << fmt_double(res.mu_star_ci[d][1])
            << "\n";
        std::cout << ParameterVector::name(d) << ": mu*=" << fmt_double(res.mu_star[d])
                  << " sigma=" << fmt_double(res.sigma[d]) << " ci=["
                  << fmt_double(res.mu_star_ci[d][0]) << ", " << fmt_double(res.mu_star_ci[d][1])
                  << "]\n";
    }
    return kExitOk;
}

int cmd_sweep(const CommonOpts& com, const std::string& scenario_dir,
              const std::string& constant_name, const std::string& param_name,
              const std::string& actual_path, int points, double width, int levels,
              double lambda, int months) {
    Scenario scn = load_scenario(scenario_dir);
    RunConfig cfg;
    cfg.params = scn.params;
    cfg.seed = com.seed;
    cfg.months = months;

    std::vector<SweepPoint> pts;
    if (!constant_name.empty()) {
        pts = constant_sweep(scn, cfg, constant_name, points, width, com.jobs);
    } else {
        std::size_t idx = ParameterVector::size();
        for (std::size_t d = 0; d < ParameterVector::size(); ++d)
            if (param_name == ParameterVector::name(d)) idx = d;
        if (idx == ParameterVector::size())
            throw CLI::ValidationError("--param must be one of h, beta, alpha");
        const std::vector<double> actual = read_series(actual_path);
        pts = behavioral_sweep(scn, cfg, idx, levels, actual, lambda, com.jobs);
    }

    Provenance prov;
    prov.seed = com.seed;
    prov.config_hash = scenario_config_hash(scn);
    const fs::path dir = resolve_out(com.out);
    std::ofstream out(dir / "sweep.csv");
    if (!out) throw CsvError("cannot open sweep output");
    out << "# " << prov.line() << "\n";
    out << "param,value,loss,month,median_price\n";
    for (const SweepPoint& pt : pts)
        for (std::size_t m = 0; m < pt.series.size(); ++m)
            out << pt.param << "," << fmt_double(pt.value) << "," << fmt_double(pt.loss) << ","
                << m << "," << fmt_double(pt.series[m]) << "\n";
    std::cout << "swept " << pts.size() << " values of "
              << (constant_name.empty() ? param_name : constant_name) << " -> "
              << (dir / "sweep.csv").string() << "\n";
    return kExitOk;
}

int cmd_report(const CommonOpts& com, const std::string& scenario_dir,
               const std::string& actual_path, int runs, int months, const std::string& kind) {
    const bool want_coverage = kind == "all" || kind == "coverage";
    std::vector<MoverKind> kinds;
    for (const MoverKind k : {MoverKind::NewRenter, MoverKind::NewOwner,
                              MoverKind::FirstTimeBuyer, MoverKind::LocalInvestor,
                              MoverKind::OverseasInvestor})
        if (kind == "all" || kind == "mobility" || kind == to_string(k)) kinds.push_back(k);
    if (!want_coverage && kinds.empty())
        throw CLI::ValidationError("--kind must be all, coverage, mobility or a mover kind");

    Scenario scn = load_scenario(scenario_dir);
    const std::vector<double> actual = read_series(actual_path);
    RunConfig cfg;
    cfg.params = scn.params;
    cfg.seed = com.seed;
    cfg.months = months;
    const MonteCarloResult mc = monte_carlo(scn, cfg, runs, com.jobs);
    const fs::path dir = resolve_out(com.out);

    if (want_coverage) {
        const CoverageReport cov = coverage(mc.summary, actual);

        // Cross-sectional check: does the simulated end state preserve the
        // scenario's area price ordering? Reference level per area is the
        // median of its seeded sale records.
        std::vector<double> initial_by_area, final_by_area;
        for (int a = 0; a < scn.n_areas(); ++a) {
            initial_by_area.push_back(median_of(scn.price_samples[static_cast<std::size_t>(a)]));
            double acc = 0.0;
            for (const SimulationTrace& tr : mc.traces)
                acc += tr.months.back().areas[static_cast<std::size_t>(a)].median_price;
            final_by_area.push_back(acc / static_cast<double>(mc.traces.size()));
        }
        const AreaRegression reg = area_regression(initial_by_area, final_by_area);
        write_coverage_json(cov, reg, (dir / "report.json").string());
        std::cout << "coverage over " << cov.months << " months: minmax "
                  << fmt_double(cov.minmax) << ", 1sd " << fmt_double(cov.one_sd) << ", 2sd "
                  << fmt_double(cov.two_sd) << "; area fit slope " << fmt_double(reg.fit.slope)
                  << " r2 " << fmt_double(reg.fit.r_squared) << "\n";
    }

    for (const MoverKind k : kinds) {
        const MobilityReport rep = mobility_report(mc.traces, scn, k);
        if (rep.empty)
            std::cerr << "warning: no movements of kind " << to_string(k) << " recorded\n";
        write_mobility_csv(rep,
                           (dir / (std::string("mobility_") + to_string(k) + ".csv")).string());
    }

    std::cout << "report artifacts -> " << dir.string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"agent-based housing market simulator"};
    app.require_subcommand(1);

    CommonOpts com;
    app.add_option("--seed", com.seed, "master random seed")->capture_default_str();
    app.add_option("--jobs", com.jobs, "worker threads")->capture_default_str();
    app.add_option("--out", com.out, "output directory (default $HOUSING_OUT_DIR or .)");

    SyntheticConfig gen;
    CLI::App* c_gen = app.add_subcommand("generate", "write a synthetic scenario bundle");
    c_gen->add_option("--areas", gen.n_areas)->capture_default_str()->check(CLI::PositiveNumber);
    c_gen->add_option("--months", gen.months)->capture_default_str()->check(CLI::PositiveNumber);
    c_gen->add_option("--households", gen.total_households, "full-region household count")
        ->capture_default_str();
    c_gen->add_option("--scale", gen.scale, "households per simulated agent")
        ->capture_default_str();
    c_gen->add_option("--burn-in", gen.burn_in)->capture_default_str();
    c_gen->add_option("--train-ratio", gen.train_ratio)->capture_default_str();

    std::string scenario_dir, actual_path, simulated_path;
    int runs = 1, months = -1;
    bool full_logs = false;
    std::string params_override;
    CLI::App* c_sim = app.add_subcommand("simulate", "run the simulator");
    c_sim->add_option("--scenario", scenario_dir, "scenario directory")->required();
    c_sim->add_option("--runs", runs)->capture_default_str();
    c_sim->add_option("--months", months, "-1 runs the scenario's full length")
        ->capture_default_str();
    c_sim->add_option("--params", params_override,
                      "parameter overrides, e.g. h=-0.11,beta=-1.03,alpha=0.59");
    c_sim->add_flag("--full-logs", full_logs, "deal and movement logs for every run");

    double lambda = 0.5;
    CLI::App* c_score = app.add_subcommand("score", "compare two price series");
    c_score->add_option("--actual", actual_path)->required();
    c_score->add_option("--simulated", simulated_path)->required();
    c_score->add_option("--lambda", lambda, "weight of the shape term")->capture_default_str();

    OptimizeOptions opt;
    double split_override = 0.0;
    std::string constraint = "peak";
    CLI::App* c_cal = app.add_subcommand("calibrate", "search the behavioral parameters");
    c_cal->add_option("--scenario", scenario_dir)->required();
    c_cal->add_option("--actual", actual_path, "observed regional price series")->required();
    c_cal->add_option("--trials", opt.n_trials)->capture_default_str();
    c_cal->add_option("--repeats", opt.repeats)->capture_default_str();
    c_cal->add_option("--startup", opt.startup)->capture_default_str();
    c_cal->add_option("--candidates", opt.candidates)->capture_default_str();
    c_cal->add_option("--gamma", opt.gamma)->capture_default_str();
    c_cal->add_option("--lambda", lambda)->capture_default_str();
    c_cal->add_option("--split", split_override, "override the scenario's train ratio");
    c_cal->add_option("--constraint", constraint, "trace shape gate: peak or none")
        ->capture_default_str();

    MorrisConfig mcfg;
    CLI::App* c_sens = app.add_subcommand("sensitivity", "screen parameter influence");
    c_sens->add_option("--scenario", scenario_dir)->required();
    c_sens->add_option("--actual", actual_path)->required();
    c_sens->add_option("--trajectories,--r", mcfg.trajectories)->capture_default_str();
    c_sens->add_option("--levels,--p", mcfg.levels)->capture_default_str();
    c_sens->add_option("--bootstrap", mcfg.bootstrap)->capture_default_str();
    c_sens->add_option("--lambda", lambda)->capture_default_str();

    std::string constant_name, param_name;
    int points = 9, sweep_levels = 100;
    double width = 0.2;
    CLI::App* c_sweep = app.add_subcommand("sweep", "grid over one constant or parameter");
    c_sweep->add_option("--scenario", scenario_dir)->required();
    c_sweep->add_option("--constant", constant_name, "institutional constant name");
    c_sweep->add_option("--param", param_name, "behavioral parameter: h, beta or alpha");
    c_sweep->add_option("--actual", actual_path, "required with --param");
    c_sweep->add_option("--points", points)->capture_default_str();
    c_sweep->add_option("--width", width, "relative half-width around the configured value")
        ->capture_default_str();
    c_sweep->add_option("--levels", sweep_levels)->capture_default_str();
    c_sweep->add_option("--lambda", lambda)->capture_default_str();
    c_sweep->add_option("--months", months)->capture_default_str();

    std::string report_kind = "all";
    CLI::App* c_rep = app.add_subcommand("report", "ensemble coverage and mobility reports");
    c_rep->add_option("--scenario", scenario_dir)->required();
    c_rep->add_option("--actual", actual_path)->required();
    c_rep->add_option("--runs", runs)->capture_default_str();
    c_rep->add_option("--months", months)->capture_default_str();
    c_rep->add_option("--kind", report_kind, "all, coverage, mobility or one mover kind")
        ->capture_default_str();

    // Let --seed, --jobs and --out appear after the subcommand name too.
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand(c_gen)) return cmd_generate(com, gen);
        if (app.got_subcommand(c_sim))
            return cmd_simulate(com, scenario_dir, runs, months, params_override, full_logs);
        if (app.got_subcommand(c_score)) return cmd_score(actual_path, simulated_path, lambda);
        if (app.got_subcommand(c_cal))
            return cmd_calibrate(com, scenario_dir, actual_path, opt, lambda, split_override,
                                 constraint);
        if (app.got_subcommand(c_sens))
            return cmd_sensitivity(com, scenario_dir, actual_path, mcfg, lambda);
        if (app.got_subcommand(c_sweep)) {
            if (constant_name.empty() == param_name.empty())
                throw CLI::ValidationError("pass exactly one of --constant or --param");
            if (!param_name.empty() && actual_path.empty())
                throw CLI::ValidationError("--param sweeps need --actual");
            return cmd_sweep(com, scenario_dir, constant_name, param_name, actual_path, points,
                             width, sweep_levels, lambda, months);
        }
        if (app.got_subcommand(c_rep))
            return cmd_report(com, scenario_dir, actual_path, runs, months, report_kind);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CsvError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const ScenarioError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const DisconnectedGraph& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const EmptySeries& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const LengthMismatch& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const DegenerateSplit& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
