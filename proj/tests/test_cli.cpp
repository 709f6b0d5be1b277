#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

/// Scratch directory removed on scope exit.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& stem) {
        static int counter = 0;
        path = fs::temp_directory_path() /
               (stem + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string str() const { return path.string(); }
};

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd =
        std::string(HOUSING_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string small_generate_args(const std::string& out_dir, unsigned seed = 77) {
    return "generate --areas 4 --months 12 --households 50000 --scale 100 --seed " +
           std::to_string(seed) + " --out " + out_dir;
}

} // namespace

TEST_CASE("the generate, simulate and score pipeline round trips") {
    TempDir scen("cli-scen");
    TempDir sims("cli-sims");
    TempDir logs("cli-logs");

    CHECK(run_cli(small_generate_args(scen.str()), logs.path / "gen.log") == 0);
    for (const char* f : {"areas.csv", "edges.csv", "exogenous.csv",
                          "income_brackets.csv", "sales.csv", "scenario.json"})
        CHECK(fs::exists(scen.path / f));

    CHECK(run_cli("simulate --scenario " + scen.str() + " --runs 2 --seed 5 --out " +
                      sims.str(),
                  logs.path / "sim.log") == 0);
    CHECK(fs::exists(sims.path / "runs" / "run_000.csv"));
    CHECK(fs::exists(sims.path / "runs" / "run_001.csv"));
    CHECK(fs::exists(sims.path / "summary.json"));
    const std::string trace = slurp(sims.path / "runs" / "run_000.csv");
    CHECK(trace.rfind("# housing-abm", 0) == 0);

    // A series scored against itself is a perfect match.
    const fs::path score_log = logs.path / "score.log";
    CHECK(run_cli("score --actual " + (sims.path / "runs" / "run_000.csv").string() +
                      " --simulated " + (sims.path / "runs" / "run_000.csv").string(),
                  score_log) == 0);
    const std::string score = slurp(score_log);
    CHECK(score.find("\"combined\": 0") != std::string::npos);
}

TEST_CASE("generation is reproducible byte for byte") {
    TempDir a("cli-gen-a");
    TempDir b("cli-gen-b");
    TempDir logs("cli-logs");
    CHECK(run_cli(small_generate_args(a.str(), 123), logs.path / "a.log") == 0);
    CHECK(run_cli(small_generate_args(b.str(), 123), logs.path / "b.log") == 0);
    for (const char* f : {"areas.csv", "edges.csv", "exogenous.csv",
                          "income_brackets.csv", "sales.csv", "scenario.json"}) {
        CHECK(slurp(a.path / f) == slurp(b.path / f));
        CHECK(!slurp(a.path / f).empty());
    }
}

TEST_CASE("traces are identical for any worker count") {
    TempDir scen("cli-scen");
    TempDir one("cli-jobs1");
    TempDir four("cli-jobs4");
    TempDir logs("cli-logs");
    REQUIRE(run_cli(small_generate_args(scen.str()), logs.path / "gen.log") == 0);

    const std::string tail = " --runs 3 --seed 11 --scenario " + scen.str();
    CHECK(run_cli("simulate" + tail + " --jobs 1 --out " + one.str(),
                  logs.path / "j1.log") == 0);
    CHECK(run_cli("simulate" + tail + " --jobs 4 --out " + four.str(),
                  logs.path / "j4.log") == 0);
    for (const char* f : {"runs/run_000.csv", "runs/run_001.csv", "runs/run_002.csv"}) {
        const std::string left = slurp(one.path / f);
        CHECK(!left.empty());
        CHECK(left == slurp(four.path / f));
    }
    CHECK(slurp(one.path / "summary.json") == slurp(four.path / "summary.json"));
}

TEST_CASE("behavioral overrides are parsed and validated") {
    TempDir scen("cli-scen");
    TempDir out("cli-out");
    TempDir logs("cli-logs");
    REQUIRE(run_cli(small_generate_args(scen.str()), logs.path / "gen.log") == 0);

    CHECK(run_cli("simulate --scenario " + scen.str() +
                      " --params h=-0.11,beta=-1.03,alpha=0.59 --out " + out.str(),
                  logs.path / "ok.log") == 0);
    CHECK(run_cli("simulate --scenario " + scen.str() + " --params bogus=1 --out " +
                      out.str(),
                  logs.path / "bad-key.log") == 2);
    CHECK(run_cli("simulate --scenario " + scen.str() + " --params h=abc --out " +
                      out.str(),
                  logs.path / "bad-num.log") == 2);
}

TEST_CASE("usage and data problems map to distinct exit codes") {
    TempDir scen("cli-scen");
    TempDir out("cli-out");
    TempDir logs("cli-logs");
    REQUIRE(run_cli(small_generate_args(scen.str()), logs.path / "gen.log") == 0);

    // Unknown flag and missing required option are usage errors.
    CHECK(run_cli("simulate --scenario " + scen.str() + " --no-such-flag",
                  logs.path / "flag.log") == 2);
    CHECK(run_cli("simulate", logs.path / "missing.log") == 2);
    CHECK(run_cli("report --scenario " + scen.str() + " --actual none.csv --kind bogus",
                  logs.path / "kind.log") == 2);

    // A nonexistent scenario directory is a data error.
    CHECK(run_cli("simulate --scenario " + (out.path / "nowhere").string(),
                  logs.path / "noscen.log") == 3);
    CHECK(run_cli("score --actual " + (out.path / "missing.csv").string() +
                      " --simulated " + (out.path / "missing.csv").string(),
                  logs.path / "noscore.log") == 3);
}

TEST_CASE("the report command writes the requested artifacts") {
    TempDir scen("cli-scen");
    TempDir sims("cli-sims");
    TempDir rep("cli-rep");
    TempDir logs("cli-logs");
    REQUIRE(run_cli(small_generate_args(scen.str()), logs.path / "gen.log") == 0);
    REQUIRE(run_cli("simulate --scenario " + scen.str() + " --runs 1 --seed 3 --out " +
                        sims.str(),
                    logs.path / "sim.log") == 0);
    const std::string actual = (sims.path / "runs" / "run_000.csv").string();

    CHECK(run_cli("report --scenario " + scen.str() + " --actual " + actual +
                      " --runs 4 --kind coverage --seed 3 --out " + rep.str(),
                  logs.path / "rep.log") == 0);
    CHECK(fs::exists(rep.path / "report.json"));

    CHECK(run_cli("report --scenario " + scen.str() + " --actual " + actual +
                      " --runs 4 --kind new_renter --seed 3 --out " + rep.str(),
                  logs.path / "rep2.log") == 0);
    CHECK(fs::exists(rep.path / "mobility_new_renter.csv"));
}
