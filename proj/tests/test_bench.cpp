#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cfa/bench.hpp"
#include "cfa/simulator.hpp"

using namespace cfa;
namespace fs = std::filesystem;

namespace {

// Shrunk copy of the default scenario so each rollout stays cheap.
Scenario tiny(double noise, int horizon = 16) {
    Scenario s = default_scenario(noise);
    s.params.horizon = horizon;
    s.params.lookahead = 6;
    const std::size_t n = static_cast<std::size_t>(horizon + 1);
    s.initial_forecast.resize(n);
    s.market_price.resize(n);
    s.grid_price.resize(n);
    s.demand.resize(n);
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("default grid and identity parameters") {
    const std::vector<double> g = default_grid();
    REQUIRE(g.size() == 11);
    CHECK(g.front() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.back() == doctest::Approx(1.5).epsilon(1e-15));
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(g[i] - g[i - 1] == doctest::Approx(0.1).epsilon(1e-12));
    }

    CHECK(identity_theta(PolicyFamily::benchmark, 9).empty());
    CHECK(identity_theta(PolicyFamily::constant, 9) == std::vector<double>{1.0});
    const auto ones = identity_theta(PolicyFamily::lookup, 5);
    REQUIRE(ones.size() == 5);
    for (double v : ones) CHECK(v == 1.0);
    CHECK(identity_theta(PolicyFamily::exponential, 9) ==
          std::vector<double>({1.0, 0.0}));
}

TEST_CASE("constant sweep at the identity point matches the benchmark exactly") {
    SweepConfig cfg;
    cfg.scenario = tiny(0.0);
    cfg.noise_levels = {0.0};
    cfg.grid = {1.0};
    cfg.select_paths = 4;
    cfg.eval_paths = 8;
    cfg.seed = 42;
    const SweepResult r = grid_search_const(cfg);
    REQUIRE(r.points.size() == 1);
    REQUIRE(r.best.size() == 1);
    CHECK(r.points[0].coordinate == -1);
    CHECK(r.points[0].theta == 1.0);
    CHECK(r.points[0].std_error == 0.0);  // deterministic paths collapse
    CHECK(r.best[0].theta == 1.0);
    // theta = 1 reproduces the raw forecast, so the held-out costs agree
    // to the last bit and the relative gap is exactly zero.
    CHECK(r.best[0].mean_cost == r.best[0].benchmark_mean);
    CHECK(r.best[0].improvement == 0.0);
}

TEST_CASE("noiseless sweeps pick the cheapest grid point and never lose to 1.0") {
    SweepConfig cfg;
    cfg.scenario = tiny(0.0);
    cfg.noise_levels = {0.0};
    cfg.grid = {0.8, 1.0, 1.2};
    cfg.select_paths = 2;
    cfg.eval_paths = 2;
    cfg.seed = 7;
    const SweepResult r = grid_search_const(cfg);
    REQUIRE(r.points.size() == 3);
    double min_mean = r.points[0].mean_cost;
    for (const auto& p : r.points) min_mean = std::min(min_mean, p.mean_cost);
    // With zero noise the held-out re-score equals the selection score.
    CHECK(r.best[0].mean_cost == min_mean);
    CHECK(r.best[0].improvement <= 0.0);  // 1.0 is in the grid

    const SweepResult lk = coordinate_search_lkup(cfg);
    const int dim = cfg.scenario.params.lookahead;
    REQUIRE(lk.points.size() == static_cast<std::size_t>(3 * dim));
    REQUIRE(lk.best.size() == static_cast<std::size_t>(dim));
    for (int c = 0; c < dim; ++c) {
        CHECK(lk.best[static_cast<std::size_t>(c)].coordinate == c);
        CHECK(lk.best[static_cast<std::size_t>(c)].improvement <= 0.0);
    }
}

TEST_CASE("sweep results do not depend on the worker count") {
    SweepConfig cfg;
    cfg.scenario = tiny(0.2);
    cfg.noise_levels = {0.2};
    cfg.grid = {0.9, 1.1};
    cfg.select_paths = 6;
    cfg.eval_paths = 8;
    cfg.seed = 5;
    cfg.workers = 1;
    const SweepResult a = grid_search_const(cfg);
    cfg.workers = 3;
    const SweepResult b = grid_search_const(cfg);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].mean_cost == b.points[i].mean_cost);
        CHECK(a.points[i].std_error == b.points[i].std_error);
    }
    REQUIRE(a.best.size() == b.best.size());
    CHECK(a.best[0].theta == b.best[0].theta);
    CHECK(a.best[0].mean_cost == b.best[0].mean_cost);
    CHECK(a.best[0].improvement == b.best[0].improvement);

    // Reruns of the identical config reproduce the CSVs byte for byte.
    cfg.workers = 1;
    const SweepResult c = grid_search_const(cfg);
    std::ostringstream s1, s2, b1, b2;
    write_sweep_csv(a, s1);
    write_sweep_csv(c, s2);
    write_best_csv(a, b1);
    write_best_csv(c, b2);
    CHECK(s1.str() == s2.str());
    CHECK(b1.str() == b2.str());
    CHECK(s1.str().rfind("noise_level,coordinate,theta,mean_cost,std_error\n", 0) == 0);
    CHECK(b1.str().rfind(
              "noise_level,coordinate,theta,mean_cost,benchmark_mean,improvement\n",
              0) == 0);
}

TEST_CASE("sweep config validation") {
    SweepConfig cfg;
    cfg.scenario = tiny(0.1);
    cfg.noise_levels = {};
    CHECK_THROWS(grid_search_const(cfg));
    cfg.noise_levels = {-0.1};
    CHECK_THROWS(grid_search_const(cfg));
    cfg.noise_levels = {0.1};
    cfg.select_paths = 0;
    CHECK_THROWS(grid_search_const(cfg));
    cfg.select_paths = 4;
    cfg.grid = {std::nan("")};
    CHECK_THROWS(coordinate_search_lkup(cfg));
}

TEST_CASE("tune with zero iterations returns the identity untouched") {
    TuneConfig cfg;
    cfg.scenario = tiny(0.3);
    cfg.family = PolicyFamily::lookup;
    cfg.sang.iterations = 0;
    cfg.eval_paths = 8;
    cfg.seed = 13;
    const TuneResult r = tune(cfg);
    CHECK(r.sang.total_evals == 0);
    CHECK(r.sang.history.empty());
    CHECK(r.tuned_policy.family == PolicyFamily::lookup);
    const auto ones = identity_theta(PolicyFamily::lookup, 6);
    CHECK(r.tuned_policy.theta == ones);
    // The untouched identity is the benchmark policy, on shared seeds.
    CHECK(r.heldout_mean == r.heldout_benchmark);
    CHECK(r.heldout_improvement == 0.0);
    CHECK(r.curve.empty());
    CHECK(r.monitor_evals == 0);
}

TEST_CASE("tune traces a monitor curve on the requested stride") {
    TuneConfig cfg;
    cfg.scenario = tiny(0.3, 12);
    cfg.family = PolicyFamily::constant;
    cfg.sang.iterations = 5;
    cfg.sang.batch = 1;
    cfg.sang.delta = 0.5;
    cfg.sang.lip_l0 = 50.0;  // conservative; keeps the probe steps small
    cfg.eval_paths = 4;
    cfg.monitor_paths = 4;
    cfg.monitor_stride = 2;
    cfg.seed = 3;
    const TuneResult r = tune(cfg);
    CHECK(r.sang.total_evals == 10);
    REQUIRE(r.sang.history.size() == 5);
    REQUIRE(r.tuned_policy.theta.size() == 1);
    // Snapshots at k = 0, 2, 4 plus the unaligned tail at k = 5.
    REQUIRE(r.curve.size() == 4);
    CHECK(r.curve[0].k == 0);
    CHECK(r.curve[0].tuning_evals == 0);
    CHECK(r.curve[1].k == 2);
    CHECK(r.curve[1].tuning_evals == 4);
    CHECK(r.curve[2].k == 4);
    CHECK(r.curve[2].tuning_evals == 8);
    CHECK(r.curve[3].k == 5);
    CHECK(r.curve[3].tuning_evals == 10);
    CHECK(r.monitor_evals == 4 * 5);  // benchmark pool plus four snapshots

    std::ostringstream os;
    write_tune_csv(r, os);
    std::istringstream in(os.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "k,tuning_evals,mean_cost,improvement");
    int rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 4);
}

TEST_CASE("tune config validation") {
    TuneConfig cfg;
    cfg.scenario = tiny(0.1);
    cfg.family = PolicyFamily::benchmark;
    CHECK_THROWS(tune(cfg));
    cfg.family = PolicyFamily::lookup;
    cfg.eval_paths = 0;
    CHECK_THROWS(tune(cfg));
    cfg.eval_paths = 4;
    cfg.monitor_stride = 0;
    CHECK_THROWS(tune(cfg));
    cfg.monitor_stride = 1;
    cfg.sang.theta0 = {0.5};  // lookup here needs 6 values
    CHECK_THROWS(tune(cfg));
}

TEST_CASE("manifest entries carry sweep and tune rows") {
    SweepResult sweep;
    sweep.best.push_back({0.2, -1, 0.9, -105.5, -100.0, -0.055});
    sweep.best.push_back({0.4, 3, 1.1, -99.0, -100.0, 0.01});
    const auto rows = manifest_entries(sweep);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].noise_level == 0.2);
    CHECK(rows[0].coordinate == -1);
    CHECK(rows[0].theta == "0.9");
    CHECK(rows[0].mean_cost == -105.5);
    CHECK(rows[0].benchmark_mean == -100.0);
    CHECK(rows[0].improvement == -0.055);
    CHECK(rows[1].coordinate == 3);
    CHECK(rows[1].theta == "1.1");

    TuneResult tuned;
    tuned.tuned_policy = PolicySpec{PolicyFamily::exponential, {1.0, 0.5}};
    tuned.heldout_mean = -110.0;
    tuned.heldout_benchmark = -100.0;
    tuned.heldout_improvement = -0.1;
    const auto trows = manifest_entries(tuned, 0.2);
    REQUIRE(trows.size() == 1);
    CHECK(trows[0].noise_level == 0.2);
    CHECK(trows[0].theta == "1;0.5");
    CHECK(trows[0].improvement == -0.1);
}

TEST_CASE("report collects manifests and flags unreadable ones") {
    const fs::path root = fs::temp_directory_path() / "cfa_bench_report_test";
    fs::remove_all(root);
    const fs::path in_dir = root / "results";
    const fs::path out_dir = root / "out";
    fs::create_directories(in_dir);

    write_manifest((in_dir / "b.manifest.json").string(), "expB", "lkup",
                   {{0.4, 2, "1.2", -101.0, -100.0, -0.01},
                    {0.2, 0, "0.8", -104.0, -100.0, -0.04}});
    write_manifest((in_dir / "a.manifest.json").string(), "expA", "const",
                   {{0.2, -1, "0.9", -106.0, -100.0, -0.06}});
    {
        std::ofstream bad(in_dir / "c.manifest.json");
        bad << "{ this is not json";
    }
    {
        std::ofstream note(in_dir / "notes.txt");
        note << "ignored\n";
    }

    const ReportResult r = report(in_dir.string(), out_dir.string());
    REQUIRE(r.rows.size() == 3);
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].find("c.manifest.json") != std::string::npos);
    CHECK(r.rows[0].experiment == "expA");
    CHECK(r.rows[1].experiment == "expB");
    CHECK(r.rows[1].entry.noise_level == 0.2);  // sorted by noise within expB
    CHECK(r.rows[2].entry.noise_level == 0.4);
    CHECK(r.rows[0].family == "const");

    const std::string csv = slurp(out_dir / "report.csv");
    CHECK(csv.rfind("experiment,family,noise_level,coordinate,theta,mean_cost,"
                    "benchmark_mean,improvement\n",
                    0) == 0);
    CHECK(csv.find("expA,const,0.2,-1,0.9,-106,-100,-0.06") != std::string::npos);
    const std::string summary = slurp(out_dir / "summary.txt");
    CHECK(summary.find("rows: 3") != std::string::npos);
    CHECK(summary.find("errors: 1") != std::string::npos);

    // A missing input directory is reported, not fatal.
    const ReportResult miss =
        report((root / "nope").string(), (root / "out2").string());
    CHECK(miss.rows.empty());
    REQUIRE(miss.errors.size() == 1);
    CHECK(miss.errors[0].find("not a directory") != std::string::npos);
    CHECK(fs::exists(root / "out2" / "report.csv"));

    fs::remove_all(root);
}
