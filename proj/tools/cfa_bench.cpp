#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfa/bench.hpp"
#include "cfa/policies.hpp"
#include "cfa/simulator.hpp"

namespace fs = std::filesystem;

namespace {

cfa::Scenario load_scenario(const std::string& config_path, double noise_level) {
    if (config_path.empty()) return cfa::default_scenario(noise_level);
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config: " + config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    cfa::Scenario s = cfa::scenario_from_json(buf.str());
    s.noise_level = noise_level;
    return s;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& fn) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    fn(out);
}

struct CommonOpts {
    std::string config;
    std::vector<double> rho{0.0};
    std::string out_dir;
    std::uint64_t seed = 0;
    int paths = 1000;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config, "Scenario JSON file (default: built-in)");
    cmd->add_option("--rho-e", opts.rho, "Forecast noise level(s)");
    cmd->add_option("--seed", opts.seed, "Master seed");
    cmd->add_option("--paths", opts.paths, "Held-out evaluation path count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", opts.out_dir, "Output directory");
}

fs::path ensure_out(const CommonOpts& opts) {
    if (opts.out_dir.empty()) throw std::runtime_error("--out is required here");
    fs::create_directories(opts.out_dir);
    return opts.out_dir;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parametric lookahead policy benchmark harness"};
    app.require_subcommand(1);

    // simulate
    CommonOpts sim_opts;
    std::string sim_policy = "benchmark";
    std::vector<double> sim_theta;
    auto* sim = app.add_subcommand("simulate", "Run one rollout and dump its trajectory");
    add_common(sim, sim_opts);
    sim->add_option("--policy", sim_policy, "benchmark|const|lkup|exp");
    sim->add_option("--theta", sim_theta, "Policy parameters (family default if omitted)");

    // grid
    CommonOpts grid_opts;
    int grid_select_paths = 48;
    std::vector<double> grid_values;
    auto* grid = app.add_subcommand("grid", "Grid search for the constant family");
    add_common(grid, grid_opts);
    grid->add_option("--select-paths", grid_select_paths,
                     "CRN paths used to pick the argmin")
        ->check(CLI::PositiveNumber);
    grid->add_option("--grid", grid_values, "Theta grid (default 0.5..1.5 step 0.1)");

    // coord
    CommonOpts coord_opts;
    int coord_select_paths = 48;
    std::vector<double> coord_values;
    auto* coord = app.add_subcommand(
        "coord", "Per-coordinate sweep for the lookup family");
    add_common(coord, coord_opts);
    coord->add_option("--select-paths", coord_select_paths,
                      "CRN paths used to pick each argmin")
        ->check(CLI::PositiveNumber);
    coord->add_option("--grid", coord_values, "Theta grid (default 0.5..1.5 step 0.1)");

    // tune
    CommonOpts tune_opts;
    std::string tune_policy = "lkup";
    int tune_iters = 30;
    int tune_batch = 10;
    double tune_delta = 1.0;
    double tune_lip = 1.0;
    bool tune_auto_l0 = false;
    double tune_alpha_scale = 2.0;
    std::string tune_rule = "rmsprop";
    double tune_rms_b = 1.0;
    double tune_rms_gamma = 0.1;
    int tune_monitor_paths = 0;
    int tune_monitor_stride = 5;
    auto* tune_cmd = app.add_subcommand("tune", "Zeroth-order search over policy parameters");
    add_common(tune_cmd, tune_opts);
    tune_cmd->add_option("--policy", tune_policy, "const|lkup|exp");
    tune_cmd->add_option("--iters", tune_iters, "Search iterations")
        ->check(CLI::NonNegativeNumber);
    tune_cmd->add_option("--batch", tune_batch, "Gradient pairs per iteration")
        ->check(CLI::PositiveNumber);
    tune_cmd->add_option("--delta", tune_delta, "Schedule scale");
    tune_cmd->add_option("--lip-l0", tune_lip, "Lipschitz scale for the schedule");
    tune_cmd->add_flag("--auto-l0", tune_auto_l0,
                       "Estimate the Lipschitz scale from finite differences");
    tune_cmd->add_option("--alpha-scale", tune_alpha_scale, "Averaging weight multiplier");
    tune_cmd->add_option("--rule", tune_rule, "corollary|rmsprop");
    tune_cmd->add_option("--rms-b", tune_rms_b, "Step numerator for rmsprop");
    tune_cmd->add_option("--rms-gamma", tune_rms_gamma, "Accumulator weight for rmsprop");
    tune_cmd->add_option("--monitor-paths", tune_monitor_paths,
                         "Paths per improvement-curve snapshot (0 disables)")
        ->check(CLI::NonNegativeNumber);
    tune_cmd->add_option("--monitor-stride", tune_monitor_stride,
                         "Iterations between snapshots")
        ->check(CLI::PositiveNumber);

    // report
    std::string report_results;
    std::string report_out;
    auto* rep = app.add_subcommand("report", "Consolidate experiment manifests");
    rep->add_option("--results", report_results, "Directory holding *.manifest.json")
        ->required();
    rep->add_option("--out", report_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const cfa::Scenario scen = load_scenario(sim_opts.config, sim_opts.rho.front());
            cfa::PolicySpec policy;
            policy.family = cfa::parse_family(sim_policy);
            policy.theta = sim_theta.empty()
                               ? cfa::identity_theta(policy.family, scen.params.lookahead)
                               : sim_theta;
            const cfa::Trajectory traj = cfa::rollout(policy, scen, sim_opts.seed);
            if (sim_opts.out_dir.empty()) {
                cfa::write_csv(traj, std::cout);
            } else {
                const fs::path dir = ensure_out(sim_opts);
                write_file(dir / "trajectory.csv",
                           [&](std::ostream& os) { cfa::write_csv(traj, os); });
            }
            std::cerr << "total cost: " << traj.total_cost << "\n";
            return 0;
        }

        if (grid->parsed() || coord->parsed()) {
            const bool is_grid = grid->parsed();
            const CommonOpts& opts = is_grid ? grid_opts : coord_opts;
            cfa::SweepConfig cfg;
            cfg.scenario = load_scenario(opts.config, 0.0);
            cfg.noise_levels = opts.rho;
            cfg.grid = is_grid ? grid_values : coord_values;
            cfg.select_paths = is_grid ? grid_select_paths : coord_select_paths;
            cfg.eval_paths = opts.paths;
            cfg.seed = opts.seed;
            const cfa::SweepResult res =
                is_grid ? cfa::grid_search_const(cfg) : cfa::coordinate_search_lkup(cfg);
            const fs::path dir = ensure_out(opts);
            const std::string tag = is_grid ? "grid" : "coord";
            write_file(dir / (tag + "_points.csv"),
                       [&](std::ostream& os) { cfa::write_sweep_csv(res, os); });
            write_file(dir / (tag + "_best.csv"),
                       [&](std::ostream& os) { cfa::write_best_csv(res, os); });
            cfa::write_manifest((dir / (tag + ".manifest.json")).string(),
                                is_grid ? "grid-const" : "coord-lkup",
                                is_grid ? "const" : "lkup", cfa::manifest_entries(res));
            for (const auto& b : res.best) {
                std::cout << "rho=" << b.noise_level;
                if (b.coordinate >= 0) std::cout << " coordinate=" << b.coordinate;
                std::cout << " argmin=" << b.theta << " improvement=" << b.improvement
                          << "\n";
            }
            return 0;
        }

        if (tune_cmd->parsed()) {
            cfa::TuneConfig cfg;
            cfg.scenario = load_scenario(tune_opts.config, tune_opts.rho.front());
            cfg.family = cfa::parse_family(tune_policy);
            cfg.eval_paths = tune_opts.paths;
            cfg.monitor_paths = tune_monitor_paths;
            cfg.monitor_stride = tune_monitor_stride;
            cfg.seed = tune_opts.seed;
            cfg.sang.iterations = tune_iters;
            cfg.sang.batch = tune_batch;
            cfg.sang.delta = tune_delta;
            cfg.sang.alpha_scale = tune_alpha_scale;
            cfg.sang.rms_b = tune_rms_b;
            cfg.sang.rms_gamma = tune_rms_gamma;
            if (tune_rule == "corollary") {
                cfg.sang.rule = cfa::StepsizeRule::corollary;
            } else if (tune_rule == "rmsprop") {
                cfg.sang.rule = cfa::StepsizeRule::rmsprop;
            } else {
                throw std::runtime_error("unknown rule: " + tune_rule);
            }
            cfg.sang.lip_l0 = tune_lip;
            if (tune_auto_l0) {
                const auto theta0 =
                    cfa::identity_theta(cfg.family, cfg.scenario.params.lookahead);
                const cfa::PairedObjective oracle =
                    [&](const std::vector<double>& theta, std::uint64_t omega) {
                        return cfa::rollout(cfa::PolicySpec{cfg.family, theta},
                                            cfg.scenario, omega)
                            .total_cost;
                    };
                const double est = cfa::estimate_lipschitz(oracle, theta0, 0.25, 16,
                                                           cfg.seed + 17);
                if (est > 0.0) cfg.sang.lip_l0 = est;
                std::cerr << "estimated L0: " << cfg.sang.lip_l0 << "\n";
            }
            const cfa::TuneResult res = cfa::tune(cfg);
            const fs::path dir = ensure_out(tune_opts);
            write_file(dir / "tune_history.csv", [&](std::ostream& os) {
                cfa::write_history_csv(res.sang.history, os);
            });
            if (!res.curve.empty()) {
                write_file(dir / "tune_curve.csv",
                           [&](std::ostream& os) { cfa::write_tune_csv(res, os); });
            }
            cfa::write_manifest((dir / "tune.manifest.json").string(),
                                "tune-" + std::string(cfa::family_name(cfg.family)),
                                cfa::family_name(cfg.family),
                                cfa::manifest_entries(res, cfg.scenario.noise_level));
            std::cout << "reported iterate k=" << res.sang.r_index
                      << " heldout_mean=" << res.heldout_mean
                      << " benchmark=" << res.heldout_benchmark
                      << " improvement=" << res.heldout_improvement << "\n";
            return 0;
        }

        if (rep->parsed()) {
            const cfa::ReportResult res = cfa::report(report_results, report_out);
            std::cout << "rows: " << res.rows.size() << "\n";
            for (const auto& e : res.errors) std::cerr << "error: " << e << "\n";
            return res.rows.empty() || !res.errors.empty() ? 1 : 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
