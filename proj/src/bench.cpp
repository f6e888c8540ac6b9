#include "cfa/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

namespace fs = std::filesystem;

namespace cfa {

namespace {

std::string format_value(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

std::string join_theta(const std::vector<double>& theta) {
    std::string out;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (i > 0) out += ';';
        out += format_value(theta[i]);
    }
    return out;
}

std::vector<double> sweep_grid(const SweepConfig& config) {
    std::vector<double> grid = config.grid.empty() ? default_grid() : config.grid;
    for (double g : grid) {
        if (!std::isfinite(g)) throw std::invalid_argument("grid values must be finite");
    }
    if (grid.empty()) throw std::invalid_argument("grid must be nonempty");
    return grid;
}

// Strictly smaller mean wins; exact ties resolve toward the identity
// multiplier, so a cost-flat coordinate reports theta = 1 instead of the
// first grid point.
bool improves(double mean, double theta, double best_mean, double best_theta,
              bool first) {
    if (first || mean < best_mean) return true;
    return mean == best_mean && std::fabs(theta - 1.0) < std::fabs(best_theta - 1.0);
}

void check_sweep(const SweepConfig& config) {
    if (config.noise_levels.empty()) {
        throw std::invalid_argument("noise_levels must be nonempty");
    }
    for (double r : config.noise_levels) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw std::invalid_argument("noise levels must be finite and >= 0");
        }
    }
    if (config.select_paths < 1 || config.eval_paths < 1) {
        throw std::invalid_argument("path counts must be >= 1");
    }
}

}  // namespace

std::vector<double> default_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 10; ++i) g.push_back(0.5 + 0.1 * i);
    return g;
}

std::vector<double> identity_theta(PolicyFamily family, int lookahead) {
    switch (family) {
        case PolicyFamily::benchmark:
            return {};
        case PolicyFamily::constant:
            return {1.0};
        case PolicyFamily::lookup:
            return std::vector<double>(static_cast<std::size_t>(lookahead), 1.0);
        case PolicyFamily::exponential:
            return {1.0, 0.0};
    }
    throw std::invalid_argument("unknown policy family");
}

SweepResult grid_search_const(const SweepConfig& config) {
    check_sweep(config);
    const std::vector<double> grid = sweep_grid(config);
    SweepResult result;
    for (double rho : config.noise_levels) {
        Scenario scen = config.scenario;
        scen.noise_level = rho;
        double best_theta = grid.front();
        double best_mean = 0.0;
        bool first = true;
        for (double theta : grid) {
            const PolicySpec policy{PolicyFamily::constant, {theta}};
            const Estimate est = estimate_objective(policy, scen, config.select_paths,
                                                    config.seed, config.workers);
            result.points.push_back({rho, -1, theta, est.mean, est.std_error});
            if (improves(est.mean, theta, best_mean, best_theta, first)) {
                best_mean = est.mean;
                best_theta = theta;
                first = false;
            }
        }
        const std::uint64_t held_out = config.seed + kHeldOutOffset;
        const Estimate tuned =
            estimate_objective(PolicySpec{PolicyFamily::constant, {best_theta}}, scen,
                               config.eval_paths, held_out, config.workers);
        const Estimate bench =
            estimate_objective(PolicySpec{PolicyFamily::benchmark, {}}, scen,
                               config.eval_paths, held_out, config.workers);
        result.best.push_back({rho, -1, best_theta, tuned.mean, bench.mean,
                               improvement(tuned.mean, bench.mean)});
    }
    return result;
}

SweepResult coordinate_search_lkup(const SweepConfig& config) {
    check_sweep(config);
    const std::vector<double> grid = sweep_grid(config);
    const int dim = config.scenario.params.lookahead;
    SweepResult result;
    for (double rho : config.noise_levels) {
        Scenario scen = config.scenario;
        scen.noise_level = rho;
        const std::uint64_t held_out = config.seed + kHeldOutOffset;
        const Estimate bench =
            estimate_objective(PolicySpec{PolicyFamily::benchmark, {}}, scen,
                               config.eval_paths, held_out, config.workers);
        for (int coord = 0; coord < dim; ++coord) {
            double best_theta = grid.front();
            double best_mean = 0.0;
            bool first = true;
            for (double theta : grid) {
                std::vector<double> full(static_cast<std::size_t>(dim), 1.0);
                full[static_cast<std::size_t>(coord)] = theta;
                const PolicySpec policy{PolicyFamily::lookup, std::move(full)};
                const Estimate est = estimate_objective(
                    policy, scen, config.select_paths, config.seed, config.workers);
                result.points.push_back({rho, coord, theta, est.mean, est.std_error});
                if (improves(est.mean, theta, best_mean, best_theta, first)) {
                    best_mean = est.mean;
                    best_theta = theta;
                    first = false;
                }
            }
            std::vector<double> full(static_cast<std::size_t>(dim), 1.0);
            full[static_cast<std::size_t>(coord)] = best_theta;
            const Estimate tuned =
                estimate_objective(PolicySpec{PolicyFamily::lookup, std::move(full)},
                                   scen, config.eval_paths, held_out, config.workers);
            result.best.push_back({rho, coord, best_theta, tuned.mean, bench.mean,
                                   improvement(tuned.mean, bench.mean)});
        }
    }
    return result;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
    out << "noise_level,coordinate,theta,mean_cost,std_error\n";
    out << std::setprecision(12);
    for (const auto& p : result.points) {
        out << p.noise_level << ',' << p.coordinate << ',' << p.theta << ','
            << p.mean_cost << ',' << p.std_error << '\n';
    }
}

void write_best_csv(const SweepResult& result, std::ostream& out) {
    out << "noise_level,coordinate,theta,mean_cost,benchmark_mean,improvement\n";
    out << std::setprecision(12);
    for (const auto& b : result.best) {
        out << b.noise_level << ',' << b.coordinate << ',' << b.theta << ','
            << b.mean_cost << ',' << b.benchmark_mean << ',' << b.improvement << '\n';
    }
}

TuneResult tune(const TuneConfig& config) {
    if (config.family == PolicyFamily::benchmark) {
        throw std::invalid_argument("tune requires a parameterized family");
    }
    if (config.eval_paths < 1) throw std::invalid_argument("eval_paths must be >= 1");
    if (config.monitor_paths < 0) {
        throw std::invalid_argument("monitor_paths must be >= 0");
    }
    if (config.monitor_stride < 1) {
        throw std::invalid_argument("monitor_stride must be >= 1");
    }
    const Scenario& scen = config.scenario;
    validate(scen);
    const int dim = theta_dim(config.family, scen.params.lookahead);

    SangConfig sang_cfg = config.sang;
    sang_cfg.dim = dim;
    sang_cfg.seed = config.seed;
    if (sang_cfg.theta0.empty()) {
        sang_cfg.theta0 = identity_theta(config.family, scen.params.lookahead);
    } else if (sang_cfg.theta0.size() != static_cast<std::size_t>(dim)) {
        throw std::invalid_argument("theta0 length does not match the family");
    }

    const PairedObjective oracle = [&](const std::vector<double>& theta,
                                       std::uint64_t omega) {
        return rollout(PolicySpec{config.family, theta}, scen, omega).total_cost;
    };

    TuneResult result;
    result.sang = sang_run(sang_cfg, oracle);
    result.tuned_policy = PolicySpec{config.family, result.sang.theta_r};

    const std::uint64_t held_out = config.seed + kHeldOutOffset;
    const Estimate tuned = estimate_objective(result.tuned_policy, scen,
                                              config.eval_paths, held_out,
                                              config.workers);
    const Estimate bench =
        estimate_objective(PolicySpec{PolicyFamily::benchmark, {}}, scen,
                           config.eval_paths, held_out, config.workers);
    result.heldout_mean = tuned.mean;
    result.heldout_benchmark = bench.mean;
    result.heldout_improvement = improvement(tuned.mean, bench.mean);

    if (config.monitor_paths > 0) {
        const int per_estimate = scen.noise_level == 0.0 ? 1 : config.monitor_paths;
        const Estimate monitor_bench =
            estimate_objective(PolicySpec{PolicyFamily::benchmark, {}}, scen,
                               config.monitor_paths, held_out, config.workers);
        result.monitor_evals += per_estimate;
        const auto add_snapshot = [&](int k, long evals,
                                      const std::vector<double>& theta) {
            const Estimate est =
                estimate_objective(PolicySpec{config.family, theta}, scen,
                                   config.monitor_paths, held_out, config.workers);
            result.monitor_evals += per_estimate;
            result.curve.push_back({k, evals, est.mean,
                                    improvement(est.mean, monitor_bench.mean)});
        };
        add_snapshot(0, 0, sang_cfg.theta0);
        const int n = static_cast<int>(result.sang.history.size());
        for (int k = config.monitor_stride; k <= n; k += config.monitor_stride) {
            const auto& row = result.sang.history[static_cast<std::size_t>(k - 1)];
            add_snapshot(k, row.evals_cumulative, row.theta);
        }
        if (n > 0 && (n % config.monitor_stride) != 0) {
            const auto& row = result.sang.history.back();
            add_snapshot(n, row.evals_cumulative, row.theta);
        }
    }
    return result;
}

void write_tune_csv(const TuneResult& result, std::ostream& out) {
    out << "k,tuning_evals,mean_cost,improvement\n";
    out << std::setprecision(12);
    for (const auto& s : result.curve) {
        out << s.k << ',' << s.tuning_evals << ',' << s.mean_cost << ','
            << s.improvement << '\n';
    }
}

std::vector<ManifestEntry> manifest_entries(const SweepResult& result) {
    std::vector<ManifestEntry> entries;
    entries.reserve(result.best.size());
    for (const auto& b : result.best) {
        entries.push_back({b.noise_level, b.coordinate, format_value(b.theta),
                           b.mean_cost, b.benchmark_mean, b.improvement});
    }
    return entries;
}

std::vector<ManifestEntry> manifest_entries(const TuneResult& result,
                                            double noise_level) {
    return {{noise_level, -1, join_theta(result.tuned_policy.theta),
             result.heldout_mean, result.heldout_benchmark,
             result.heldout_improvement}};
}

void write_manifest(const std::string& path, const std::string& experiment,
                    const std::string& family,
                    const std::vector<ManifestEntry>& entries) {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["family"] = family;
    auto& arr = j["entries"] = nlohmann::json::array();
    for (const auto& e : entries) {
        arr.push_back({{"noise_level", e.noise_level},
                       {"coordinate", e.coordinate},
                       {"theta", e.theta},
                       {"mean_cost", e.mean_cost},
                       {"benchmark_mean", e.benchmark_mean},
                       {"improvement", e.improvement}});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << j.dump(2) << '\n';
}

ReportResult report(const std::string& results_dir, const std::string& out_dir) {
    ReportResult result;
    std::vector<fs::path> manifests;
    std::error_code ec;
    if (fs::is_directory(results_dir, ec)) {
        for (const auto& entry : fs::directory_iterator(results_dir)) {
            if (entry.is_regular_file() &&
                entry.path().filename().string().ends_with(".manifest.json")) {
                manifests.push_back(entry.path());
            }
        }
        std::sort(manifests.begin(), manifests.end());
    } else {
        result.errors.push_back("not a directory: " + results_dir);
    }

    for (const auto& path : manifests) {
        try {
            std::ifstream in(path);
            if (!in) throw std::runtime_error("cannot open file");
            const auto j = nlohmann::json::parse(in);
            const std::string experiment = j.at("experiment").get<std::string>();
            const std::string family = j.at("family").get<std::string>();
            for (const auto& e : j.at("entries")) {
                ManifestEntry m;
                m.noise_level = e.at("noise_level").get<double>();
                m.coordinate = e.at("coordinate").get<int>();
                m.theta = e.at("theta").get<std::string>();
                m.mean_cost = e.at("mean_cost").get<double>();
                m.benchmark_mean = e.at("benchmark_mean").get<double>();
                m.improvement = e.at("improvement").get<double>();
                result.rows.push_back({experiment, family, m});
            }
        } catch (const std::exception& ex) {
            result.errors.push_back(path.string() + ": " + ex.what());
        }
    }

    std::sort(result.rows.begin(), result.rows.end(),
              [](const ReportRow& a, const ReportRow& b) {
                  return std::tie(a.experiment, a.family, a.entry.noise_level,
                                  a.entry.coordinate, a.entry.theta) <
                         std::tie(b.experiment, b.family, b.entry.noise_level,
                                  b.entry.coordinate, b.entry.theta);
              });

    fs::create_directories(out_dir);
    {
        std::ofstream csv(fs::path(out_dir) / "report.csv");
        if (!csv) throw std::runtime_error("cannot write report.csv in " + out_dir);
        csv << "experiment,family,noise_level,coordinate,theta,mean_cost,"
               "benchmark_mean,improvement\n";
        csv << std::setprecision(12);
        for (const auto& r : result.rows) {
            csv << r.experiment << ',' << r.family << ',' << r.entry.noise_level
                << ',' << r.entry.coordinate << ',' << r.entry.theta << ','
                << r.entry.mean_cost << ',' << r.entry.benchmark_mean << ','
                << r.entry.improvement << '\n';
        }
    }
    {
        std::ofstream txt(fs::path(out_dir) / "summary.txt");
        if (!txt) throw std::runtime_error("cannot write summary.txt in " + out_dir);
        txt << "rows: " << result.rows.size() << "\n";
        txt << "errors: " << result.errors.size() << "\n";
        txt << std::setprecision(12);
        for (const auto& r : result.rows) {
            txt << r.experiment << " family=" << r.family
                << " rho=" << r.entry.noise_level
                << " coordinate=" << r.entry.coordinate
                << " theta=" << r.entry.theta << " mean=" << r.entry.mean_cost
                << " benchmark=" << r.entry.benchmark_mean
                << " improvement=" << r.entry.improvement << "\n";
        }
        for (const auto& e : result.errors) txt << "error: " << e << "\n";
    }
    return result;
}

}  // namespace cfa
