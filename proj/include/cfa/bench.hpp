#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cfa/policies.hpp"
#include "cfa/sang.hpp"
#include "cfa/simulator.hpp"

namespace cfa {

// Seed offset separating held-out evaluation paths from selection/tuning
// paths drawn near the master seed.
inline constexpr std::uint64_t kHeldOutOffset = 1000000007ull;

// {0.5, 0.6, ..., 1.5}
std::vector<double> default_grid();

// Identity parameters per family: the values whose wind bounds reproduce
// the raw forecast (const {1}, lkup all ones, exp {1, 0}).
std::vector<double> identity_theta(PolicyFamily family, int lookahead);

struct SweepConfig {
    Scenario scenario;  // noise_level is overridden per entry of noise_levels
    std::vector<double> noise_levels{0.0};
    std::vector<double> grid;  // empty: default_grid()
    int select_paths = 48;     // CRN pool scanned for the argmin
    int eval_paths = 1000;     // held-out pool behind reported means
    std::uint64_t seed = 0;
    int workers = 1;
};

struct SweepPoint {
    double noise_level;
    int coordinate;  // -1 for the constant family
    double theta;
    double mean_cost;  // selection-pool mean
    double std_error;
};

struct SweepBest {
    double noise_level;
    int coordinate;         // -1 for the constant family
    double theta;           // selection-pool argmin (first strict minimum)
    double mean_cost;       // held-out mean of the argmin policy
    double benchmark_mean;  // held-out benchmark mean, same seeds
    double improvement;     // (mean_cost - benchmark_mean)/|benchmark_mean|
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::vector<SweepBest> best;  // const: one per noise level; lkup: per (level, coordinate)
};

// Evaluates the constant family over the grid at each noise level with
// common random numbers, then re-scores each argmin on held-out paths.
SweepResult grid_search_const(const SweepConfig& config);

// One-dimensional sweep of each lookup coordinate with the others held at
// 1, per noise level; held-out re-score per coordinate argmin.
SweepResult coordinate_search_lkup(const SweepConfig& config);

void write_sweep_csv(const SweepResult& result, std::ostream& out);
void write_best_csv(const SweepResult& result, std::ostream& out);

struct TuneConfig {
    Scenario scenario;  // noise_level taken as-is
    PolicyFamily family = PolicyFamily::lookup;
    SangConfig sang;        // dim/theta0/seed are filled in by tune()
    int eval_paths = 1000;  // held-out evaluation of the reported iterate
    int monitor_paths = 0;  // 0 disables the snapshot curve
    int monitor_stride = 5;
    std::uint64_t seed = 0;
    int workers = 1;
};

struct TuneSnapshot {
    int k;              // iteration (0 is the initial point)
    long tuning_evals;  // oracle rollouts spent by SANG up to k
    double mean_cost;   // monitor-pool mean at theta^k
    double improvement;
};

struct TuneResult {
    SangResult sang;
    PolicySpec tuned_policy;
    double heldout_mean = 0.0;
    double heldout_benchmark = 0.0;
    double heldout_improvement = 0.0;
    std::vector<TuneSnapshot> curve;
    long monitor_evals = 0;  // rollouts spent on the curve, outside the SANG budget
};

// Runs SANG on single-rollout objective evaluations (seed = noise path),
// re-scores the reported iterate against the benchmark on held-out paths,
// and optionally traces an improvement curve on a monitor pool.
TuneResult tune(const TuneConfig& config);

void write_tune_csv(const TuneResult& result, std::ostream& out);

// One consolidated result line, as stored in experiment manifests.
struct ManifestEntry {
    double noise_level = 0.0;
    int coordinate = -1;
    std::string theta;  // semicolon-joined values
    double mean_cost = 0.0;
    double benchmark_mean = 0.0;
    double improvement = 0.0;
};

std::vector<ManifestEntry> manifest_entries(const SweepResult& result);
std::vector<ManifestEntry> manifest_entries(const TuneResult& result,
                                            double noise_level);

// JSON manifest naming the experiment and its headline rows; report()
// consumes every *.manifest.json under a directory.
void write_manifest(const std::string& path, const std::string& experiment,
                    const std::string& family,
                    const std::vector<ManifestEntry>& entries);

struct ReportRow {
    std::string experiment;
    std::string family;
    ManifestEntry entry;
};

struct ReportResult {
    std::vector<ReportRow> rows;
    std::vector<std::string> errors;  // one message per unreadable manifest
};

// Collects manifests under results_dir into out_dir/report.csv and
// out_dir/summary.txt. Rows are ordered by (experiment, noise, coordinate).
ReportResult report(const std::string& results_dir, const std::string& out_dir);

}  // namespace cfa
