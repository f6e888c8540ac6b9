#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cfa/model.hpp"
#include "cfa/policies.hpp"

namespace cfa {

struct Scenario {
    ModelParams params;
    double noise_level = 0.0;          // relative std dev of forecast updates
    double initial_storage = 0.0;
    std::vector<double> initial_forecast;  // length horizon+1
    std::vector<double> market_price;      // length horizon+1
    std::vector<double> grid_price;        // length horizon+1
    std::vector<double> demand;            // length horizon+1
};

void validate(const Scenario& scenario);
ForecastConfig forecast_config(const Scenario& scenario);

// Synthetic day-cycle scenario used by the experiments; see
// default_scenario() in simulator.cpp for the exact curves.
Scenario default_scenario(double noise_level);

// JSON (de)serialization. Omitted curve fields fall back to the default
// scenario's curves; "initial_forecast_file" loads a one-column file.
Scenario scenario_from_json(const std::string& text);
std::string to_json(const Scenario& scenario);

struct PeriodRecord {
    int t;
    double storage;   // level entering the period
    Decision x;
    double cost;
};

struct Trajectory {
    std::vector<PeriodRecord> records;  // one per period 0..T
    double total_cost = 0.0;
    std::uint64_t noise_digest = 0;     // fingerprint of the noise stream
};

// Simulate one path under the policy: decide, verify feasibility, accrue
// stage cost, advance storage and forecast. The seed identifies the noise
// path; equal seeds replay identical paths.
Trajectory rollout(const PolicySpec& policy, const Scenario& scenario,
                   std::uint64_t seed);

// CSV with header: t, storage, the six flows, stage_cost.
void write_csv(const Trajectory& trajectory, std::ostream& out);

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    int paths = 0;
};

// Mean total cost over paths seeded seed_base..seed_base+n_paths-1.
// Fixed seed enumeration gives common random numbers across policies, and
// the fixed-order reduction makes the result independent of n_workers.
// With zero forecast noise all paths coincide, so one rollout suffices.
Estimate estimate_objective(const PolicySpec& policy, const Scenario& scenario,
                            int n_paths, std::uint64_t seed_base,
                            int n_workers = 1);

// Relative improvement (negative is better) of a policy's mean cost over
// the benchmark's on common random numbers.
double improvement(double policy_mean, double benchmark_mean);

}  // namespace cfa
