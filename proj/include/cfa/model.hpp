#pragma once

#include <string>
#include <vector>

#include "cfa/forecast.hpp"

namespace cfa {

struct ModelParams {
    int horizon = 0;                 // T: index of the final period
    int lookahead = 1;               // H: forecast window depth
    double capacity = 0.0;           // storage upper bound
    double charge_eff = 1.0;         // fraction of charged energy retained
    double discharge_eff = 1.0;      // fraction of discharged energy delivered
    double charge_limit = 0.0;       // per-period cap on energy sent to storage
    double discharge_limit = 0.0;    // per-period cap on energy drawn from storage
    double shortfall_penalty = 0.0;  // cost per unit of unserved demand
};

// Six nonnegative energy flows decided each period.
struct Decision {
    double wind_to_demand = 0.0;
    double storage_to_demand = 0.0;
    double grid_to_demand = 0.0;
    double wind_to_storage = 0.0;
    double grid_to_storage = 0.0;
    double storage_to_grid = 0.0;
};

struct State {
    int t = 0;
    double storage = 0.0;
    ForecastCurve forecast;  // window [t, min(t+H, T)]; entry at t is the
                             // wind energy available this period
    // Exogenous curves over absolute periods 0..horizon.
    std::vector<double> market_price;  // received per unit of demand served
    std::vector<double> grid_price;    // paid (received) per unit bought (sold)
    std::vector<double> demand;
};

enum class ConstraintKind {
    demand,
    storage_availability,
    wind,
    headroom,
    charge_rate,
    discharge_rate,
    nonnegativity,
};

struct Violation {
    ConstraintKind kind;
    double amount;  // how far past the bound, always > 0
    int flow = -1;  // decision component for nonnegativity, else -1
};

std::string to_string(ConstraintKind kind);

void validate(const ModelParams& params);
void validate(const State& state, const ModelParams& params);

// Empty result means x is feasible at state within tol (absolute).
std::vector<Violation> check_feasible(const State& state, const Decision& x,
                                      const ModelParams& params,
                                      double tol = 1e-9);

// Storage level after applying x; in [0, capacity] whenever x is feasible.
double transition_storage(const State& state, const Decision& x,
                          const ModelParams& params);

// Penalty for unserved demand minus revenue from demand served and net
// grid sales, at period-t prices. Negative values are profit.
double stage_cost(const State& state, const Decision& x,
                  const ModelParams& params);

}  // namespace cfa
