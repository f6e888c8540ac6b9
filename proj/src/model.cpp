#include "cfa/model.hpp"

#include <cmath>
#include <stdexcept>

namespace cfa {

std::string to_string(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::demand: return "demand";
        case ConstraintKind::storage_availability: return "storage_availability";
        case ConstraintKind::wind: return "wind";
        case ConstraintKind::headroom: return "headroom";
        case ConstraintKind::charge_rate: return "charge_rate";
        case ConstraintKind::discharge_rate: return "discharge_rate";
        case ConstraintKind::nonnegativity: return "nonnegativity";
    }
    return "unknown";
}

void validate(const ModelParams& params) {
    if (params.horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    if (params.lookahead < 1) throw std::invalid_argument("lookahead must be >= 1");
    if (!(params.capacity >= 0.0)) throw std::invalid_argument("capacity must be >= 0");
    auto eff = [](double e) { return e > 0.0 && e <= 1.0; };
    if (!eff(params.charge_eff) || !eff(params.discharge_eff)) {
        throw std::invalid_argument("efficiencies must lie in (0, 1]");
    }
    if (!(params.charge_limit >= 0.0) || !(params.discharge_limit >= 0.0)) {
        throw std::invalid_argument("rate limits must be >= 0");
    }
    if (!(params.shortfall_penalty >= 0.0)) {
        throw std::invalid_argument("shortfall_penalty must be >= 0");
    }
}

void validate(const State& state, const ModelParams& params) {
    if (state.t < 0 || state.t > params.horizon) {
        throw std::invalid_argument("state period outside 0..horizon");
    }
    if (!(state.storage >= 0.0) || !(state.storage <= params.capacity)) {
        throw std::invalid_argument("storage outside [0, capacity]");
    }
    const std::size_t len = static_cast<std::size_t>(params.horizon + 1);
    if (state.market_price.size() != len || state.grid_price.size() != len ||
        state.demand.size() != len) {
        throw std::invalid_argument("price/demand curves must have horizon+1 entries");
    }
    for (double d : state.demand) {
        if (!(d >= 0.0)) throw std::invalid_argument("demand must be >= 0");
    }
    if (state.forecast.base_time != state.t) {
        throw std::invalid_argument("forecast window must start at the current period");
    }
    const int hi = std::min(state.t + params.lookahead, params.horizon);
    if (state.forecast.last_time() != hi) {
        throw std::invalid_argument("forecast window must end at min(t+H, T)");
    }
    for (double v : state.forecast.values) {
        if (!(v >= 0.0)) throw std::invalid_argument("forecast values must be >= 0");
    }
}

std::vector<Violation> check_feasible(const State& state, const Decision& x,
                                      const ModelParams& params, double tol) {
    std::vector<Violation> out;
    const double flows[6] = {x.wind_to_demand, x.storage_to_demand,
                             x.grid_to_demand, x.wind_to_storage,
                             x.grid_to_storage, x.storage_to_grid};
    for (int i = 0; i < 6; ++i) {
        if (flows[i] < -tol) {
            out.push_back({ConstraintKind::nonnegativity, -flows[i], i});
        }
    }
    const std::size_t t = static_cast<std::size_t>(state.t);
    auto check = [&](ConstraintKind kind, double lhs, double rhs) {
        if (lhs > rhs + tol) out.push_back({kind, lhs - rhs, -1});
    };
    check(ConstraintKind::demand,
          x.wind_to_demand + params.discharge_eff * x.storage_to_demand +
              x.grid_to_demand,
          state.demand[t]);
    check(ConstraintKind::storage_availability,
          x.storage_to_demand + x.storage_to_grid, state.storage);
    check(ConstraintKind::wind, x.wind_to_storage + x.wind_to_demand,
          state.forecast.at(state.t));
    check(ConstraintKind::headroom,
          params.charge_eff * (x.wind_to_storage + x.grid_to_storage) -
              x.storage_to_demand - x.storage_to_grid,
          params.capacity - state.storage);
    check(ConstraintKind::charge_rate, x.wind_to_storage + x.grid_to_storage,
          params.charge_limit);
    check(ConstraintKind::discharge_rate,
          x.storage_to_demand + x.storage_to_grid, params.discharge_limit);
    return out;
}

double transition_storage(const State& state, const Decision& x,
                          const ModelParams& params) {
    return state.storage - x.storage_to_demand +
           params.charge_eff * (x.wind_to_storage + x.grid_to_storage) -
           x.storage_to_grid;
}

double stage_cost(const State& state, const Decision& x,
                  const ModelParams& params) {
    const std::size_t t = static_cast<std::size_t>(state.t);
    const double served = x.wind_to_demand +
                          params.discharge_eff * x.storage_to_demand +
                          x.grid_to_demand;
    const double net_sold = params.discharge_eff * x.storage_to_grid -
                            x.grid_to_storage - x.grid_to_demand;
    return params.shortfall_penalty * state.demand[t] -
           (params.shortfall_penalty + state.market_price[t]) * served -
           state.grid_price[t] * net_sold;
}

}  // namespace cfa
