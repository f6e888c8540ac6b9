#pragma once

#include <vector>

#include "cfa/lp.hpp"
#include "cfa/model.hpp"

namespace cfa {

// Deterministic lookahead program rooted at state.t with one block per
// period of the forecast window. With L = min(t+H, T) - t lookahead
// periods there are B = L+1 blocks.
//
// Variable layout (6B + B + ... = 7B columns):
//   [0, 6)          flows executed now (order: wind_to_demand,
//                   storage_to_demand, grid_to_demand, wind_to_storage,
//                   grid_to_storage, storage_to_grid)
//   [6b, 6b+6)      planned flows for period t+b, b = 1..L
//   [6B + j]        planned storage level at period t+1+j, j = 0..L
//
// Row layout (7B + 1 rows):
//   per block b: demand, storage availability, wind, headroom, charge
//   rate, discharge rate (the block-0 wind row uses the true current
//   energy; block b >= 1 wind rows use wind_bound[b-1])
//   then B storage-balance equalities, then the terminal capacity bound.
//
// Storage levels stay in [0, capacity] at every feasible point: lower
// bounds come from the availability rows, upper bounds from headroom plus
// the terminal row, so no explicit upper_bound attributes are attached.
struct LookaheadLp {
    LinearProgram lp;
    double cost_offset = 0.0;  // constant part of the planning objective
    int blocks = 0;
};

// wind_bound holds the parameterized wind limits for periods t+1..t+L,
// nonnegative and finite. The zero-flow point with constant storage is
// feasible for every well-formed input.
LookaheadLp build_lookahead(const State& state, const ModelParams& params,
                            const std::vector<double>& wind_bound);

}  // namespace cfa
