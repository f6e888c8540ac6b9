#include "cfa/lookahead.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cfa {

namespace {
// flow column order within a block, matching Decision's fields
enum Flow { kWd = 0, kRd, kGd, kWr, kGr, kRg };
}

LookaheadLp build_lookahead(const State& state, const ModelParams& params,
                            const std::vector<double>& wind_bound) {
    validate(params);
    validate(state, params);
    const int t = state.t;
    const int L = std::min(t + params.lookahead, params.horizon) - t;
    const int B = L + 1;
    if (wind_bound.size() != static_cast<std::size_t>(L)) {
        throw std::invalid_argument("wind_bound must have one entry per lookahead period");
    }
    for (double b : wind_bound) {
        if (!(b >= 0.0) || !std::isfinite(b)) {
            throw std::invalid_argument("wind bounds must be finite and >= 0");
        }
    }

    LookaheadLp out;
    out.blocks = B;
    LinearProgram& lp = out.lp;
    lp.num_vars = static_cast<std::size_t>(7 * B);
    lp.objective.assign(lp.num_vars, 0.0);
    lp.rows.reserve(static_cast<std::size_t>(7 * B + 1));

    const auto flow = [](int b, int f) { return 6 * b + f; };
    const auto stor = [B](int j) { return 6 * B + j; };  // level at t+1+j

    for (int b = 0; b < B; ++b) {
        const std::size_t s = static_cast<std::size_t>(t + b);
        const double serve_value = params.shortfall_penalty + state.market_price[s];
        lp.objective[static_cast<std::size_t>(flow(b, kWd))] = -serve_value;
        lp.objective[static_cast<std::size_t>(flow(b, kRd))] = -params.discharge_eff * serve_value;
        lp.objective[static_cast<std::size_t>(flow(b, kGd))] = -serve_value + state.grid_price[s];
        lp.objective[static_cast<std::size_t>(flow(b, kGr))] = state.grid_price[s];
        lp.objective[static_cast<std::size_t>(flow(b, kRg))] = -params.discharge_eff * state.grid_price[s];
        out.cost_offset += params.shortfall_penalty * state.demand[s];
    }

    const auto add_row = [&lp](Relation rel, double rhs) -> std::vector<double>& {
        lp.rows.push_back({std::vector<double>(lp.num_vars, 0.0), rel, rhs});
        return lp.rows.back().coeffs;
    };

    for (int b = 0; b < B; ++b) {
        const std::size_t s = static_cast<std::size_t>(t + b);
        {
            auto& r = add_row(Relation::less_equal, state.demand[s]);
            r[static_cast<std::size_t>(flow(b, kWd))] = 1.0;
            r[static_cast<std::size_t>(flow(b, kRd))] = params.discharge_eff;
            r[static_cast<std::size_t>(flow(b, kGd))] = 1.0;
        }
        {
            auto& r = add_row(Relation::less_equal, b == 0 ? state.storage : 0.0);
            r[static_cast<std::size_t>(flow(b, kRd))] = 1.0;
            r[static_cast<std::size_t>(flow(b, kRg))] = 1.0;
            if (b > 0) r[static_cast<std::size_t>(stor(b - 1))] = -1.0;
        }
        {
            auto& r = add_row(Relation::less_equal,
                              b == 0 ? state.forecast.at(t)
                                     : wind_bound[static_cast<std::size_t>(b - 1)]);
            r[static_cast<std::size_t>(flow(b, kWd))] = 1.0;
            r[static_cast<std::size_t>(flow(b, kWr))] = 1.0;
        }
        {
            auto& r = add_row(Relation::less_equal,
                              b == 0 ? params.capacity - state.storage : params.capacity);
            r[static_cast<std::size_t>(flow(b, kWr))] = params.charge_eff;
            r[static_cast<std::size_t>(flow(b, kGr))] = params.charge_eff;
            r[static_cast<std::size_t>(flow(b, kRd))] = -1.0;
            r[static_cast<std::size_t>(flow(b, kRg))] = -1.0;
            if (b > 0) r[static_cast<std::size_t>(stor(b - 1))] = 1.0;
        }
        {
            auto& r = add_row(Relation::less_equal, params.charge_limit);
            r[static_cast<std::size_t>(flow(b, kWr))] = 1.0;
            r[static_cast<std::size_t>(flow(b, kGr))] = 1.0;
        }
        {
            auto& r = add_row(Relation::less_equal, params.discharge_limit);
            r[static_cast<std::size_t>(flow(b, kRd))] = 1.0;
            r[static_cast<std::size_t>(flow(b, kRg))] = 1.0;
        }
    }

    // storage balance: R_{s+1} = R_s - rd + charge_eff (wr + gr) - rg
    for (int b = 0; b < B; ++b) {
        auto& r = add_row(Relation::equal, b == 0 ? -state.storage : 0.0);
        r[static_cast<std::size_t>(flow(b, kRd))] = -1.0;
        r[static_cast<std::size_t>(flow(b, kWr))] = params.charge_eff;
        r[static_cast<std::size_t>(flow(b, kGr))] = params.charge_eff;
        r[static_cast<std::size_t>(flow(b, kRg))] = -1.0;
        if (b > 0) r[static_cast<std::size_t>(stor(b - 1))] = 1.0;
        r[static_cast<std::size_t>(stor(b))] = -1.0;
    }
    {
        auto& r = add_row(Relation::less_equal, params.capacity);
        r[static_cast<std::size_t>(stor(L))] = 1.0;
    }
    return out;
}

}  // namespace cfa
