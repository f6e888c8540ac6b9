#include "cfa/policies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cfa/lookahead.hpp"

namespace cfa {

namespace {
// Any bound this large is beyond every other constraint in the block, so
// capping here only keeps extreme exponential parameters finite.
constexpr double kBoundCap = 1e9;
}

const char* family_name(PolicyFamily family) {
    switch (family) {
        case PolicyFamily::benchmark: return "benchmark";
        case PolicyFamily::constant: return "const";
        case PolicyFamily::lookup: return "lkup";
        case PolicyFamily::exponential: return "exp";
    }
    return "unknown";
}

PolicyFamily parse_family(const std::string& name) {
    if (name == "benchmark") return PolicyFamily::benchmark;
    if (name == "const") return PolicyFamily::constant;
    if (name == "lkup") return PolicyFamily::lookup;
    if (name == "exp") return PolicyFamily::exponential;
    throw std::invalid_argument("unknown policy family: " + name);
}

int theta_dim(PolicyFamily family, int lookahead) {
    switch (family) {
        case PolicyFamily::benchmark: return 0;
        case PolicyFamily::constant: return 1;
        case PolicyFamily::lookup: return lookahead;
        case PolicyFamily::exponential: return 2;
    }
    return 0;
}

void validate(const PolicySpec& spec, int lookahead) {
    const int want = theta_dim(spec.family, lookahead);
    if (static_cast<int>(spec.theta.size()) != want) {
        throw std::invalid_argument(std::string("policy family ") +
                                    family_name(spec.family) + " needs " +
                                    std::to_string(want) + " parameters, got " +
                                    std::to_string(spec.theta.size()));
    }
    for (double v : spec.theta) {
        if (!std::isfinite(v)) throw std::invalid_argument("theta must be finite");
    }
}

std::string to_json(const PolicySpec& spec) {
    nlohmann::json j;
    j["family"] = family_name(spec.family);
    j["theta"] = spec.theta;
    return j.dump(2);
}

PolicySpec policy_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    PolicySpec spec;
    spec.family = parse_family(j.at("family").get<std::string>());
    if (j.contains("theta")) spec.theta = j.at("theta").get<std::vector<double>>();
    return spec;
}

std::vector<double> wind_bounds(const PolicySpec& spec,
                                const ForecastCurve& curve,
                                const ModelParams& params) {
    validate(spec, params.lookahead);
    const int t = curve.base_time;
    const int hi = std::min(t + params.lookahead, params.horizon);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(hi - t));
    for (int tp = t + 1; tp <= hi; ++tp) {
        const double f = curve.at(tp);
        const int tau = tp - t;
        double b = f;
        switch (spec.family) {
            case PolicyFamily::benchmark:
                break;
            case PolicyFamily::constant:
                b = spec.theta[0] * f;
                break;
            case PolicyFamily::lookup:
                b = spec.theta[static_cast<std::size_t>(tau - 1)] * f;
                break;
            case PolicyFamily::exponential:
                b = spec.theta[0] * std::exp(spec.theta[1] * tau) * f;
                break;
        }
        out.push_back(std::clamp(b, 0.0, kBoundCap));
    }
    return out;
}

DecideResult decide(const PolicySpec& spec, const State& state,
                    const ModelParams& params) {
    const auto bounds = wind_bounds(spec, state.forecast, params);
    const LookaheadLp la = build_lookahead(state, params, bounds);
    const LpSolution sol = solve(la.lp);
    if (sol.status != LpStatus::optimal) {
        throw std::runtime_error("lookahead program not optimal (defect): status " +
                                 std::to_string(static_cast<int>(sol.status)));
    }
    DecideResult res;
    const auto comp = [&sol](int j) { return std::max(0.0, sol.x[static_cast<std::size_t>(j)]); };
    res.x.wind_to_demand = comp(0);
    res.x.storage_to_demand = comp(1);
    res.x.grid_to_demand = comp(2);
    res.x.wind_to_storage = comp(3);
    res.x.grid_to_storage = comp(4);
    res.x.storage_to_grid = comp(5);
    res.plan_value = sol.objective_value + la.cost_offset;

    const auto bad = check_feasible(state, res.x, params);
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "lookahead decision violates the state constraints (defect):";
        for (const auto& v : bad) {
            msg << ' ' << to_string(v.kind) << " by " << v.amount;
        }
        throw std::runtime_error(msg.str());
    }
    return res;
}

}  // namespace cfa
