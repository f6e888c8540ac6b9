#pragma once

#include <string>
#include <vector>

#include "cfa/model.hpp"

namespace cfa {

// How the lookahead's future wind bounds are scaled by theta:
//   benchmark    raw forecast, no parameters
//   constant     theta[0] * f                       ("const")
//   lookup       theta[tau-1] * f, tau = t'-t       ("lkup", dim H)
//   exponential  theta[0] * exp(theta[1]*tau) * f   ("exp")
// Every entry is clamped at zero (and at a large finite cap so that an
// extreme exponential cannot produce a non-finite row bound).
enum class PolicyFamily { benchmark, constant, lookup, exponential };

struct PolicySpec {
    PolicyFamily family = PolicyFamily::benchmark;
    std::vector<double> theta;
};

const char* family_name(PolicyFamily family);
PolicyFamily parse_family(const std::string& name);
int theta_dim(PolicyFamily family, int lookahead);
void validate(const PolicySpec& spec, int lookahead);

// JSON round-trip: {"family": ..., "theta": [...]}.
std::string to_json(const PolicySpec& spec);
PolicySpec policy_from_json(const std::string& text);

// Parameterized wind bounds for periods t+1..min(t+H, T).
std::vector<double> wind_bounds(const PolicySpec& spec,
                                const ForecastCurve& curve,
                                const ModelParams& params);

struct DecideResult {
    Decision x;
    double plan_value = 0.0;  // optimal lookahead objective incl. constants
};

// Solve the lookahead at state and keep only the first-period decision,
// which is feasible for the true state by construction (checked).
DecideResult decide(const PolicySpec& spec, const State& state,
                    const ModelParams& params);

}  // namespace cfa
