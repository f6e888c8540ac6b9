#include "cfa/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cfa/rng.hpp"

namespace cfa {

double ForecastCurve::at(int abs_t) const {
    const int idx = abs_t - base_time;
    if (idx < 0 || idx >= static_cast<int>(values.size())) {
        throw std::out_of_range("forecast window does not cover period " +
                                std::to_string(abs_t));
    }
    return values[static_cast<std::size_t>(idx)];
}

void validate(const ForecastConfig& config) {
    if (config.noise_level < 0.0 || !std::isfinite(config.noise_level)) {
        throw std::invalid_argument("forecast noise_level must be finite and >= 0");
    }
    if (config.lookahead < 1) {
        throw std::invalid_argument("forecast lookahead must be >= 1");
    }
    if (config.horizon < 0) {
        throw std::invalid_argument("forecast horizon must be >= 0");
    }
    if (config.initial_curve.size() != static_cast<std::size_t>(config.horizon + 1)) {
        throw std::invalid_argument("initial_curve must have horizon+1 entries");
    }
    for (double v : config.initial_curve) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("initial_curve entries must be finite and >= 0");
        }
    }
}

ForecastCurve initial_curve_window(const ForecastConfig& config) {
    validate(config);
    const int hi = std::min(config.lookahead, config.horizon);
    ForecastCurve curve;
    curve.base_time = 0;
    curve.values.assign(config.initial_curve.begin(),
                        config.initial_curve.begin() + hi + 1);
    return curve;
}

ForecastCurve evolve(const ForecastCurve& curve, const ForecastConfig& config,
                     const ExogenousInfo& noise) {
    const int t = curve.base_time;
    if (t >= config.horizon) {
        throw std::invalid_argument("evolve called at the final period");
    }
    const int new_lo = t + 1;
    const int new_hi = std::min(t + 1 + config.lookahead, config.horizon);
    const std::size_t n = static_cast<std::size_t>(new_hi - new_lo + 1);
    if (noise.forecast_update.size() != n) {
        throw std::invalid_argument("noise vector length mismatch: expected " +
                                    std::to_string(n) + ", got " +
                                    std::to_string(noise.forecast_update.size()));
    }
    ForecastCurve next;
    next.base_time = new_lo;
    next.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int abs_t = new_lo + static_cast<int>(i);
        // A period revealed for the first time enters at its initial value.
        const double prev = abs_t <= curve.last_time()
                                ? curve.at(abs_t)
                                : config.initial_curve[static_cast<std::size_t>(abs_t)];
        next.values[i] = std::max(
            0.0, mmfe_step(prev, config.noise_level, noise.forecast_update[i]));
    }
    return next;
}

std::vector<ExogenousInfo> sample_noise_path(const ForecastConfig& config,
                                             std::uint64_t seed) {
    validate(config);
    std::mt19937_64 gen(seed);
    std::vector<ExogenousInfo> path;
    path.reserve(static_cast<std::size_t>(config.horizon));
    for (int t = 0; t < config.horizon; ++t) {
        const int n = std::min(t + 1 + config.lookahead, config.horizon) - t;
        ExogenousInfo info;
        info.forecast_update.resize(static_cast<std::size_t>(n));
        for (double& z : info.forecast_update) z = standard_normal(gen);
        path.push_back(std::move(info));
    }
    return path;
}

std::vector<double> load_initial_curve(const std::string& path, int horizon) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open curve file: " + path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        double v;
        if (ls >> v) values.push_back(v);
        std::string rest;
        if (ls >> rest) {
            throw std::runtime_error("curve file must hold one value per line: " + path);
        }
    }
    if (values.size() != static_cast<std::size_t>(horizon + 1)) {
        throw std::runtime_error("curve file " + path + " has " +
                                 std::to_string(values.size()) + " values, expected " +
                                 std::to_string(horizon + 1));
    }
    return values;
}

}  // namespace cfa
