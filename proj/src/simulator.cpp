#include "cfa/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "cfa/rng.hpp"

namespace cfa {

void validate(const Scenario& scenario) {
    validate(scenario.params);
    if (scenario.noise_level < 0.0 || !std::isfinite(scenario.noise_level)) {
        throw std::invalid_argument("noise_level must be finite and >= 0");
    }
    if (!(scenario.initial_storage >= 0.0) ||
        !(scenario.initial_storage <= scenario.params.capacity)) {
        throw std::invalid_argument("initial_storage outside [0, capacity]");
    }
    const std::size_t len = static_cast<std::size_t>(scenario.params.horizon + 1);
    if (scenario.initial_forecast.size() != len || scenario.market_price.size() != len ||
        scenario.grid_price.size() != len || scenario.demand.size() != len) {
        throw std::invalid_argument("scenario curves must have horizon+1 entries");
    }
    for (double v : scenario.initial_forecast) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("initial_forecast must be finite and >= 0");
        }
    }
    for (double v : scenario.demand) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("demand must be finite and >= 0");
        }
    }
    for (double v : scenario.market_price) {
        if (!std::isfinite(v)) throw std::invalid_argument("market_price must be finite");
    }
    for (double v : scenario.grid_price) {
        if (!std::isfinite(v)) throw std::invalid_argument("grid_price must be finite");
    }
}

ForecastConfig forecast_config(const Scenario& scenario) {
    ForecastConfig fc;
    fc.noise_level = scenario.noise_level;
    fc.lookahead = scenario.params.lookahead;
    fc.horizon = scenario.params.horizon;
    fc.initial_curve = scenario.initial_forecast;
    return fc;
}

Scenario default_scenario(double noise_level) {
    constexpr double kPi = 3.14159265358979323846;
    Scenario s;
    s.params.horizon = 72;
    s.params.lookahead = 23;
    s.params.capacity = 60.0;
    s.params.charge_eff = 0.9;
    s.params.discharge_eff = 0.9;
    s.params.charge_limit = 6.218;
    s.params.discharge_limit = 6.0;
    s.params.shortfall_penalty = 600.0;
    s.noise_level = noise_level;
    s.initial_storage = 29.7566;
    const int n = s.params.horizon + 1;
    s.initial_forecast.resize(static_cast<std::size_t>(n));
    s.market_price.resize(static_cast<std::size_t>(n));
    s.grid_price.resize(static_cast<std::size_t>(n));
    s.demand.resize(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        const double x = 2.0 * kPi * t / 24.0;  // daily phase
        const double td = static_cast<double>(t);
        // Day cycles with incommensurate detail harmonics so no two hours of
        // the three days repeat exactly; wind is phased against demand and
        // the grid price drifts up slightly across the horizon.
        s.demand[static_cast<std::size_t>(t)] =
            std::max(0.0, 24.0043 + 3.0 * std::sin(x - 3.1416) +
                              0.354631 * std::sin(1.91981 * td + 1.1));
        s.grid_price[static_cast<std::size_t>(t)] =
            180.0 + 25.359 * std::sin(x + 4.52455) +
            3.28469 * std::sin(2.3 * td + 0.432789) + 0.4 * td / 24.0;
        s.market_price[static_cast<std::size_t>(t)] =
            5.0 + 3.48343 * std::sin(x + 0.5) +
            2.28674 * std::sin(1.37202 * td + 0.700102);
        s.initial_forecast[static_cast<std::size_t>(t)] =
            std::max(0.0, 23.0131 + 4.0 * std::sin(x - 1.51869) +
                              2.0 * std::sin(2.53313 * td) +
                              0.646853 * std::sin(1.34579 * td + 0.290626));
    }
    // Every evening, hours 17-22 of the day: demand eases, grid imports are
    // priced above the value of serving load, and wind runs a hair above
    // demand, so the plan has to bank the surplus and sell it on the spot
    // market rather than lean on the grid.
    for (int day = 0; day < 3; ++day) {
        const int lo = 24 * day + 17;
        const int hi = std::min(n, lo + 6);
        for (int t = lo; t < hi; ++t) {
            const std::size_t u = static_cast<std::size_t>(t);
            s.demand[u] = std::max(0.0, s.demand[u] - 8.0);
            s.grid_price[u] += 460.0;
            s.initial_forecast[u] = s.demand[u] + 3.93274;
        }
    }
    return s;
}

Scenario scenario_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const int horizon = j.value("horizon", 72);
    Scenario s = default_scenario(j.value("noise_level", 0.0));
    if (horizon != s.params.horizon) {
        // regenerate the default curves at the requested length
        Scenario base = default_scenario(s.noise_level);
        s = base;
        s.params.horizon = horizon;
        const auto resize_curve = [&](std::vector<double> Scenario::*field) {
            std::vector<double>& curve = s.*field;
            std::vector<double> full = base.*field;
            curve.resize(static_cast<std::size_t>(horizon + 1));
            for (int t = 0; t <= horizon; ++t) {
                curve[static_cast<std::size_t>(t)] =
                    t <= base.params.horizon
                        ? full[static_cast<std::size_t>(t)]
                        : full[static_cast<std::size_t>(base.params.horizon)];
            }
        };
        resize_curve(&Scenario::initial_forecast);
        resize_curve(&Scenario::market_price);
        resize_curve(&Scenario::grid_price);
        resize_curve(&Scenario::demand);
    }
    if (j.contains("lookahead")) s.params.lookahead = j.at("lookahead").get<int>();
    if (j.contains("capacity")) s.params.capacity = j.at("capacity").get<double>();
    if (j.contains("charge_eff")) s.params.charge_eff = j.at("charge_eff").get<double>();
    if (j.contains("discharge_eff")) s.params.discharge_eff = j.at("discharge_eff").get<double>();
    if (j.contains("charge_limit")) s.params.charge_limit = j.at("charge_limit").get<double>();
    if (j.contains("discharge_limit")) s.params.discharge_limit = j.at("discharge_limit").get<double>();
    if (j.contains("shortfall_penalty")) s.params.shortfall_penalty = j.at("shortfall_penalty").get<double>();
    if (j.contains("initial_storage")) s.initial_storage = j.at("initial_storage").get<double>();
    if (j.contains("initial_forecast_file")) {
        s.initial_forecast = load_initial_curve(
            j.at("initial_forecast_file").get<std::string>(), s.params.horizon);
    } else if (j.contains("initial_forecast")) {
        s.initial_forecast = j.at("initial_forecast").get<std::vector<double>>();
    }
    if (j.contains("market_price")) s.market_price = j.at("market_price").get<std::vector<double>>();
    if (j.contains("grid_price")) s.grid_price = j.at("grid_price").get<std::vector<double>>();
    if (j.contains("demand")) s.demand = j.at("demand").get<std::vector<double>>();
    validate(s);
    return s;
}

std::string to_json(const Scenario& scenario) {
    nlohmann::json j;
    j["horizon"] = scenario.params.horizon;
    j["lookahead"] = scenario.params.lookahead;
    j["capacity"] = scenario.params.capacity;
    j["charge_eff"] = scenario.params.charge_eff;
    j["discharge_eff"] = scenario.params.discharge_eff;
    j["charge_limit"] = scenario.params.charge_limit;
    j["discharge_limit"] = scenario.params.discharge_limit;
    j["shortfall_penalty"] = scenario.params.shortfall_penalty;
    j["noise_level"] = scenario.noise_level;
    j["initial_storage"] = scenario.initial_storage;
    j["initial_forecast"] = scenario.initial_forecast;
    j["market_price"] = scenario.market_price;
    j["grid_price"] = scenario.grid_price;
    j["demand"] = scenario.demand;
    return j.dump(2);
}

Trajectory rollout(const PolicySpec& policy, const Scenario& scenario,
                   std::uint64_t seed) {
    validate(scenario);
    validate(policy, scenario.params.lookahead);
    const ForecastConfig fc = forecast_config(scenario);
    const auto noise = sample_noise_path(fc, seed);

    Trajectory traj;
    traj.noise_digest = kFnvOffset;
    for (const auto& info : noise) {
        for (double z : info.forecast_update) digest_append(traj.noise_digest, z);
    }

    State st;
    st.t = 0;
    st.storage = scenario.initial_storage;
    st.forecast = initial_curve_window(fc);
    st.market_price = scenario.market_price;
    st.grid_price = scenario.grid_price;
    st.demand = scenario.demand;

    const int T = scenario.params.horizon;
    traj.records.reserve(static_cast<std::size_t>(T + 1));
    for (int t = 0; t <= T; ++t) {
        const DecideResult dec = decide(policy, st, scenario.params);
        const double cost = stage_cost(st, dec.x, scenario.params);
        traj.records.push_back({t, st.storage, dec.x, cost});
        traj.total_cost += cost;
        if (t == T) break;
        const double next = transition_storage(st, dec.x, scenario.params);
        if (next < -1e-8 || next > scenario.params.capacity + 1e-8) {
            throw std::runtime_error("storage transition left [0, capacity] (defect)");
        }
        st.storage = std::clamp(next, 0.0, scenario.params.capacity);
        st.forecast = evolve(st.forecast, fc, noise[static_cast<std::size_t>(t)]);
        st.t = t + 1;
    }
    return traj;
}

void write_csv(const Trajectory& trajectory, std::ostream& out) {
    out << "t,storage,wind_to_demand,storage_to_demand,grid_to_demand,"
           "wind_to_storage,grid_to_storage,storage_to_grid,stage_cost\n";
    out << std::setprecision(12);
    for (const auto& rec : trajectory.records) {
        out << rec.t << ',' << rec.storage << ',' << rec.x.wind_to_demand << ','
            << rec.x.storage_to_demand << ',' << rec.x.grid_to_demand << ','
            << rec.x.wind_to_storage << ',' << rec.x.grid_to_storage << ','
            << rec.x.storage_to_grid << ',' << rec.cost << '\n';
    }
}

Estimate estimate_objective(const PolicySpec& policy, const Scenario& scenario,
                            int n_paths, std::uint64_t seed_base, int n_workers) {
    if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    if (n_workers < 1) n_workers = 1;
    validate(scenario);
    validate(policy, scenario.params.lookahead);

    if (scenario.noise_level == 0.0) {
        // all paths coincide: the forecast update is exactly zero noise
        const Trajectory tr = rollout(policy, scenario, seed_base);
        return {tr.total_cost, 0.0, n_paths};
    }

    std::vector<double> values(static_cast<std::size_t>(n_paths));
    const auto work = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            values[static_cast<std::size_t>(i)] =
                rollout(policy, scenario, seed_base + static_cast<std::uint64_t>(i))
                    .total_cost;
        }
    };
    if (n_workers == 1 || n_paths == 1) {
        work(0, n_paths);
    } else {
        const int k = std::min(n_workers, n_paths);
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(k));
        const int chunk = (n_paths + k - 1) / k;
        for (int w = 0; w < k; ++w) {
            const int b = w * chunk;
            const int e = std::min(n_paths, b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }
    // reduction in index order: the result is identical for any n_workers
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n_paths;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double se =
        n_paths > 1 ? std::sqrt(ss / (n_paths - 1)) / std::sqrt(static_cast<double>(n_paths))
                    : 0.0;
    return {mean, se, n_paths};
}

double improvement(double policy_mean, double benchmark_mean) {
    if (benchmark_mean == 0.0) {
        throw std::invalid_argument("benchmark mean must be nonzero");
    }
    return (policy_mean - benchmark_mean) / std::fabs(benchmark_mean);
}

}  // namespace cfa
