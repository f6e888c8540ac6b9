#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cfa {

// Rolling forecast of wind energy. At period t the curve covers absolute
// periods [t, min(t+H, T)]; the entry at t is the energy actually available
// this period. Each period the whole window is re-drawn around the previous
// values with multiplicative Gaussian noise and truncated at zero, and one
// newly revealed period enters at its initial (t=0) value.
struct ForecastConfig {
    double noise_level = 0.0;            // relative std dev of one update
    int lookahead = 1;                   // H: max periods ahead in a window
    int horizon = 0;                     // T: index of the final period
    std::vector<double> initial_curve;   // length horizon+1, nonnegative
};

struct ForecastCurve {
    int base_time = 0;                   // t: first period covered
    std::vector<double> values;          // window [t, min(t+H, T)]

    // Value for absolute period abs_t; throws if outside the window.
    double at(int abs_t) const;
    int last_time() const { return base_time + static_cast<int>(values.size()) - 1; }
};

// Standard-normal draws consumed by one forecast update. The vector length
// equals the size of the *next* window, min(t+1+H, T) - t entries.
struct ExogenousInfo {
    std::vector<double> forecast_update;
};

void validate(const ForecastConfig& config);

// Window at t=0.
ForecastCurve initial_curve_window(const ForecastConfig& config);

// One raw update of a single value, before truncation at zero.
inline double mmfe_step(double value, double noise_level, double z) {
    return value + noise_level * value * z;
}

// Advance the window from t to t+1. noise.forecast_update must have exactly
// one entry per period of the new window.
ForecastCurve evolve(const ForecastCurve& curve, const ForecastConfig& config,
                     const ExogenousInfo& noise);

// All noise vectors for one sample path, for updates t=0..T-1. A fixed seed
// pins the whole path, so seed lists implement common random numbers.
std::vector<ExogenousInfo> sample_noise_path(const ForecastConfig& config,
                                             std::uint64_t seed);

// One value per line, exactly horizon+1 lines of numeric data.
std::vector<double> load_initial_curve(const std::string& path, int horizon);

}  // namespace cfa
