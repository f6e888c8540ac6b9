#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <vector>

namespace cfa {

// Stochastic objective evaluated on the noise path named by seed. Equal
// seeds reuse the path, which is how pairs share common random numbers.
using PairedObjective =
    std::function<double(const std::vector<double>& theta, std::uint64_t seed)>;

// Noise-free objective, for Monte Carlo reference computations.
using PlainObjective = std::function<double(const std::vector<double>& theta)>;

enum class StepsizeRule { corollary, rmsprop };

struct SangConfig {
    int dim = 1;               // d
    int iterations = 100;      // N
    int batch = 1;             // gradient pairs averaged per iteration
    double delta = 1.0;        // schedule scale
    double lip_l0 = 1.0;       // Lipschitz estimate used by the schedule
    double alpha_scale = 1.0;  // multiplier a on the averaging weight
    StepsizeRule rule = StepsizeRule::corollary;
    double rms_b = 1.0;        // step numerator for the rmsprop rule
    double rms_gamma = 0.1;    // accumulator mixing weight
    std::vector<double> theta0;
    std::uint64_t seed = 0;
};

struct Schedule {
    double alpha;  // averaging weight, in (0, 1]
    double eta;    // smoothing radius
    double beta;   // step size
};

// Constant schedule: alpha = a/sqrt(delta (d+4) N) clamped into (0, 1],
// eta = delta/(L0 sqrt(d)), beta = delta/(L0^2 d).
Schedule schedule(const SangConfig& config, int k);

// One step-size update for the rmsprop rule: folds the latest squared
// gradient norm into the accumulator and returns (beta, new accumulator)
// with beta = b/sqrt(accumulator), floored away from division by zero.
std::pair<double, double> rmsprop_step(double accumulator, double grad_norm_sq,
                                       double b, double gamma);

// Averaged two-point smoothed-gradient estimator: m pairs, each drawing a
// standard normal direction v and one shared noise seed, contributing
// (F(theta + eta v, w) - F(theta, w)) / eta * v. If mean_value is given it
// receives the mean of the m base evaluations F(theta, w).
std::vector<double> gradient_estimate(const PairedObjective& objective,
                                      const std::vector<double>& theta,
                                      double eta, int m, std::mt19937_64& rng,
                                      double* mean_value = nullptr);

// Draw the reported iterate: P(R = k) proportional to alpha_k * beta_k,
// k = 1..N (returned 1-based).
int sample_output_index(const std::vector<double>& alphas,
                        const std::vector<double>& betas,
                        std::mt19937_64& rng);

struct SangHistoryRow {
    int k;
    long evals_cumulative;  // oracle calls so far (2 per pair)
    double alpha, beta, eta;
    double gbar_norm_sq;    // squared norm of the averaged gradient
    double mean_cost;       // mean base evaluation at theta_k
    std::vector<double> theta;  // iterate theta_k
};

struct SangResult {
    std::vector<double> theta_r;  // reported iterate
    int r_index = 0;              // its iteration number, 1-based
    std::vector<SangHistoryRow> history;
    long total_evals = 0;
};

// Accelerated zeroth-order search: gradient step on the averaged estimate,
// convex combination with the running iterate, then a fresh estimate at
// the new point folded into the average. Reports a randomized iterate.
SangResult sang_run(const SangConfig& config, const PairedObjective& objective);

// CSV with header: k, evals_cumulative, alpha, beta, eta, gbar_norm_sq,
// mean_cost.
void write_history_csv(const std::vector<SangHistoryRow>& history,
                       std::ostream& out);

struct SmoothedEstimate {
    double value = 0.0;
    double value_stderr = 0.0;
    std::vector<double> grad;
    double grad_stderr = 0.0;  // L2-combined per-coordinate standard errors
};

// Monte Carlo estimate of the Gaussian-smoothed value E_v[f(theta + eta v)]
// and its gradient E_v[(f(theta + eta v) - f(theta))/eta * v].
SmoothedEstimate smoothed_reference(const PlainObjective& f,
                                    const std::vector<double>& theta,
                                    double eta, int n_samples,
                                    std::uint64_t seed);

// Largest finite-difference ratio |F(a,w)-F(b,w)| / |a-b| over random
// pairs in a ball around theta0; a cheap scale for configuring lip_l0.
double estimate_lipschitz(const PairedObjective& objective,
                          const std::vector<double>& theta0, double radius,
                          int n_probes, std::uint64_t seed);

}  // namespace cfa
