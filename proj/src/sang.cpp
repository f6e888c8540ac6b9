#include "cfa/sang.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "cfa/rng.hpp"

namespace cfa {

namespace {

void validate(const SangConfig& config) {
    if (config.dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (config.iterations < 0) throw std::invalid_argument("iterations must be >= 0");
    if (config.batch < 1) throw std::invalid_argument("batch must be >= 1");
    if (!(config.delta > 0.0)) throw std::invalid_argument("delta must be > 0");
    if (!(config.lip_l0 > 0.0)) throw std::invalid_argument("lip_l0 must be > 0");
    if (!(config.alpha_scale > 0.0)) {
        throw std::invalid_argument("alpha_scale must be > 0");
    }
    if (config.rule == StepsizeRule::rmsprop) {
        if (!(config.rms_b > 0.0)) throw std::invalid_argument("rms_b must be > 0");
        if (!(config.rms_gamma > 0.0) || !(config.rms_gamma < 1.0)) {
            throw std::invalid_argument("rms_gamma must be in (0, 1)");
        }
    }
    if (config.theta0.size() != static_cast<std::size_t>(config.dim)) {
        throw std::invalid_argument("theta0 length must equal dim");
    }
}

double norm_sq(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

}  // namespace

Schedule schedule(const SangConfig& config, int k) {
    if (k < 1 || k > std::max(config.iterations, 1)) {
        throw std::invalid_argument("schedule index out of range");
    }
    const double d = static_cast<double>(config.dim);
    Schedule s;
    s.alpha = std::min(
        1.0, config.alpha_scale /
                 std::sqrt(config.delta * (d + 4.0) * config.iterations));
    s.eta = config.delta / (config.lip_l0 * std::sqrt(d));
    s.beta = config.delta / (config.lip_l0 * config.lip_l0 * d);
    return s;
}

std::pair<double, double> rmsprop_step(double accumulator, double grad_norm_sq,
                                       double b, double gamma) {
    const double next = (1.0 - gamma) * accumulator + gamma * grad_norm_sq;
    const double beta = b / std::sqrt(std::max(next, 1e-12));
    return {beta, next};
}

std::vector<double> gradient_estimate(const PairedObjective& objective,
                                      const std::vector<double>& theta,
                                      double eta, int m, std::mt19937_64& rng,
                                      double* mean_value) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
    if (m < 1) throw std::invalid_argument("batch size must be >= 1");
    const std::size_t d = theta.size();
    std::vector<double> grad(d, 0.0);
    std::vector<double> direction(d);
    std::vector<double> bumped(d);
    double base_sum = 0.0;
    for (int i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            direction[j] = standard_normal(rng);
            bumped[j] = theta[j] + eta * direction[j];
        }
        const std::uint64_t omega = rng();  // one noise path shared by the pair
        const double f_base = objective(theta, omega);
        const double f_bump = objective(bumped, omega);
        const double slope = (f_bump - f_base) / eta;
        for (std::size_t j = 0; j < d; ++j) grad[j] += slope * direction[j];
        base_sum += f_base;
    }
    for (std::size_t j = 0; j < d; ++j) grad[j] /= m;
    if (mean_value != nullptr) *mean_value = base_sum / m;
    return grad;
}

int sample_output_index(const std::vector<double>& alphas,
                        const std::vector<double>& betas,
                        std::mt19937_64& rng) {
    if (alphas.empty() || alphas.size() != betas.size()) {
        throw std::invalid_argument("weight vectors must be nonempty and equal-sized");
    }
    const std::size_t n = alphas.size();
    std::vector<double> weights(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = alphas[k] * betas[k];
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("output-index weights must be positive");
        }
        weights[k] = w;
        total += w;
    }
    const double u = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += weights[k];
        if (u < acc) return static_cast<int>(k) + 1;
    }
    return static_cast<int>(n);
}

SangResult sang_run(const SangConfig& config, const PairedObjective& objective) {
    validate(config);
    SangResult result;
    if (config.iterations == 0) {
        result.theta_r = config.theta0;
        return result;
    }

    std::mt19937_64 rng(config.seed);
    const std::size_t d = static_cast<std::size_t>(config.dim);
    std::vector<double> theta = config.theta0;
    std::vector<double> gbar(d, 0.0);

    double rms_acc = 0.0;
    bool rms_seeded = false;
    double prev_grad_norm_sq = 0.0;

    std::vector<double> alphas, betas;
    alphas.reserve(static_cast<std::size_t>(config.iterations));
    betas.reserve(static_cast<std::size_t>(config.iterations));
    result.history.reserve(static_cast<std::size_t>(config.iterations));

    for (int k = 1; k <= config.iterations; ++k) {
        const Schedule sched = schedule(config, k);
        double beta = sched.beta;
        if (config.rule == StepsizeRule::rmsprop) {
            if (!rms_seeded) {
                // Gbar^0 = 0 makes the first move a no-op, so beta_1 can be
                // fixed after the first gradient is known (recorded below).
                beta = 0.0;
            } else {
                const auto [b, acc] =
                    rmsprop_step(rms_acc, prev_grad_norm_sq, config.rms_b,
                                 config.rms_gamma);
                beta = b;
                rms_acc = acc;
            }
        }

        // theta^k = theta^{k-1} - alpha_k beta_k Gbar^{k-1}; checked against
        // the two-stage form (extrapolate, then average) it collapses from.
        const double step = sched.alpha * beta;
        for (std::size_t j = 0; j < d; ++j) {
            const double fused = theta[j] - step * gbar[j];
            const double two_stage =
                (1.0 - sched.alpha) * theta[j] +
                sched.alpha * (theta[j] - beta * gbar[j]);
            if (std::fabs(two_stage - fused) > 1e-9 * (1.0 + std::fabs(fused))) {
                throw std::logic_error("update identity violated");
            }
            theta[j] = fused;
        }

        double mean_cost = 0.0;
        const std::vector<double> grad = gradient_estimate(
            objective, theta, sched.eta, config.batch, rng, &mean_cost);
        const double gsq = norm_sq(grad);
        if (config.rule == StepsizeRule::rmsprop && !rms_seeded) {
            rms_acc = gsq;
            rms_seeded = true;
            beta = config.rms_b / std::sqrt(std::max(rms_acc, 1e-12));
        }
        prev_grad_norm_sq = gsq;

        for (std::size_t j = 0; j < d; ++j) {
            gbar[j] = (1.0 - sched.alpha) * gbar[j] + sched.alpha * grad[j];
        }

        result.total_evals += 2L * config.batch;
        alphas.push_back(sched.alpha);
        betas.push_back(beta);
        SangHistoryRow row;
        row.k = k;
        row.evals_cumulative = result.total_evals;
        row.alpha = sched.alpha;
        row.beta = beta;
        row.eta = sched.eta;
        row.gbar_norm_sq = norm_sq(gbar);
        row.mean_cost = mean_cost;
        row.theta = theta;
        result.history.push_back(std::move(row));
    }

    result.r_index = sample_output_index(alphas, betas, rng);
    result.theta_r = result.history[static_cast<std::size_t>(result.r_index - 1)].theta;
    return result;
}

void write_history_csv(const std::vector<SangHistoryRow>& history,
                       std::ostream& out) {
    out << "k,evals_cumulative,alpha,beta,eta,gbar_norm_sq,mean_cost\n";
    out << std::setprecision(12);
    for (const auto& row : history) {
        out << row.k << ',' << row.evals_cumulative << ',' << row.alpha << ','
            << row.beta << ',' << row.eta << ',' << row.gbar_norm_sq << ','
            << row.mean_cost << '\n';
    }
}

SmoothedEstimate smoothed_reference(const PlainObjective& f,
                                    const std::vector<double>& theta,
                                    double eta, int n_samples,
                                    std::uint64_t seed) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    const std::size_t d = theta.size();
    std::mt19937_64 rng(seed);
    const double f_theta = f(theta);

    std::vector<double> bumped(d);
    std::vector<double> grad_mean(d, 0.0);
    std::vector<double> grad_m2(d, 0.0);
    double val_mean = 0.0, val_m2 = 0.0;
    std::vector<double> v(d);
    for (int i = 1; i <= n_samples; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            v[j] = standard_normal(rng);
            bumped[j] = theta[j] + eta * v[j];
        }
        const double fb = f(bumped);
        const double slope = (fb - f_theta) / eta;
        const double dv = fb - val_mean;
        val_mean += dv / i;
        val_m2 += dv * (fb - val_mean);
        for (std::size_t j = 0; j < d; ++j) {
            const double g = slope * v[j];
            const double dg = g - grad_mean[j];
            grad_mean[j] += dg / i;
            grad_m2[j] += dg * (g - grad_mean[j]);
        }
    }
    SmoothedEstimate est;
    est.value = val_mean;
    est.grad = grad_mean;
    if (n_samples > 1) {
        est.value_stderr = std::sqrt(val_m2 / (n_samples - 1) / n_samples);
        double sum_var = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            sum_var += grad_m2[j] / (n_samples - 1) / n_samples;
        }
        est.grad_stderr = std::sqrt(sum_var);
    }
    return est;
}

double estimate_lipschitz(const PairedObjective& objective,
                          const std::vector<double>& theta0, double radius,
                          int n_probes, std::uint64_t seed) {
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
    if (n_probes < 1) throw std::invalid_argument("n_probes must be >= 1");
    const std::size_t d = theta0.size();
    std::mt19937_64 rng(seed);
    std::vector<double> a(d), b(d);
    double best = 0.0;
    for (int i = 0; i < n_probes; ++i) {
        double dist_sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            a[j] = theta0[j] + radius * (2.0 * uniform01(rng) - 1.0);
            b[j] = theta0[j] + radius * (2.0 * uniform01(rng) - 1.0);
            dist_sq += (a[j] - b[j]) * (a[j] - b[j]);
        }
        const double dist = std::sqrt(dist_sq);
        if (dist < 1e-12) continue;
        const std::uint64_t omega = rng();
        const double ratio = std::fabs(objective(a, omega) - objective(b, omega)) / dist;
        best = std::max(best, ratio);
    }
    return best;
}

}  // namespace cfa
