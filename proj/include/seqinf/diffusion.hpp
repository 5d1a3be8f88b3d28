#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace seqinf {

/// Uniform time grid on [0, t_max].
class TimeGrid {
public:
    /// Throws ConfigError unless dt > 0 and round(t_max / dt) >= 1.
    TimeGrid(double t_max, double dt);

    double t_max() const noexcept { return t_max_; }
    double dt() const noexcept { return dt_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    double time(std::size_t k) const noexcept { return static_cast<double>(k) * dt_; }

private:
    double t_max_;
    double dt_;
    std::size_t n_steps_;
};

/// Discretized path of x(t) = drift * t + W(t); values[0] = 0.
struct DiffusionPath {
    TimeGrid grid;
    std::vector<double> values;
    double drift = 0.0;
    std::uint64_t seed = 0;
};

/// One batch increment z ~ N(drift * pi, pi) of the batched limit experiment.
struct BatchDraw {
    int arm = 0;
    int batch_index = 1;
    double allocation = 0.0;
    double value = 0.0;
};

/// Per-arm cumulative statistics (q_a, x_a) after `batches` batches.
/// Index 1 is the treatment arm, index 0 the control arm.
struct BatchedState {
    std::array<double, 2> q{0.0, 0.0};
    std::array<double, 2> x{0.0, 0.0};
    int batches = 0;

    friend bool operator==(const BatchedState&, const BatchedState&) = default;
};

/// Path increment k is drift * dt + sqrt(dt) * N_k with N_k the k-th normal of
/// the replication's increment stream.
DiffusionPath simulate_path(const TimeGrid& grid, double drift, std::uint64_t seed);

/// z = drift * pi + sqrt(pi) * N; pi = 0 yields exactly 0. Throws DomainError
/// for pi outside [0, 1].
BatchDraw simulate_batch_draw(int arm, double allocation, double drift, std::uint64_t seed, int batch_index = 1);

/// Same law as simulate_batch_draw, from a caller-supplied standard normal.
double batch_increment(double allocation, double drift, double standard_normal);

/// Log-likelihood ratio of drift mu/sigma against 0 for a standardized path
/// stopped at tau: (mu/sigma) x - mu^2 tau / (2 sigma^2).
double girsanov_exponent(double x_at_tau, double tau, double mu, double sigma);

/// Batched analogue: sum_a (mu_a/sigma_a) x_a - q_a mu_a^2 / (2 sigma_a^2).
double batched_girsanov_exponent(const BatchedState& state, double mu1, double mu0, double sigma1, double sigma0);

/// Log-likelihood ratio for a path with unit-variance drift `drift` against
/// a null drift `null_drift`, both in x-units.
inline double log_likelihood_ratio(double x_at_tau, double tau, double drift, double null_drift) noexcept
{
    return (drift - null_drift) * x_at_tau - 0.5 * (drift * drift - null_drift * null_drift) * tau;
}

struct WeightedValue {
    double value = 0.0;
    double exponent = 0.0;
};

struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Importance-sampling estimate of E_alt[value] from null draws:
/// mean of value * exp(exponent). Throws DomainError on empty input or a
/// non-finite exponent.
MonteCarloEstimate reweight_expectation(std::span<const WeightedValue> draws);

} // namespace seqinf
