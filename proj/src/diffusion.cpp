#include "seqinf/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqinf/error.hpp"
#include "seqinf/rng.hpp"

namespace seqinf {

TimeGrid::TimeGrid(double t_max, double dt) : t_max_(t_max), dt_(dt), n_steps_(0)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ConfigError("time grid: dt must be positive, got " + std::to_string(dt));
    }
    if (!(t_max > 0.0) || !std::isfinite(t_max)) {
        throw ConfigError("time grid: t_max must be positive, got " + std::to_string(t_max));
    }
    const double steps = std::round(t_max / dt);
    if (steps < 1.0) {
        throw ConfigError("time grid: t_max / dt rounds to zero steps");
    }
    n_steps_ = static_cast<std::size_t>(steps);
}

DiffusionPath simulate_path(const TimeGrid& grid, double drift, std::uint64_t seed)
{
    DiffusionPath path{grid, {}, drift, seed};
    path.values.resize(grid.n_steps() + 1);
    path.values[0] = 0.0;

    const CounterRng rng(seed, Stream::increments);
    const double mean_step = drift * grid.dt();
    const double sd_step = std::sqrt(grid.dt());
    double x = 0.0;
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        x += mean_step + sd_step * rng.normal_at(k);
        path.values[k + 1] = x;
    }
    return path;
}

double batch_increment(double allocation, double drift, double standard_normal)
{
    if (!(allocation >= 0.0 && allocation <= 1.0)) {
        throw DomainError("batch allocation must lie in [0, 1], got " + std::to_string(allocation));
    }
    if (allocation == 0.0) {
        return 0.0;
    }
    return drift * allocation + std::sqrt(allocation) * standard_normal;
}

BatchDraw simulate_batch_draw(int arm, double allocation, double drift, std::uint64_t seed, int batch_index)
{
    const CounterRng rng(seed, Stream::increments);
    BatchDraw draw;
    draw.arm = arm;
    draw.batch_index = batch_index;
    draw.allocation = allocation;
    draw.value = batch_increment(allocation, drift, rng.normal_at(0));
    return draw;
}

double girsanov_exponent(double x_at_tau, double tau, double mu, double sigma)
{
    if (!(sigma > 0.0)) {
        throw DomainError("girsanov exponent: sigma must be positive");
    }
    if (!(tau >= 0.0)) {
        throw DomainError("girsanov exponent: tau must be non-negative");
    }
    const double ratio = mu / sigma;
    return ratio * x_at_tau - 0.5 * ratio * ratio * tau;
}

double batched_girsanov_exponent(const BatchedState& state, double mu1, double mu0, double sigma1, double sigma0)
{
    if (!(sigma1 > 0.0) || !(sigma0 > 0.0)) {
        throw DomainError("batched girsanov exponent: sigma must be positive");
    }
    if (state.q[1] < 0.0 || state.q[0] < 0.0) {
        throw DomainError("batched girsanov exponent: negative cumulative allocation");
    }
    const double r1 = mu1 / sigma1;
    const double r0 = mu0 / sigma0;
    return r1 * state.x[1] - 0.5 * state.q[1] * r1 * r1 + r0 * state.x[0] - 0.5 * state.q[0] * r0 * r0;
}

MonteCarloEstimate reweight_expectation(std::span<const WeightedValue> draws)
{
    if (draws.empty()) {
        throw DomainError("reweight_expectation: no draws");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& d : draws) {
        if (!std::isfinite(d.exponent)) {
            throw DomainError("reweight_expectation: non-finite exponent");
        }
        const double w = d.value * std::exp(d.exponent);
        sum += w;
        sum_sq += w * w;
    }
    const double n = static_cast<double>(draws.size());
    const double mean = sum / n;
    const double var = draws.size() > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n)};
}

} // namespace seqinf
