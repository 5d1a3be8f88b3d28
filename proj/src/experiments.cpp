#include "seqinf/experiments.hpp"

#include <cmath>
#include <string>

#include "seqinf/batched_policy.hpp"
#include "seqinf/error.hpp"
#include "seqinf/normal.hpp"

namespace seqinf {

DGPSpec DGPSpec::local(double mu1, double mu0, long n, ErrorFamily errors)
{
    if (n < 1) {
        throw ConfigError("DGP: n must be >= 1");
    }
    DGPSpec dgp;
    const double root_n = std::sqrt(static_cast<double>(n));
    dgp.shift = {mu0 / root_n, mu1 / root_n};
    dgp.errors = errors;
    dgp.n = n;
    return dgp;
}

double draw_outcome(const DGPSpec& dgp, int arm, CounterRng& arm_stream)
{
    double eps = 0.0;
    switch (dgp.errors) {
    case ErrorFamily::scaled_uniform:
        eps = std::sqrt(3.0) * (2.0 * arm_stream.uniform() - 1.0);
        break;
    case ErrorFamily::normal:
        eps = arm_stream.normal();
        break;
    case ErrorFamily::degenerate:
        break;
    }
    return dgp.shift[arm] + dgp.error_sd[arm] * eps;
}

HorizontalResult run_horizontal_experiment(const DGPSpec& dgp, const HorizontalDesign& design, std::uint64_t seed)
{
    const double pi = design.pi;
    const double sigma = two_sample_sigma(pi, design.sigma[1], design.sigma[0]);
    if (!(design.gamma > 0.0) || !(design.t_cap > 0.0)) {
        throw ConfigError("horizontal design: gamma and t_cap must be positive");
    }
    const double n = static_cast<double>(dgp.n);
    const double root_n = std::sqrt(n);
    const double scale1 = 1.0 / (sigma * pi * root_n);
    const double scale0 = 1.0 / (sigma * (1.0 - pi) * root_n);
    const auto units = static_cast<std::uint64_t>(std::llround(design.t_cap * n));

    CounterRng stream1(seed, Stream::arm1);
    CounterRng stream0(seed, Stream::arm0);
    RunningMoments m1;
    RunningMoments m0;
    HorizontalResult result;
    double x = 0.0;
    bool stopped = false;
    std::uint64_t i = 1;
    for (; i <= units; ++i) {
        const bool treat = std::floor(static_cast<double>(i) * pi) > std::floor(static_cast<double>(i - 1) * pi);
        if (treat) {
            m1.add(draw_outcome(dgp, 1, stream1));
        } else {
            m0.add(draw_outcome(dgp, 0, stream0));
        }
        x = scale1 * m1.sum() - scale0 * m0.sum();
        if (std::fabs(x) >= design.gamma) {
            stopped = true;
            break;
        }
    }
    if (stopped) {
        result.outcome = {static_cast<double>(i) / n, x, x > 0.0 ? 1 : -1, false};
    } else {
        result.outcome = {static_cast<double>(units) / n, x, 0, true};
    }
    result.arm1 = {m1.mean(), m1.sample_variance(), static_cast<long>(m1.count())};
    result.arm0 = {m0.mean(), m0.sample_variance(), static_cast<long>(m0.count())};
    return result;
}

GroupSequentialResult run_group_sequential(const DGPSpec& dgp, const GroupSequentialDesign& design,
                                           std::uint64_t seed)
{
    validate(StoppingRuleSpec{GroupSequentialRule{design.intervals, design.stages}});
    const double pi = design.pi;
    if (!(pi > 0.0 && pi < 1.0)) {
        throw DomainError("group-sequential design: pi must lie in (0, 1)");
    }
    const double n = static_cast<double>(dgp.n);
    const double root_n = std::sqrt(n);
    CounterRng stream1(seed, Stream::arm1);
    CounterRng stream0(seed, Stream::arm0);

    GroupSequentialResult result;
    std::array<double, 2> sums{0.0, 0.0};
    std::array<std::uint64_t, 2> drawn{0, 0};
    std::vector<double> stage_values(static_cast<std::size_t>(design.stages), 0.0);
    double sigma = 0.0;

    for (int t = 1; t <= design.stages; ++t) {
        const std::array<std::uint64_t, 2> target{
            static_cast<std::uint64_t>(std::floor(n * (1.0 - pi) * t)),
            static_cast<std::uint64_t>(std::floor(n * pi * t)),
        };
        std::array<std::vector<double>, 2> first_stage;
        for (int a = 0; a < 2; ++a) {
            CounterRng& stream = a == 1 ? stream1 : stream0;
            for (; drawn[a] < target[a]; ++drawn[a]) {
                const double y = draw_outcome(dgp, a, stream);
                sums[a] += y;
                if (t == 1) {
                    first_stage[a].push_back(y);
                }
            }
        }
        if (t == 1) {
            for (int a = 0; a < 2; ++a) {
                const auto est = estimate_variance(first_stage[a], VarianceMethod::first_batch, first_stage[a].size());
                if (est.value <= 0.0) {
                    throw DataError("group-sequential: stage-1 variance estimate is zero for arm " +
                                    std::to_string(a));
                }
                result.sigma_hat[a] = std::sqrt(est.value);
            }
            sigma = two_sample_sigma(pi, result.sigma_hat[1], result.sigma_hat[0]);
        }
        const double x = (sums[1] / (pi * root_n) - sums[0] / ((1.0 - pi) * root_n)) / sigma;
        stage_values[static_cast<std::size_t>(t - 1)] = x;
        if (t < design.stages) {
            const auto& iv = design.intervals[static_cast<std::size_t>(t - 1)];
            if (x < iv.lo || x > iv.hi) {
                break;
            }
        }
    }
    result.outcome = group_sequential_stop(stage_values, design.intervals);
    return result;
}

BatchedState run_thompson_batched(const DGPSpec& dgp, int batches, std::uint64_t seed)
{
    if (batches < 1 || dgp.n < 1) {
        throw ConfigError("thompson experiment: need batches >= 1 and n >= 1");
    }
    const ThompsonPolicy policy{batches};
    CounterRng stream1(seed, Stream::arm1);
    CounterRng stream0(seed, Stream::arm0);
    const std::array<double, 2> sigma{1.0, 1.0};
    std::array<std::vector<double>, 2> outcomes;
    BatchedState state;
    for (int j = 0; j < batches; ++j) {
        const auto pi = next_allocation(policy, state);
        for (int a = 0; a < 2; ++a) {
            CounterRng& stream = a == 1 ? stream1 : stream0;
            const long count = batch_outcome_count(dgp.n, pi[a]);
            outcomes[a].resize(static_cast<std::size_t>(count));
            for (long i = 0; i < count; ++i) {
                outcomes[a][static_cast<std::size_t>(i)] = draw_outcome(dgp, a, stream);
            }
        }
        state = batched_state_update(state, {outcomes[0], outcomes[1]}, pi, sigma, dgp.n);
    }
    return state;
}

} // namespace seqinf
