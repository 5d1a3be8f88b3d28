#include "seqinf/decision.hpp"

#include <cfloat>
#include <cmath>

#include "seqinf/error.hpp"
#include "seqinf/normal.hpp"

namespace seqinf {

TestDecision stopping_time_test(const StoppedOutcome& outcome, double c)
{
    if (!(c > 0.0)) {
        throw DomainError("stopping_time_test: cutoff must be positive");
    }
    const bool reject = !outcome.censored && outcome.tau <= c;
    return {reject, outcome.tau, outcome.tau, "stopping_time"};
}

TestDecision np_limit_test(const StoppedOutcome& outcome, double mu, double sigma, double gamma)
{
    const double stat = girsanov_exponent(outcome.x_at_tau, outcome.tau, mu, sigma);
    return {stat >= gamma, stat, outcome.tau, "np_limit"};
}

TestDecision alpha_spending_test(const StoppedOutcome& outcome, const ThresholdTable& thresholds)
{
    const int stages = static_cast<int>(thresholds.stages.size());
    const int stage = stage_of(outcome, stages);
    const StageThreshold& st = thresholds.at(stage);
    const double x = outcome.x_at_tau;
    bool reject = false;
    switch (st.mode) {
    case StageMode::always_reject:
        reject = true;
        break;
    case StageMode::one_sided:
        reject = x >= st.upper;
        break;
    case StageMode::two_sided:
        reject = x < st.lower || x > st.upper;
        break;
    }
    return {reject, x, static_cast<double>(stage), "alpha_spending"};
}

TestDecision batched_np_test(const BatchedState& state, BatchedAlternative mu, std::array<double, 2> sigma,
                             double gamma)
{
    const double stat = batched_girsanov_exponent(state, mu.mu1, mu.mu0, sigma[1], sigma[0]);
    return {stat >= gamma, stat, static_cast<double>(state.batches), "batched_np"};
}

TestDecision wap_test(const StoppedOutcome& outcome, std::span<const WeightedAlternative> weights, double sigma,
                      double log_gamma)
{
    const double stat = wap_log_statistic(outcome, weights, sigma);
    return {stat >= log_gamma, stat, outcome.tau, "wap"};
}

TestDecision wap_test(const BatchedState& state, std::span<const WeightedAlternative> weights,
                      std::array<double, 2> sigma, double log_gamma)
{
    const double stat = wap_log_statistic(state, weights, sigma);
    return {stat >= log_gamma, stat, static_cast<double>(state.batches), "wap"};
}

TestDecision naive_two_sample_test(const ArmSummary& arm1, const ArmSummary& arm0, double alpha)
{
    if (arm1.count < 2 || arm0.count < 2) {
        throw DataError("naive_two_sample_test: each arm needs at least two observations");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("naive_two_sample_test: alpha must lie in (0, 1)");
    }
    const double diff = arm1.mean - arm0.mean;
    const double se = std::sqrt(arm1.variance / static_cast<double>(arm1.count) +
                                arm0.variance / static_cast<double>(arm0.count));
    const double n_total = static_cast<double>(arm1.count + arm0.count);
    if (se == 0.0) {
        const double stat = diff == 0.0 ? 0.0 : std::copysign(DBL_MAX, diff);
        return {diff != 0.0, stat, n_total, "naive_two_sample"};
    }
    const double z = diff / se;
    const double critical = normal_quantile(1.0 - alpha / 2.0);
    return {std::fabs(z) >= critical, z, n_total, "naive_two_sample"};
}

} // namespace seqinf
