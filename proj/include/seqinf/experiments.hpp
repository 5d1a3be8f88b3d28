#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "seqinf/decision.hpp"
#include "seqinf/diffusion.hpp"
#include "seqinf/rng.hpp"
#include "seqinf/stopping.hpp"
#include "seqinf/sufficient_stats.hpp"

namespace seqinf {

enum class ErrorFamily {
    /// sqrt(3) * Uniform[-1, 1]: mean 0, variance 1.
    scaled_uniform,
    normal,
    /// Zero noise; outcomes equal their mean shift.
    degenerate,
};

/// Outcome model Y^(a) = shift_a + error_sd_a * eps. Arrays are indexed by
/// arm (0 control, 1 treatment).
struct DGPSpec {
    std::array<double, 2> shift{0.0, 0.0};
    std::array<double, 2> error_sd{1.0, 1.0};
    ErrorFamily errors = ErrorFamily::scaled_uniform;
    long n = 1000;

    /// Local alternative: shift_a = mu_a / sqrt(n).
    static DGPSpec local(double mu1, double mu0, long n, ErrorFamily errors = ErrorFamily::scaled_uniform);
};

/// Next outcome of `arm`, drawn from that arm's own counter stream.
double draw_outcome(const DGPSpec& dgp, int arm, CounterRng& arm_stream);

struct HorizontalDesign {
    double pi = 0.5;
    double gamma = 0.536;
    double t_cap = 5.0;
    /// Known outcome standard deviations used in the statistic, by arm.
    std::array<double, 2> sigma{1.0, 1.0};
};

struct HorizontalResult {
    StoppedOutcome outcome;
    ArmSummary arm1;
    ArmSummary arm0;
};

/// Fully sequential experiment with fixed sampling fraction pi. Outcome i
/// (t = i/n) goes to arm 1 when floor(i pi) > floor((i-1) pi); the run stops
/// at the first |x_n(t)| >= gamma or is censored at t_cap.
HorizontalResult run_horizontal_experiment(const DGPSpec& dgp, const HorizontalDesign& design, std::uint64_t seed);

struct GroupSequentialDesign {
    std::vector<Interval> intervals{{-2.797, 2.797}};
    int stages = 2;
    double pi = 0.5;
};

struct GroupSequentialResult {
    StoppedOutcome outcome;
    /// First-stage standard deviation estimates, by arm.
    std::array<double, 2> sigma_hat{0.0, 0.0};
};

/// Group-sequential experiment with dgp.n outcomes per stage (n pi to arm 1).
/// sigma_a is estimated from stage-1 data and frozen. Throws DataError when a
/// stage-1 variance estimate is zero.
GroupSequentialResult run_group_sequential(const DGPSpec& dgp, const GroupSequentialDesign& design,
                                           std::uint64_t seed);

/// Batched Thompson sampling with dgp.n outcomes per batch and sigma_a = 1
/// known. Returns the final (q, x) state.
BatchedState run_thompson_batched(const DGPSpec& dgp, int batches, std::uint64_t seed);

} // namespace seqinf
