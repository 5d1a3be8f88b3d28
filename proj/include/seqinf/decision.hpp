#pragma once

#include <array>
#include <span>
#include <string_view>

#include "seqinf/calibration.hpp"
#include "seqinf/diffusion.hpp"
#include "seqinf/stopping.hpp"

namespace seqinf {

/// Non-randomized decision phi in {0, 1}. Rejection regions are closed.
struct TestDecision {
    bool reject = false;
    double statistic = 0.0;
    double stage_or_tau = 0.0;
    std::string_view test_id;
};

/// Reject iff the experiment stopped (uncensored) by time c. Ignores x(tau)
/// and the boundary sign. Throws DomainError unless c > 0.
TestDecision stopping_time_test(const StoppedOutcome& outcome, double c);

/// Reject iff girsanov_exponent(x(tau), tau, mu, sigma) >= gamma.
TestDecision np_limit_test(const StoppedOutcome& outcome, double mu, double sigma, double gamma);

/// Stage-wise alpha-spending decision. Throws ConfigError if the outcome's
/// stage is missing from the table.
TestDecision alpha_spending_test(const StoppedOutcome& outcome, const ThresholdTable& thresholds);

/// Reject iff batched_girsanov_exponent(state, mu, sigma) >= gamma.
TestDecision batched_np_test(const BatchedState& state, BatchedAlternative mu, std::array<double, 2> sigma,
                             double gamma);

/// Weighted-average-power decision in the log domain: reject iff
/// log sum_k w_k exp(exponent_k) >= log_gamma.
TestDecision wap_test(const StoppedOutcome& outcome, std::span<const WeightedAlternative> weights, double sigma,
                      double log_gamma);
TestDecision wap_test(const BatchedState& state, std::span<const WeightedAlternative> weights,
                      std::array<double, 2> sigma, double log_gamma);

/// Sample mean, unbiased sample variance and size of one arm.
struct ArmSummary {
    double mean = 0.0;
    double variance = 0.0;
    long count = 0;
};

/// Two-sided z-test of equal means with plug-in variances at nominal level
/// alpha, ignoring how the sample size was chosen. Throws DataError if either
/// arm has fewer than two observations.
TestDecision naive_two_sample_test(const ArmSummary& arm1, const ArmSummary& arm0, double alpha);

} // namespace seqinf
