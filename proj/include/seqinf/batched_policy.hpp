#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>

#include "seqinf/diffusion.hpp"

namespace seqinf {

/// Batched Thompson sampling under an under-smoothed prior: pi_1 = 1/2 in the
/// first batch, then pi_{j+1} = Phi((x1/q1 - x0/q0) / sqrt(j / (q1 q0))).
struct ThompsonPolicy {
    int batches = 10;
};

/// Constant allocation (pi1, pi0) in every batch.
struct FixedAllocationPolicy {
    int batches = 1;
    double pi1 = 0.5;
    double pi0 = 0.5;
};

using BatchedPolicySpec = std::variant<ThompsonPolicy, FixedAllocationPolicy>;

void validate(const BatchedPolicySpec& policy);
int batch_count(const BatchedPolicySpec& policy);
std::uint64_t policy_hash(const BatchedPolicySpec& policy);
std::string describe(const BatchedPolicySpec& policy);

/// Allocation (pi_1, pi_0) for the next batch given the state after
/// state.batches completed batches. Index 1 is the treatment arm.
std::array<double, 2> next_allocation(const BatchedPolicySpec& policy, const BatchedState& state);

/// One draw of the batched limit experiment: x_a accumulates N(drift_a pi, pi)
/// increments. drift is per unit of q, i.e. mu_a / sigma_a on the local scale.
BatchedState draw_batched_limit(const BatchedPolicySpec& policy, const std::array<double, 2>& drift,
                                std::uint64_t seed);

} // namespace seqinf
