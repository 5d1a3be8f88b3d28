#include "seqinf/batched_policy.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "seqinf/error.hpp"
#include "seqinf/normal.hpp"
#include "seqinf/rng.hpp"

namespace seqinf {

void validate(const BatchedPolicySpec& policy)
{
    std::visit(
        [](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if (p.batches < 1) {
                throw ConfigError("batched policy: batches must be >= 1");
            }
            if constexpr (std::is_same_v<P, FixedAllocationPolicy>) {
                if (p.pi1 < 0.0 || p.pi0 < 0.0 || p.pi1 + p.pi0 > 1.0 + 1e-12) {
                    throw ConfigError("fixed allocation: need pi1, pi0 >= 0 and pi1 + pi0 <= 1");
                }
            }
        },
        policy);
}

int batch_count(const BatchedPolicySpec& policy)
{
    return std::visit([](const auto& p) { return p.batches; }, policy);
}

std::uint64_t policy_hash(const BatchedPolicySpec& policy)
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto mix = [&h](const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            h ^= bytes[i];
            h *= 0x100000001B3ULL;
        }
    };
    const auto index = static_cast<std::uint32_t>(policy.index() + 16);
    mix(&index, sizeof index);
    std::visit(
        [&mix](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            mix(&p.batches, sizeof p.batches);
            if constexpr (std::is_same_v<P, FixedAllocationPolicy>) {
                mix(&p.pi1, sizeof p.pi1);
                mix(&p.pi0, sizeof p.pi0);
            }
        },
        policy);
    return h;
}

std::string describe(const BatchedPolicySpec& policy)
{
    std::ostringstream os;
    std::visit(
        [&os](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ThompsonPolicy>) {
                os << "thompson(batches=" << p.batches << ")";
            } else {
                os << "fixed_allocation(batches=" << p.batches << ",pi1=" << p.pi1 << ",pi0=" << p.pi0 << ")";
            }
        },
        policy);
    return os.str();
}

std::array<double, 2> next_allocation(const BatchedPolicySpec& policy, const BatchedState& state)
{
    return std::visit(
        [&state](const auto& p) -> std::array<double, 2> {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, ThompsonPolicy>) {
                const double q1 = state.q[1];
                const double q0 = state.q[0];
                if (state.batches == 0 || q1 <= 0.0 || q0 <= 0.0) {
                    return {0.5, 0.5};
                }
                const double contrast = state.x[1] / q1 - state.x[0] / q0;
                const double scale = std::sqrt(static_cast<double>(state.batches) / (q1 * q0));
                const double pi1 = normal_cdf(contrast / scale);
                // Index 0 is the control arm.
                return {1.0 - pi1, pi1};
            } else {
                return {p.pi0, p.pi1};
            }
        },
        policy);
}

BatchedState draw_batched_limit(const BatchedPolicySpec& policy, const std::array<double, 2>& drift,
                                std::uint64_t seed)
{
    const CounterRng rng(seed, Stream::increments);
    const int batches = batch_count(policy);
    BatchedState state;
    for (int j = 0; j < batches; ++j) {
        const auto pi = next_allocation(policy, state);
        for (int a = 0; a < 2; ++a) {
            const double z = batch_increment(pi[a], drift[a], rng.normal_at(2 * static_cast<std::uint64_t>(j) + a));
            state.x[a] += z;
            state.q[a] += pi[a];
        }
        state.batches += 1;
    }
    return state;
}

} // namespace seqinf
