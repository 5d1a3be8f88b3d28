#pragma once

#include <array>
#include <cstdint>

namespace seqinf {

/// Philox4x32-10 block function (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept;

/// SplitMix64 finalizer; used to hash replication indices into seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of replication `r`: base_seed XOR hash(r). Results depend only on
/// (base_seed, r), never on execution order or thread count.
inline std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t r) noexcept
{
    return base_seed ^ splitmix64(r);
}

/// Derive an independent base seed for a sub-study (e.g. a validation table).
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t tag) noexcept
{
    return splitmix64(base_seed ^ splitmix64(tag + 0x5851F42D4C957F2DULL));
}

/// Named sub-streams of one replication seed. Each stream is an independent
/// counter space, so e.g. bridge-crossing uniforms never perturb path
/// increments.
enum class Stream : std::uint32_t {
    increments = 0,
    bridge = 1,
    arm1 = 2,
    arm0 = 3,
    aux = 4,
};

/// Counter-based generator: the k-th uniform of a stream is a pure function of
/// (seed, stream, k). Supports random access and a sequential cursor.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, Stream stream = Stream::increments) noexcept;

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform_at(std::uint64_t index) const noexcept;
    /// Standard normal draw, Phi^{-1}(uniform_at(index)).
    double normal_at(std::uint64_t index) const noexcept;

    double uniform() noexcept;
    double normal() noexcept;

    std::uint64_t position() const noexcept { return position_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    PhiloxKey key_;
    std::uint32_t stream_;
    std::uint64_t position_ = 0;
    std::uint64_t cached_block_ = ~std::uint64_t{0};
    PhiloxCounter cache_{};

    PhiloxCounter block(std::uint64_t b) const noexcept;
    static double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept;
};

} // namespace seqinf
