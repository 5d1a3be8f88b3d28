#include "seqinf/rng.hpp"

#include "seqinf/normal.hpp"

namespace seqinf {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
{
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

} // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept
{
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, Stream stream) noexcept
    : seed_(seed),
      key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(static_cast<std::uint32_t>(stream))
{
}

PhiloxCounter CounterRng::block(std::uint64_t b) const noexcept
{
    return philox4x32_10({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32), stream_, 0u},
                         key_);
}

double CounterRng::to_unit(std::uint32_t hi, std::uint32_t lo) noexcept
{
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    // Midpoint of the 2^-53 cell: never exactly 0 or 1.
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double CounterRng::uniform_at(std::uint64_t index) const noexcept
{
    const PhiloxCounter out = block(index >> 1);
    return (index & 1) ? to_unit(out[2], out[3]) : to_unit(out[0], out[1]);
}

double CounterRng::normal_at(std::uint64_t index) const noexcept
{
    return normal_quantile(uniform_at(index));
}

double CounterRng::uniform() noexcept
{
    const std::uint64_t b = position_ >> 1;
    if (b != cached_block_) {
        cache_ = block(b);
        cached_block_ = b;
    }
    const double u = (position_ & 1) ? to_unit(cache_[2], cache_[3]) : to_unit(cache_[0], cache_[1]);
    ++position_;
    return u;
}

double CounterRng::normal() noexcept
{
    return normal_quantile(uniform());
}

} // namespace seqinf
