#include "seqinf/stopping.hpp"

#include <cmath>
#include <cstring>
#include <optional>
#include <sstream>

#include "seqinf/error.hpp"
#include "seqinf/rng.hpp"

namespace seqinf {

namespace {

// Beyond this value of 2ab/dt the bridge crossing probability is below the
// 2^-53 resolution of the uniforms and the crossing test is skipped.
constexpr double kBridgeCutoff = 40.0;

// Shared step logic of first_exit and draw_horizontal_exit.
class ExitScanner {
public:
    ExitScanner(double dt, double gamma, Monitoring monitoring, std::uint64_t seed)
        : dt_(dt), gamma_(gamma), monitoring_(monitoring), bridge_(seed, Stream::bridge)
    {
    }

    // Step k moves the path from x0 at (k-1) dt to x1 at k dt.
    std::optional<StoppedOutcome> step(std::size_t k, double x0, double x1) const
    {
        const bool continuous = monitoring_ == Monitoring::continuous;
        const double t_mid = (static_cast<double>(k) - 0.5) * dt_;
        if (std::fabs(x1) >= gamma_) {
            const int sign = x1 > 0.0 ? 1 : -1;
            if (continuous) {
                return StoppedOutcome{t_mid, sign * gamma_, sign, false};
            }
            return StoppedOutcome{static_cast<double>(k) * dt_, x1, sign, false};
        }
        if (!continuous) {
            return std::nullopt;
        }
        const double up = 2.0 * (gamma_ - x0) * (gamma_ - x1) / dt_;
        const double down = 2.0 * (gamma_ + x0) * (gamma_ + x1) / dt_;
        const double p_up = up < kBridgeCutoff ? std::exp(-up) : 0.0;
        const double p_down = down < kBridgeCutoff ? std::exp(-down) : 0.0;
        if (p_up == 0.0 && p_down == 0.0) {
            return std::nullopt;
        }
        const double u = bridge_.uniform_at(k);
        if (u < p_up) {
            return StoppedOutcome{t_mid, gamma_, 1, false};
        }
        if (u < p_up + p_down) {
            return StoppedOutcome{t_mid, -gamma_, -1, false};
        }
        return std::nullopt;
    }

private:
    double dt_;
    double gamma_;
    Monitoring monitoring_;
    CounterRng bridge_;
};

std::size_t cap_steps(double t_cap, double dt)
{
    return static_cast<std::size_t>(std::llround(t_cap / dt));
}

void check_horizontal(double gamma, double t_cap)
{
    if (!(gamma > 0.0)) {
        throw ConfigError("horizontal rule: gamma must be positive");
    }
    if (!(t_cap > 0.0)) {
        throw ConfigError("horizontal rule: t_cap must be positive");
    }
}

template <class T>
void hash_bytes(std::uint64_t& h, const T& value)
{
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001B3ULL;
    }
}

} // namespace

void validate(const StoppingRuleSpec& rule)
{
    std::visit(
        [](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, HorizontalRule>) {
                check_horizontal(r.gamma, r.t_cap);
            } else if constexpr (std::is_same_v<R, GroupSequentialRule>) {
                if (r.stages < 1) {
                    throw ConfigError("group-sequential rule: stages must be >= 1");
                }
                if (r.intervals.size() != static_cast<std::size_t>(r.stages - 1)) {
                    throw ConfigError("group-sequential rule: need one interval per interim stage (" +
                                      std::to_string(r.stages - 1) + "), got " +
                                      std::to_string(r.intervals.size()));
                }
                for (const auto& iv : r.intervals) {
                    if (!(iv.lo < iv.hi)) {
                        throw ConfigError("group-sequential rule: interval lo must be < hi");
                    }
                }
            } else {
                if (!(r.t > 0.0)) {
                    throw ConfigError("fixed-time rule: t must be positive");
                }
            }
        },
        rule);
}

std::uint64_t rule_hash(const StoppingRuleSpec& rule)
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    hash_bytes(h, static_cast<std::uint32_t>(rule.index()));
    std::visit(
        [&h](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, HorizontalRule>) {
                hash_bytes(h, r.gamma);
                hash_bytes(h, r.t_cap);
            } else if constexpr (std::is_same_v<R, GroupSequentialRule>) {
                hash_bytes(h, r.stages);
                for (const auto& iv : r.intervals) {
                    hash_bytes(h, iv.lo);
                    hash_bytes(h, iv.hi);
                }
            } else {
                hash_bytes(h, r.t);
            }
        },
        rule);
    return h;
}

std::string describe(const StoppingRuleSpec& rule)
{
    std::ostringstream os;
    std::visit(
        [&os](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, HorizontalRule>) {
                os << "horizontal(gamma=" << r.gamma << ",t_cap=" << r.t_cap << ")";
            } else if constexpr (std::is_same_v<R, GroupSequentialRule>) {
                os << "group_sequential(stages=" << r.stages;
                for (const auto& iv : r.intervals) {
                    os << ",[" << iv.lo << "," << iv.hi << "]";
                }
                os << ")";
            } else {
                os << "fixed_time(t=" << r.t << ")";
            }
        },
        rule);
    return os.str();
}

bool is_discrete_stage_rule(const StoppingRuleSpec& rule)
{
    return std::holds_alternative<GroupSequentialRule>(rule);
}

StoppedOutcome first_exit(const DiffusionPath& path, double gamma, double t_cap, Monitoring monitoring)
{
    check_horizontal(gamma, t_cap);
    const double dt = path.grid.dt();
    const std::size_t k_cap = cap_steps(t_cap, dt);
    if (k_cap > path.grid.n_steps()) {
        throw ConfigError("first_exit: t_cap exceeds the path horizon");
    }
    const ExitScanner scanner(dt, gamma, monitoring, path.seed);
    for (std::size_t k = 1; k <= k_cap; ++k) {
        if (auto out = scanner.step(k, path.values[k - 1], path.values[k])) {
            return *out;
        }
    }
    return StoppedOutcome{static_cast<double>(k_cap) * dt, path.values[k_cap], 0, true};
}

StoppedOutcome draw_horizontal_exit(double dt, double drift, double gamma, double t_cap, Monitoring monitoring,
                                    std::uint64_t seed)
{
    check_horizontal(gamma, t_cap);
    if (!(dt > 0.0)) {
        throw ConfigError("draw_horizontal_exit: dt must be positive");
    }
    const std::size_t k_cap = cap_steps(t_cap, dt);
    const ExitScanner scanner(dt, gamma, monitoring, seed);
    const CounterRng rng(seed, Stream::increments);
    const double mean_step = drift * dt;
    const double sd_step = std::sqrt(dt);
    double x = 0.0;
    for (std::size_t k = 1; k <= k_cap; ++k) {
        const double next = x + (mean_step + sd_step * rng.normal_at(k - 1));
        if (auto out = scanner.step(k, x, next)) {
            return *out;
        }
        x = next;
    }
    return StoppedOutcome{static_cast<double>(k_cap) * dt, x, 0, true};
}

StoppedOutcome group_sequential_stop(std::span<const double> stage_values, std::span<const Interval> intervals)
{
    if (stage_values.empty() || intervals.size() + 1 != stage_values.size()) {
        throw ConfigError("group_sequential_stop: need T stage values and T-1 intervals");
    }
    std::size_t stage = stage_values.size();
    for (std::size_t t = 0; t < intervals.size(); ++t) {
        const double x = stage_values[t];
        if (x < intervals[t].lo || x > intervals[t].hi) {
            stage = t + 1;
            break;
        }
    }
    const double x = stage_values[stage - 1];
    const int sign = x > 0.0 ? 1 : (x < 0.0 ? -1 : 0);
    return StoppedOutcome{static_cast<double>(stage), x, sign, false};
}

StoppedOutcome draw_stopped_outcome(const StoppingRuleSpec& rule, double dt, double drift, Monitoring monitoring,
                                    std::uint64_t seed)
{
    return std::visit(
        [&](const auto& r) -> StoppedOutcome {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, HorizontalRule>) {
                return draw_horizontal_exit(dt, drift, r.gamma, r.t_cap, monitoring, seed);
            } else if constexpr (std::is_same_v<R, GroupSequentialRule>) {
                const CounterRng rng(seed, Stream::increments);
                // Stages are unit time apart.
                std::vector<double> values(static_cast<std::size_t>(r.stages));
                double x = 0.0;
                for (int t = 0; t < r.stages; ++t) {
                    x += drift + rng.normal_at(static_cast<std::uint64_t>(t));
                    values[static_cast<std::size_t>(t)] = x;
                }
                return group_sequential_stop(values, r.intervals);
            } else {
                const CounterRng rng(seed, Stream::increments);
                const double x = drift * r.t + std::sqrt(r.t) * rng.normal_at(0);
                const int sign = x > 0.0 ? 1 : (x < 0.0 ? -1 : 0);
                return StoppedOutcome{r.t, x, sign, false};
            }
        },
        rule);
}

} // namespace seqinf
