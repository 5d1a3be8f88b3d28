#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "seqinf/diffusion.hpp"

namespace seqinf {

/// Sufficient statistic pair (tau, x(tau)) of a stopped experiment.
/// delta is the boundary sign for horizontal rules (0 when censored) and
/// sign(x(tau)) otherwise.
struct StoppedOutcome {
    double tau = 0.0;
    double x_at_tau = 0.0;
    int delta = 0;
    bool censored = false;

    friend bool operator==(const StoppedOutcome&, const StoppedOutcome&) = default;
};

/// How a horizontal boundary is monitored between grid points.
///
/// discrete:   only grid values are checked (the finite experiment's view when
///             the grid matches its observation times).
/// continuous: a Brownian-bridge crossing test is applied on every step, so the
///             exit law is that of the continuously monitored process up to
///             O(dt) timing error. Exits report tau at the step midpoint and
///             x(tau) = +/- gamma.
enum class Monitoring { discrete, continuous };

struct HorizontalRule {
    double gamma = 0.536;
    double t_cap = 5.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Stop at the first stage t < T with x(t) outside intervals[t-1]; otherwise at T.
struct GroupSequentialRule {
    std::vector<Interval> intervals;
    int stages = 2;
};

struct FixedTimeRule {
    double t = 1.0;
};

using StoppingRuleSpec = std::variant<HorizontalRule, GroupSequentialRule, FixedTimeRule>;

/// Throws ConfigError when the rule violates its invariants.
void validate(const StoppingRuleSpec& rule);
std::uint64_t rule_hash(const StoppingRuleSpec& rule);
std::string describe(const StoppingRuleSpec& rule);
bool is_discrete_stage_rule(const StoppingRuleSpec& rule);

/// Grid scan for |x| >= gamma up to t_cap. Uncensored outcomes report the
/// first grid time at or beyond the boundary. Throws ConfigError if t_cap
/// exceeds the path horizon or gamma <= 0.
StoppedOutcome first_exit(const DiffusionPath& path, double gamma, double t_cap,
                          Monitoring monitoring = Monitoring::discrete);

/// Streaming equivalent of first_exit(simulate_path(...)) that never stores
/// the path; bit-identical for the same seed.
StoppedOutcome draw_horizontal_exit(double dt, double drift, double gamma, double t_cap, Monitoring monitoring,
                                    std::uint64_t seed);

/// tau = smallest stage whose value leaves its interval, else the final stage.
/// stage_values[t-1] holds x(t). Values after the stopping stage are never read.
StoppedOutcome group_sequential_stop(std::span<const double> stage_values, std::span<const Interval> intervals);

/// One limit-experiment draw of (tau, x(tau)) under the given drift.
/// Group-sequential and fixed-time rules are sampled exactly at their
/// observation times, which is the law of the grid path at those times.
StoppedOutcome draw_stopped_outcome(const StoppingRuleSpec& rule, double dt, double drift, Monitoring monitoring,
                                    std::uint64_t seed);

} // namespace seqinf
