#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "seqinf/batched_policy.hpp"
#include "seqinf/diffusion.hpp"
#include "seqinf/parallel.hpp"
#include "seqinf/stopping.hpp"

namespace seqinf {

enum class TableKind : std::uint32_t { stopping_time = 1, batched = 2 };

/// Everything needed to reproduce a table, stored alongside its draws.
struct TableMeta {
    TableKind kind = TableKind::stopping_time;
    std::uint64_t base_seed = 0;
    std::uint64_t rule_hash = 0;
    /// Drift of x under which the draws were generated (arm 1 / scalar, arm 0).
    std::array<double, 2> drift{0.0, 0.0};
    double dt = 0.0;
    Monitoring monitoring = Monitoring::discrete;
    /// Number of discrete stages (group-sequential T, 1 for fixed-time, 0 for
    /// continuous stopping times) or batches.
    int stages = 0;
    std::string label;
};

/// Monte Carlo draws of the sufficient statistics under one drift.
/// Immutable once built; safe to share across threads.
class NullTable {
public:
    static NullTable from_outcomes(std::vector<StoppedOutcome> outcomes, TableMeta meta);
    static NullTable from_states(std::vector<BatchedState> states, TableMeta meta);

    TableKind kind() const noexcept { return meta_.kind; }
    const TableMeta& meta() const noexcept { return meta_; }
    std::size_t size() const noexcept;
    std::span<const StoppedOutcome> outcomes() const noexcept { return outcomes_; }
    std::span<const BatchedState> states() const noexcept { return states_; }
    std::size_t censored_count() const noexcept { return censored_; }
    double censor_rate() const noexcept;

private:
    NullTable() = default;
    TableMeta meta_;
    std::vector<StoppedOutcome> outcomes_;
    std::vector<BatchedState> states_;
    std::size_t censored_ = 0;
};

struct TableOptions {
    std::size_t reps = 100000;
    double dt = 1e-4;
    /// Drift of x in x-units (mu / sigma); 0 for the reference null.
    double drift = 0.0;
    std::uint64_t base_seed = 1;
    Monitoring monitoring = Monitoring::continuous;
    Execution execution = Execution::parallel;
};

struct BatchedTableOptions {
    std::size_t reps = 100000;
    /// Per-unit-q drift mu_a / sigma_a, indexed by arm (0 control, 1 treatment).
    std::array<double, 2> drift{0.0, 0.0};
    std::uint64_t base_seed = 1;
    Execution execution = Execution::parallel;
};

/// Replication r uses seed replication_seed(base_seed, r).
NullTable build_null_table(const StoppingRuleSpec& rule, const TableOptions& options);
NullTable build_null_table(const BatchedPolicySpec& policy, const BatchedTableOptions& options);

/// Empirical p-quantile of tau over uncensored draws, lower order statistic:
/// at most floor(p R) of the R draws satisfy tau <= result. Throws
/// CalibrationError when every draw is censored or floor(p R) = 0.
double tau_quantile(const NullTable& table, double p);

/// Stage of an outcome in a design with `stages` stages: 1 for single-stage
/// (fixed-time) designs, otherwise tau.
int stage_of(const StoppedOutcome& outcome, int stages);

/// P^(tau = t) for t = 1..stages.
std::vector<double> stage_probabilities(const NullTable& table);

struct SpendingVector {
    std::vector<double> alpha;

    double total() const noexcept;
    /// Throws ConfigError unless alpha_t >= 0 and sum <= overall_alpha.
    void validate(double overall_alpha) const;
};

/// alpha_t = alpha * P^(tau = t): the conditionally level-alpha vector.
SpendingVector conditional_spending(const NullTable& table, double alpha);

enum class StageMode : std::uint32_t { always_reject = 0, one_sided = 1, two_sided = 2 };

/// One stage of a threshold table. one_sided rejects x >= upper; two_sided
/// rejects x outside [lower, upper].
struct StageThreshold {
    int stage = 1;
    StageMode mode = StageMode::one_sided;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    double p_stop = 0.0;
    double alpha_t = 0.0;
    std::size_t draws = 0;
    bool symmetric = false;
};

struct ThresholdTable {
    std::vector<StageThreshold> stages;
    double alpha = 0.0;

    /// Throws ConfigError if the stage is not present.
    const StageThreshold& at(int stage) const;
};

ThresholdTable alpha_spending_thresholds(const NullTable& table, const SpendingVector& spending);
ThresholdTable cond_unbiased_thresholds(const NullTable& table, const SpendingVector& spending);

struct CriticalValue {
    double gamma = 0.0;
    bool degenerate = false;
    std::size_t rejections = 0;
};

/// Scalar alternative mu with scale sigma: statistic is the log-likelihood
/// ratio of drift mu/sigma against the table's drift.
CriticalValue np_critical_value(const NullTable& table, double mu, double sigma, double alpha);
/// Alternative (mu1, mu0) of a batched experiment.
struct BatchedAlternative {
    double mu1 = 0.0;
    double mu0 = 0.0;
};

/// Batched alternative with per-arm scales; sigma is indexed by arm.
CriticalValue np_critical_value(const NullTable& table, BatchedAlternative mu, std::array<double, 2> sigma,
                                double alpha);

/// Discrete weight w_k on alternative k. `mu` is the scalar alternative or the
/// treatment-arm coordinate; `mu0` is used by batched tables only.
struct WeightedAlternative {
    double mu = 0.0;
    double mu0 = 0.0;
    double weight = 1.0;
};

/// log sum_k w_k exp(exponent_k), evaluated stably.
double wap_log_statistic(const StoppedOutcome& outcome, std::span<const WeightedAlternative> weights, double sigma,
                         double null_drift = 0.0);
double wap_log_statistic(const BatchedState& state, std::span<const WeightedAlternative> weights,
                         std::array<double, 2> sigma);

/// Critical value of the weighted-average-power test on the log scale:
/// reject iff wap_log_statistic >= result.
CriticalValue wap_critical_value(const NullTable& table, std::span<const WeightedAlternative> weights, double sigma,
                                 double alpha);
CriticalValue wap_critical_value(const NullTable& table, std::span<const WeightedAlternative> weights,
                                 std::array<double, 2> sigma, double alpha);

/// Fraction of table draws satisfying `reject`, with binomial SE.
MonteCarloEstimate rejection_rate(const NullTable& table, const std::function<bool(const StoppedOutcome&)>& reject);
MonteCarloEstimate rejection_rate(const NullTable& table, const std::function<bool(const BatchedState&)>& reject);

/// Sample mean of x(tau) * phi and its SE: the unbiasedness moment.
MonteCarloEstimate unbiasedness_moment(const NullTable& table,
                                       const std::function<bool(const StoppedOutcome&)>& reject);
/// Per-arm batched moments E[x_a phi], indexed by arm.
std::array<MonteCarloEstimate, 2> unbiasedness_moment(const NullTable& table,
                                                      const std::function<bool(const BatchedState&)>& reject);

struct PowerCurve {
    /// Scalar alternative, or mu1 for batched curves.
    std::vector<double> mu;
    /// mu0 for batched curves; 0 for scalar curves.
    std::vector<double> mu0;
    std::vector<double> power;
    std::vector<double> standard_error;
    /// Set where the NP statistic is constant on the null table (the null
    /// point); power is reported as alpha there.
    std::vector<bool> degenerate;
    double alpha = 0.0;
    std::size_t reps = 0;
};

/// NP power envelope: for each alternative mu, calibrate on the null table
/// (options.base_seed, drift options.drift) and evaluate on an independent
/// table drawn at drift mu / sigma.
PowerCurve power_envelope(const StoppingRuleSpec& rule, std::span<const double> alternatives, double sigma,
                          double alpha, const TableOptions& options);
PowerCurve power_envelope(const BatchedPolicySpec& policy, std::span<const BatchedAlternative> alternatives,
                          std::array<double, 2> sigma, double alpha, const BatchedTableOptions& options);

/// Power of reject-iff-tau <= F0^{-1}(alpha) (horizontal designs) at each
/// alternative, on independent tables.
PowerCurve stopping_time_power_curve(const HorizontalRule& rule, std::span<const double> alternatives, double sigma,
                                     double alpha, const TableOptions& options);

/// Seed of the independent evaluation table for alternative index k.
std::uint64_t alternative_table_seed(std::uint64_t base_seed, std::size_t k);

} // namespace seqinf
