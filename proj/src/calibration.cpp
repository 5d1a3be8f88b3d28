#include "seqinf/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqinf/error.hpp"
#include "seqinf/rng.hpp"

namespace seqinf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// floor(p * m) guarded against p * m landing a hair below an integer.
std::size_t conservative_count(double p, std::size_t m)
{
    const double raw = p * static_cast<double>(m);
    return static_cast<std::size_t>(std::floor(raw + 1e-9 * std::max(1.0, raw)));
}

// Threshold with at most k values >= it (values sorted ascending): the k-th
// largest value, moved up past any ties with the (k+1)-th.
double upper_tail_threshold(std::span<const double> sorted, std::size_t k)
{
    if (k == 0) {
        return kInf;
    }
    const std::size_t n = sorted.size();
    const double v = sorted[n - k];
    if (k < n && sorted[n - k - 1] == v) {
        const auto above = std::upper_bound(sorted.begin(), sorted.end(), v);
        return above == sorted.end() ? kInf : *above;
    }
    return v;
}

MonteCarloEstimate binomial_estimate(std::size_t hits, std::size_t total)
{
    const double p = static_cast<double>(hits) / static_cast<double>(total);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(total))};
}

MonteCarloEstimate mean_estimate(std::span<const double> values)
{
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double var = values.size() > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
}

void require_kind(const NullTable& table, TableKind kind, const char* what)
{
    if (table.kind() != kind) {
        throw ConfigError(std::string(what) + ": wrong table kind");
    }
}

// Critical value from the sorted statistic distribution: the K-th largest
// value with K = floor(alpha R).
CriticalValue critical_from(std::vector<double> stats, double alpha)
{
    std::sort(stats.begin(), stats.end());
    CriticalValue cv;
    if (stats.front() == stats.back()) {
        cv.gamma = stats.front();
        cv.degenerate = true;
        cv.rejections = stats.size();
        return cv;
    }
    const std::size_t k = conservative_count(alpha, stats.size());
    cv.gamma = upper_tail_threshold(stats, k);
    cv.rejections = static_cast<std::size_t>(stats.end() - std::lower_bound(stats.begin(), stats.end(), cv.gamma));
    return cv;
}

// Conditional samples x(tau) | tau = t, each sorted ascending.
std::vector<std::vector<double>> stage_samples(const NullTable& table)
{
    require_kind(table, TableKind::stopping_time, "stage thresholds");
    if (table.meta().stages < 1) {
        throw ConfigError("stage thresholds require a discrete-stage stopping rule");
    }
    std::vector<std::vector<double>> samples(static_cast<std::size_t>(table.meta().stages));
    for (const auto& o : table.outcomes()) {
        const int t = stage_of(o, table.meta().stages);
        if (t < 1 || t > table.meta().stages) {
            throw CalibrationError("stage thresholds: outcome stage out of range");
        }
        samples[static_cast<std::size_t>(t - 1)].push_back(o.x_at_tau);
    }
    for (auto& s : samples) {
        std::sort(s.begin(), s.end());
    }
    return samples;
}

// Shared preamble of the two threshold builders. Returns true when the
// stage is fully determined (always_reject or empty rejection region).
bool stage_preamble(StageThreshold& st, std::size_t m, std::size_t total, double alpha_t)
{
    st.draws = m;
    st.alpha_t = alpha_t;
    st.p_stop = static_cast<double>(m) / static_cast<double>(total);
    if (m == 0 && alpha_t > 0.0) {
        throw CalibrationError("stage " + std::to_string(st.stage) + " has no draws but alpha_t = " +
                               std::to_string(alpha_t) + " > 0");
    }
    if (st.p_stop <= alpha_t) {
        st.mode = StageMode::always_reject;
        return true;
    }
    return false;
}

} // namespace

NullTable NullTable::from_outcomes(std::vector<StoppedOutcome> outcomes, TableMeta meta)
{
    if (outcomes.empty()) {
        throw CalibrationError("null table needs at least one draw");
    }
    NullTable t;
    meta.kind = TableKind::stopping_time;
    t.meta_ = std::move(meta);
    t.outcomes_ = std::move(outcomes);
    t.censored_ = static_cast<std::size_t>(
        std::count_if(t.outcomes_.begin(), t.outcomes_.end(), [](const StoppedOutcome& o) { return o.censored; }));
    return t;
}

NullTable NullTable::from_states(std::vector<BatchedState> states, TableMeta meta)
{
    if (states.empty()) {
        throw CalibrationError("null table needs at least one draw");
    }
    NullTable t;
    meta.kind = TableKind::batched;
    t.meta_ = std::move(meta);
    t.states_ = std::move(states);
    return t;
}

std::size_t NullTable::size() const noexcept
{
    return meta_.kind == TableKind::stopping_time ? outcomes_.size() : states_.size();
}

double NullTable::censor_rate() const noexcept
{
    return static_cast<double>(censored_) / static_cast<double>(size());
}

NullTable build_null_table(const StoppingRuleSpec& rule, const TableOptions& options)
{
    validate(rule);
    if (options.reps < 1) {
        throw ConfigError("null table: reps must be >= 1");
    }
    if (std::holds_alternative<HorizontalRule>(rule)) {
        const auto& h = std::get<HorizontalRule>(rule);
        // Validates dt and the horizon.
        (void)TimeGrid(h.t_cap, options.dt);
    }
    std::vector<StoppedOutcome> outcomes(options.reps);
    for_each_index(options.reps, options.execution, [&](std::size_t r) {
        outcomes[r] = draw_stopped_outcome(rule, options.dt, options.drift, options.monitoring,
                                           replication_seed(options.base_seed, r));
    });

    TableMeta meta;
    meta.base_seed = options.base_seed;
    meta.rule_hash = rule_hash(rule);
    meta.drift = {options.drift, 0.0};
    meta.dt = options.dt;
    meta.monitoring = options.monitoring;
    meta.label = describe(rule);
    if (const auto* gs = std::get_if<GroupSequentialRule>(&rule)) {
        meta.stages = gs->stages;
    } else if (std::holds_alternative<FixedTimeRule>(rule)) {
        meta.stages = 1;
    }
    return NullTable::from_outcomes(std::move(outcomes), std::move(meta));
}

NullTable build_null_table(const BatchedPolicySpec& policy, const BatchedTableOptions& options)
{
    validate(policy);
    if (options.reps < 1) {
        throw ConfigError("null table: reps must be >= 1");
    }
    std::vector<BatchedState> states(options.reps);
    for_each_index(options.reps, options.execution, [&](std::size_t r) {
        states[r] = draw_batched_limit(policy, options.drift, replication_seed(options.base_seed, r));
    });
    TableMeta meta;
    meta.base_seed = options.base_seed;
    meta.rule_hash = policy_hash(policy);
    meta.drift = options.drift;
    meta.stages = batch_count(policy);
    meta.label = describe(policy);
    return NullTable::from_states(std::move(states), std::move(meta));
}

double tau_quantile(const NullTable& table, double p)
{
    require_kind(table, TableKind::stopping_time, "tau_quantile");
    if (!(p > 0.0 && p < 1.0)) {
        throw ConfigError("tau_quantile: p must lie in (0, 1)");
    }
    std::vector<double> taus;
    taus.reserve(table.size());
    for (const auto& o : table.outcomes()) {
        if (!o.censored) {
            taus.push_back(o.tau);
        }
    }
    if (taus.empty()) {
        throw CalibrationError("tau_quantile: every draw is censored");
    }
    const std::size_t k = std::min(conservative_count(p, table.size()), taus.size());
    if (k == 0) {
        throw CalibrationError("tau_quantile: table too small for p = " + std::to_string(p));
    }
    std::sort(taus.begin(), taus.end());
    if (k == taus.size()) {
        return taus.back();
    }
    // tau lives on a grid, so ties are common: step below the (k+1)-th value
    // so that no more than k draws satisfy tau <= result.
    const auto first_tied = std::lower_bound(taus.begin(), taus.end(), taus[k]);
    if (first_tied == taus.begin()) {
        throw CalibrationError("tau_quantile: too many tied draws at the smallest tau");
    }
    return *(first_tied - 1);
}

int stage_of(const StoppedOutcome& outcome, int stages)
{
    return stages == 1 ? 1 : static_cast<int>(std::lround(outcome.tau));
}

std::vector<double> stage_probabilities(const NullTable& table)
{
    const auto samples = stage_samples(table);
    std::vector<double> p;
    p.reserve(samples.size());
    for (const auto& s : samples) {
        p.push_back(static_cast<double>(s.size()) / static_cast<double>(table.size()));
    }
    return p;
}

double SpendingVector::total() const noexcept
{
    double s = 0.0;
    for (double a : alpha) {
        s += a;
    }
    return s;
}

void SpendingVector::validate(double overall_alpha) const
{
    for (double a : alpha) {
        if (!(a >= 0.0)) {
            throw ConfigError("spending vector: entries must be non-negative");
        }
    }
    if (total() > overall_alpha * (1.0 + 1e-12)) {
        throw ConfigError("spending vector: entries sum to more than alpha");
    }
}

SpendingVector conditional_spending(const NullTable& table, double alpha)
{
    check_alpha(alpha);
    SpendingVector s;
    for (double p : stage_probabilities(table)) {
        s.alpha.push_back(alpha * p);
    }
    return s;
}

const StageThreshold& ThresholdTable::at(int stage) const
{
    for (const auto& st : stages) {
        if (st.stage == stage) {
            return st;
        }
    }
    throw ConfigError("threshold table has no stage " + std::to_string(stage));
}

ThresholdTable alpha_spending_thresholds(const NullTable& table, const SpendingVector& spending)
{
    const auto samples = stage_samples(table);
    if (spending.alpha.size() != samples.size()) {
        throw ConfigError("spending vector length does not match the number of stages");
    }
    ThresholdTable out;
    out.alpha = spending.total();
    for (std::size_t t = 0; t < samples.size(); ++t) {
        StageThreshold st;
        st.stage = static_cast<int>(t + 1);
        st.mode = StageMode::one_sided;
        const auto& s = samples[t];
        if (!stage_preamble(st, s.size(), table.size(), spending.alpha[t]) && spending.alpha[t] > 0.0) {
            const std::size_t k = conservative_count(spending.alpha[t] / st.p_stop, s.size());
            st.upper = upper_tail_threshold(s, k);
        }
        out.stages.push_back(st);
    }
    return out;
}

ThresholdTable cond_unbiased_thresholds(const NullTable& table, const SpendingVector& spending)
{
    const auto samples = stage_samples(table);
    if (spending.alpha.size() != samples.size()) {
        throw ConfigError("spending vector length does not match the number of stages");
    }
    ThresholdTable out;
    out.alpha = spending.total();
    for (std::size_t t = 0; t < samples.size(); ++t) {
        StageThreshold st;
        st.stage = static_cast<int>(t + 1);
        st.mode = StageMode::two_sided;
        const auto& s = samples[t];
        const std::size_t m = s.size();
        if (stage_preamble(st, m, table.size(), spending.alpha[t]) || spending.alpha[t] == 0.0) {
            out.stages.push_back(st);
            continue;
        }
        const double size_target = spending.alpha[t] / st.p_stop;
        const std::size_t k = conservative_count(size_target, m);
        if (k == 0) {
            out.stages.push_back(st);
            continue;
        }

        const auto moments = mean_estimate(s);
        std::size_t positive = 0;
        std::size_t negative = 0;
        for (double v : s) {
            positive += v > 0.0;
            negative += v < 0.0;
        }
        const double md = static_cast<double>(m);
        const double sign_balance = (static_cast<double>(positive) - static_cast<double>(negative)) / md;
        const bool symmetric =
            std::fabs(moments.mean) <= 2.0 * moments.standard_error && std::fabs(sign_balance) <= 2.0 / std::sqrt(md);

        if (symmetric) {
            std::vector<double> magnitude(s.size());
            std::transform(s.begin(), s.end(), magnitude.begin(), [](double v) { return std::fabs(v); });
            std::sort(magnitude.begin(), magnitude.end());
            st.upper = k < m ? magnitude[m - k - 1] : -kInf;
            st.lower = -st.upper;
            st.symmetric = true;
            out.stages.push_back(st);
            continue;
        }

        // Rejecting the k_u largest and k - k_u smallest values meets the size
        // equation exactly on the sample. The unbiasedness moment
        //   g(k_u) = sum_rejected x / m - (k / m) mean(x)
        // is nondecreasing in k_u, so bisect on k_u for its sign change.
        std::vector<double> prefix(m + 1, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            prefix[i + 1] = prefix[i] + s[i];
        }
        const double target = static_cast<double>(k) / md * moments.mean;
        auto moment = [&](std::size_t k_upper) {
            const std::size_t k_lower = k - k_upper;
            const double rejected = prefix[k_lower] + (prefix[m] - prefix[m - k_upper]);
            return rejected / md - target;
        };
        if (moment(0) > 0.0 || moment(k) < 0.0) {
            throw CalibrationError("conditionally unbiased thresholds: moment equation not bracketed at stage " +
                                   std::to_string(st.stage) + " (g(0)=" + std::to_string(moment(0)) +
                                   ", g(k)=" + std::to_string(moment(k)) + ")");
        }
        std::size_t lo = 0;
        std::size_t hi = k;
        while (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo) / 2;
            (moment(mid) < 0.0 ? lo : hi) = mid;
        }
        const std::size_t k_upper = std::fabs(moment(lo)) <= std::fabs(moment(hi)) ? lo : hi;
        const std::size_t k_lower = k - k_upper;
        st.lower = k_lower > 0 ? s[k_lower] : -kInf;
        st.upper = k_upper > 0 ? s[m - k_upper - 1] : kInf;
        out.stages.push_back(st);
    }
    return out;
}

CriticalValue np_critical_value(const NullTable& table, double mu, double sigma, double alpha)
{
    require_kind(table, TableKind::stopping_time, "np_critical_value");
    check_alpha(alpha);
    if (!(sigma > 0.0)) {
        throw DomainError("np_critical_value: sigma must be positive");
    }
    const double drift = mu / sigma;
    const double null_drift = table.meta().drift[0];
    std::vector<double> stats;
    stats.reserve(table.size());
    for (const auto& o : table.outcomes()) {
        stats.push_back(log_likelihood_ratio(o.x_at_tau, o.tau, drift, null_drift));
    }
    return critical_from(std::move(stats), alpha);
}

CriticalValue np_critical_value(const NullTable& table, BatchedAlternative mu, std::array<double, 2> sigma,
                                double alpha)
{
    require_kind(table, TableKind::batched, "np_critical_value");
    check_alpha(alpha);
    const auto& d0 = table.meta().drift;
    std::vector<double> stats;
    stats.reserve(table.size());
    for (const auto& s : table.states()) {
        stats.push_back(batched_girsanov_exponent(s, mu.mu1, mu.mu0, sigma[1], sigma[0]) -
                        batched_girsanov_exponent(s, d0[1] * sigma[1], d0[0] * sigma[0], sigma[1], sigma[0]));
    }
    return critical_from(std::move(stats), alpha);
}

namespace {

double log_sum_exp(std::span<const double> terms)
{
    double peak = -kInf;
    for (double t : terms) {
        peak = std::max(peak, t);
    }
    if (!std::isfinite(peak)) {
        return peak;
    }
    double sum = 0.0;
    for (double t : terms) {
        sum += std::exp(t - peak);
    }
    return peak + std::log(sum);
}

void check_weights(std::span<const WeightedAlternative> weights)
{
    if (weights.empty()) {
        throw ConfigError("weighted average power: no alternatives");
    }
    double total = 0.0;
    for (const auto& w : weights) {
        if (!(w.weight >= 0.0)) {
            throw ConfigError("weighted average power: weights must be non-negative");
        }
        total += w.weight;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
        throw ConfigError("weighted average power: weights must sum to 1");
    }
}

} // namespace

double wap_log_statistic(const StoppedOutcome& outcome, std::span<const WeightedAlternative> weights, double sigma,
                         double null_drift)
{
    if (!(sigma > 0.0)) {
        throw DomainError("wap statistic: sigma must be positive");
    }
    std::vector<double> terms;
    terms.reserve(weights.size());
    for (const auto& w : weights) {
        if (w.weight > 0.0) {
            terms.push_back(std::log(w.weight) +
                            log_likelihood_ratio(outcome.x_at_tau, outcome.tau, w.mu / sigma, null_drift));
        }
    }
    return log_sum_exp(terms);
}

double wap_log_statistic(const BatchedState& state, std::span<const WeightedAlternative> weights,
                         std::array<double, 2> sigma)
{
    std::vector<double> terms;
    terms.reserve(weights.size());
    for (const auto& w : weights) {
        if (w.weight > 0.0) {
            terms.push_back(std::log(w.weight) +
                            batched_girsanov_exponent(state, w.mu, w.mu0, sigma[1], sigma[0]));
        }
    }
    return log_sum_exp(terms);
}

CriticalValue wap_critical_value(const NullTable& table, std::span<const WeightedAlternative> weights, double sigma,
                                 double alpha)
{
    require_kind(table, TableKind::stopping_time, "wap_critical_value");
    check_alpha(alpha);
    check_weights(weights);
    std::vector<double> stats;
    stats.reserve(table.size());
    for (const auto& o : table.outcomes()) {
        stats.push_back(wap_log_statistic(o, weights, sigma, table.meta().drift[0]));
    }
    return critical_from(std::move(stats), alpha);
}

CriticalValue wap_critical_value(const NullTable& table, std::span<const WeightedAlternative> weights,
                                 std::array<double, 2> sigma, double alpha)
{
    require_kind(table, TableKind::batched, "wap_critical_value");
    check_alpha(alpha);
    check_weights(weights);
    std::vector<double> stats;
    stats.reserve(table.size());
    for (const auto& s : table.states()) {
        stats.push_back(wap_log_statistic(s, weights, sigma));
    }
    return critical_from(std::move(stats), alpha);
}

MonteCarloEstimate rejection_rate(const NullTable& table, const std::function<bool(const StoppedOutcome&)>& reject)
{
    require_kind(table, TableKind::stopping_time, "rejection_rate");
    std::size_t hits = 0;
    for (const auto& o : table.outcomes()) {
        hits += reject(o);
    }
    return binomial_estimate(hits, table.size());
}

MonteCarloEstimate rejection_rate(const NullTable& table, const std::function<bool(const BatchedState&)>& reject)
{
    require_kind(table, TableKind::batched, "rejection_rate");
    std::size_t hits = 0;
    for (const auto& s : table.states()) {
        hits += reject(s);
    }
    return binomial_estimate(hits, table.size());
}

MonteCarloEstimate unbiasedness_moment(const NullTable& table,
                                       const std::function<bool(const StoppedOutcome&)>& reject)
{
    require_kind(table, TableKind::stopping_time, "unbiasedness_moment");
    std::vector<double> values;
    values.reserve(table.size());
    for (const auto& o : table.outcomes()) {
        values.push_back(reject(o) ? o.x_at_tau : 0.0);
    }
    return mean_estimate(values);
}

std::array<MonteCarloEstimate, 2> unbiasedness_moment(const NullTable& table,
                                                      const std::function<bool(const BatchedState&)>& reject)
{
    require_kind(table, TableKind::batched, "unbiasedness_moment");
    std::array<std::vector<double>, 2> values;
    for (const auto& s : table.states()) {
        const bool r = reject(s);
        for (int a = 0; a < 2; ++a) {
            values[a].push_back(r ? s.x[a] : 0.0);
        }
    }
    return {mean_estimate(values[0]), mean_estimate(values[1])};
}

std::uint64_t alternative_table_seed(std::uint64_t base_seed, std::size_t k)
{
    return derive_seed(base_seed, 1000 + k);
}

PowerCurve power_envelope(const StoppingRuleSpec& rule, std::span<const double> alternatives, double sigma,
                          double alpha, const TableOptions& options)
{
    check_alpha(alpha);
    if (alternatives.empty()) {
        throw ConfigError("power_envelope: empty alternative grid");
    }
    const NullTable null_table = build_null_table(rule, options);
    PowerCurve curve;
    curve.alpha = alpha;
    curve.reps = options.reps;
    for (std::size_t k = 0; k < alternatives.size(); ++k) {
        const double mu = alternatives[k];
        const CriticalValue cv = np_critical_value(null_table, mu, sigma, alpha);
        curve.mu.push_back(mu);
        curve.mu0.push_back(0.0);
        if (cv.degenerate) {
            curve.power.push_back(alpha);
            curve.standard_error.push_back(0.0);
            curve.degenerate.push_back(true);
            continue;
        }
        TableOptions alt = options;
        alt.drift = mu / sigma;
        alt.base_seed = alternative_table_seed(options.base_seed, k);
        const NullTable alt_table = build_null_table(rule, alt);
        const double drift = mu / sigma;
        const double null_drift = options.drift;
        const auto rate = rejection_rate(alt_table, [&](const StoppedOutcome& o) {
            return log_likelihood_ratio(o.x_at_tau, o.tau, drift, null_drift) >= cv.gamma;
        });
        curve.power.push_back(rate.mean);
        curve.standard_error.push_back(rate.standard_error);
        curve.degenerate.push_back(false);
    }
    return curve;
}

PowerCurve power_envelope(const BatchedPolicySpec& policy, std::span<const BatchedAlternative> alternatives,
                          std::array<double, 2> sigma, double alpha, const BatchedTableOptions& options)
{
    check_alpha(alpha);
    if (alternatives.empty()) {
        throw ConfigError("power_envelope: empty alternative grid");
    }
    const NullTable null_table = build_null_table(policy, options);
    const auto& d0 = options.drift;
    PowerCurve curve;
    curve.alpha = alpha;
    curve.reps = options.reps;
    for (std::size_t k = 0; k < alternatives.size(); ++k) {
        const auto mu = alternatives[k];
        const CriticalValue cv = np_critical_value(null_table, mu, sigma, alpha);
        curve.mu.push_back(mu.mu1);
        curve.mu0.push_back(mu.mu0);
        if (cv.degenerate) {
            curve.power.push_back(alpha);
            curve.standard_error.push_back(0.0);
            curve.degenerate.push_back(true);
            continue;
        }
        BatchedTableOptions alt = options;
        alt.drift = {mu.mu0 / sigma[0], mu.mu1 / sigma[1]};
        alt.base_seed = alternative_table_seed(options.base_seed, k);
        const NullTable alt_table = build_null_table(policy, alt);
        const auto rate = rejection_rate(alt_table, [&](const BatchedState& s) {
            const double stat = batched_girsanov_exponent(s, mu.mu1, mu.mu0, sigma[1], sigma[0]) -
                                batched_girsanov_exponent(s, d0[1] * sigma[1], d0[0] * sigma[0], sigma[1], sigma[0]);
            return stat >= cv.gamma;
        });
        curve.power.push_back(rate.mean);
        curve.standard_error.push_back(rate.standard_error);
        curve.degenerate.push_back(false);
    }
    return curve;
}

PowerCurve stopping_time_power_curve(const HorizontalRule& rule, std::span<const double> alternatives, double sigma,
                                     double alpha, const TableOptions& options)
{
    check_alpha(alpha);
    if (!(sigma > 0.0)) {
        throw DomainError("stopping_time_power_curve: sigma must be positive");
    }
    const NullTable null_table = build_null_table(rule, options);
    const double cutoff = tau_quantile(null_table, alpha);
    PowerCurve curve;
    curve.alpha = alpha;
    curve.reps = options.reps;
    for (std::size_t k = 0; k < alternatives.size(); ++k) {
        TableOptions alt = options;
        alt.drift = alternatives[k] / sigma;
        alt.base_seed = alternative_table_seed(options.base_seed, k);
        const NullTable alt_table = build_null_table(rule, alt);
        const auto rate =
            rejection_rate(alt_table, [cutoff](const StoppedOutcome& o) { return !o.censored && o.tau <= cutoff; });
        curve.mu.push_back(alternatives[k]);
        curve.mu0.push_back(0.0);
        curve.power.push_back(rate.mean);
        curve.standard_error.push_back(rate.standard_error);
        curve.degenerate.push_back(false);
    }
    return curve;
}

} // namespace seqinf
