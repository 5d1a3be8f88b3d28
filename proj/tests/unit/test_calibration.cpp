#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "seqinf/calibration.hpp"
#include "seqinf/decision.hpp"
#include "seqinf/error.hpp"
#include "seqinf/parallel.hpp"

using namespace seqinf;

namespace {

const StoppingRuleSpec fixed1{FixedTimeRule{1.0}};
const StoppingRuleSpec horizontal{HorizontalRule{0.536, 5.0}};
const StoppingRuleSpec obf{GroupSequentialRule{{{-2.797, 2.797}}, 2}};

NullTable table_of(const StoppingRuleSpec& rule, std::size_t reps, std::uint64_t seed, double drift = 0.0,
                   double dt = 1e-3)
{
    TableOptions o;
    o.reps = reps;
    o.base_seed = seed;
    o.drift = drift;
    o.dt = dt;
    return build_null_table(rule, o);
}

} // namespace

TEST_CASE("fixed-time table moments")
{
    const auto t = table_of(fixed1, 100000, 1);
    std::vector<double> x;
    for (const auto& o : t.outcomes()) {
        REQUIRE(o.tau == 1.0);
        x.push_back(o.x_at_tau);
    }
    const auto m = oracle::moments(x);
    CHECK(std::fabs(m.mean) < 4.0 * m.se);
    CHECK(std::fabs(m.var - 1.0) < 4.0 * oracle::variance_se(x));
    CHECK(t.meta().stages == 1);
}

TEST_CASE("tables are reproducible and independent of threads")
{
    TableOptions o;
    o.reps = 3000;
    o.dt = 1e-3;
    o.base_seed = 9;
    o.execution = Execution::serial;
    const auto serial = build_null_table(horizontal, o);
    o.execution = Execution::parallel;
    for (int threads : {1, 8}) {
        set_thread_count(threads);
        const auto par = build_null_table(horizontal, o);
        CHECK(std::equal(serial.outcomes().begin(), serial.outcomes().end(), par.outcomes().begin()));
    }
    BatchedTableOptions b;
    b.reps = 5000;
    b.execution = Execution::serial;
    const auto bs = build_null_table(BatchedPolicySpec{ThompsonPolicy{10}}, b);
    b.execution = Execution::parallel;
    set_thread_count(8);
    const auto bp = build_null_table(BatchedPolicySpec{ThompsonPolicy{10}}, b);
    CHECK(std::equal(bs.states().begin(), bs.states().end(), bp.states().begin()));
    set_thread_count(1);
}

TEST_CASE("tau quantile")
{
    const auto t = table_of(horizontal, 100000, 2, 0.0, 1e-4);
    const double c = tau_quantile(t, 0.05);

    // Exact quantile of the two-sided exit time, with an order-statistic SE.
    const double exact = oracle::two_sided_exit_quantile(0.05, 0.536);
    const double h = 1e-4;
    const double density =
        (oracle::two_sided_exit_cdf(exact + h, 0.536) - oracle::two_sided_exit_cdf(exact - h, 0.536)) / (2 * h);
    const double se = oracle::binomial_se(0.05, 1e5) / density;
    CHECK(std::fabs(c - exact) < 4.0 * se + 1e-4);
    CHECK(std::fabs(c / oracle::reflection_quantile(0.05, 0.536) - 1.0) < 0.10);

    CHECK(tau_quantile(t, 0.01) <= tau_quantile(t, 0.05));
    CHECK(tau_quantile(t, 0.05) <= tau_quantile(t, 0.5));

    double max_tau = 0.0;
    std::size_t at_or_below = 0;
    for (const auto& o : t.outcomes()) {
        max_tau = std::max(max_tau, o.tau);
        at_or_below += o.tau <= c;
    }
    CHECK(tau_quantile(t, 1.0 - 1e-12) == max_tau);
    // Conservative even with tied grid times.
    CHECK(at_or_below <= 5000);
    CHECK(at_or_below > 4800);

    CHECK_THROWS_AS(tau_quantile(t, 0.0), ConfigError);
    CHECK_THROWS_AS(tau_quantile(t, 1.0), ConfigError);
    const auto censored = table_of(StoppingRuleSpec{HorizontalRule{5.0, 0.01}}, 100, 3);
    CHECK(censored.censor_rate() == 1.0);
    CHECK_THROWS_AS(tau_quantile(censored, 0.05), CalibrationError);
    CHECK_THROWS_AS(tau_quantile(table_of(fixed1, 10, 1), 0.05), CalibrationError);
}

TEST_CASE("NP critical values")
{
    const auto t = table_of(fixed1, 100000, 4);
    const double mu = 2.8;
    const auto cv = np_critical_value(t, mu, 1.0, 0.05);
    CHECK_FALSE(cv.degenerate);
    CHECK(cv.rejections <= 5000);
    // LLR >= gamma iff x >= (gamma + mu^2 / 2) / mu.
    const double x_cut = (cv.gamma + 0.5 * mu * mu) / mu;
    CHECK(std::fabs(x_cut - oracle::phi_quantile(0.95)) < 0.02);

    const auto zero = np_critical_value(t, 0.0, 1.0, 0.05);
    CHECK(zero.degenerate);
    CHECK(zero.gamma == 0.0);

    const auto half = np_critical_value(t, 1.0, 1.0, 0.5);
    CHECK(std::fabs(half.gamma - (-0.5)) < 0.01);
}

TEST_CASE("alpha spending thresholds")
{
    const auto t = table_of(obf, 200000, 5);
    const auto spend = conditional_spending(t, 0.05);
    const auto probs = stage_probabilities(t);
    CHECK(spend.total() == doctest::Approx(0.05));
    const auto th = alpha_spending_thresholds(t, spend);
    REQUIRE(th.stages.size() == 2);
    for (const auto& st : th.stages) {
        CHECK(st.mode == StageMode::one_sided);
        std::size_t draws = 0;
        std::size_t rejected = 0;
        for (const auto& o : t.outcomes()) {
            if (static_cast<int>(o.tau) != st.stage) {
                continue;
            }
            ++draws;
            rejected += alpha_spending_test(o, th).reject;
        }
        // Conditional size alpha on the calibration sample, up to one draw.
        const double rate = static_cast<double>(rejected) / static_cast<double>(draws);
        CHECK(rate <= 0.05 + 1e-12);
        CHECK(rate > 0.05 - 1.0 / static_cast<double>(draws));
        CHECK(st.p_stop == doctest::Approx(probs[static_cast<std::size_t>(st.stage - 1)]));
    }

    // Fresh table check.
    const auto fresh = table_of(obf, 200000, 6);
    const double fresh_rate =
        rejection_rate(fresh, [&](const StoppedOutcome& o) { return alpha_spending_test(o, th).reject; }).mean;
    CHECK(std::fabs(fresh_rate - 0.05) < 4.0 * oracle::binomial_se(0.05, 2e5));

    const auto zero_first = alpha_spending_thresholds(t, SpendingVector{{0.0, 0.05}});
    CHECK(std::isinf(zero_first.at(1).upper));
    CHECK(zero_first.at(1).upper > 0);

    const auto always = alpha_spending_thresholds(t, SpendingVector{{0.01, 0.04}});
    CHECK(always.at(1).mode == StageMode::always_reject);
    CHECK(always.at(2).mode == StageMode::one_sided);
    CHECK_THROWS_AS(always.at(3), ConfigError);

    const auto never_one = table_of(StoppingRuleSpec{GroupSequentialRule{{{-1e9, 1e9}}, 2}}, 1000, 7);
    CHECK_THROWS_AS(alpha_spending_thresholds(never_one, SpendingVector{{0.01, 0.04}}), CalibrationError);
    CHECK_THROWS_AS(SpendingVector({{0.04, 0.04}}).validate(0.05), ConfigError);
    CHECK_THROWS_AS(SpendingVector({{-0.01, 0.04}}).validate(0.05), ConfigError);
    CHECK_THROWS_AS(alpha_spending_thresholds(table_of(horizontal, 100, 1), SpendingVector{{0.05}}), ConfigError);
}

TEST_CASE("threshold curves cross as the null drifts")
{
    const double sigma = 2.0;
    double first_gap = 0.0;
    double last_gap = 0.0;
    for (double mu_bar : {0.0, 6.0}) {
        const auto t = table_of(obf, 400000, 8, mu_bar / sigma);
        const auto th = alpha_spending_thresholds(t, conditional_spending(t, 0.05));
        const double gap = th.at(1).upper - th.at(2).upper;
        (mu_bar == 0.0 ? first_gap : last_gap) = gap;
    }
    CHECK(first_gap > 0.0);
    CHECK(last_gap < 0.0);
}

TEST_CASE("conditionally unbiased thresholds")
{
    const auto t = table_of(obf, 400000, 9);
    const auto spend = conditional_spending(t, 0.05);
    const auto th = cond_unbiased_thresholds(t, spend);
    for (const auto& st : th.stages) {
        CHECK(st.mode == StageMode::two_sided);
        CHECK(st.lower < st.upper);
        std::vector<double> xs;
        for (const auto& o : t.outcomes()) {
            if (static_cast<int>(o.tau) == st.stage) {
                xs.push_back(o.x_at_tau);
            }
        }
        const double m = static_cast<double>(xs.size());
        double rejected = 0.0;
        double moment = 0.0;
        for (double x : xs) {
            const bool r = x < st.lower || x > st.upper;
            rejected += r;
            moment += x * ((r ? 1.0 : 0.0) - 0.05);
        }
        CHECK(std::fabs(rejected / m - 0.05) <= 2.0 / std::sqrt(m));
        CHECK(std::fabs(moment / m) <= 2.0 / std::sqrt(m));
        if (st.stage == 2) {
            // Stage 2 is symmetric: U is the (1 - alpha/2) quantile of x | tau = 2.
            CHECK(st.symmetric);
            CHECK(st.lower == -st.upper);
            std::sort(xs.begin(), xs.end());
            const double q = xs[static_cast<std::size_t>(0.975 * m)];
            CHECK(std::fabs(st.upper - q) < 0.02);
        }
    }

    // Asymmetric conditional law (drifted table) goes through the solver.
    const auto d = table_of(obf, 400000, 10, 0.8);
    const auto thd = cond_unbiased_thresholds(d, conditional_spending(d, 0.05));
    for (const auto& st : thd.stages) {
        std::vector<double> xs;
        for (const auto& o : d.outcomes()) {
            if (static_cast<int>(o.tau) == st.stage) {
                xs.push_back(o.x_at_tau);
            }
        }
        const double m = static_cast<double>(xs.size());
        const double mean = oracle::moments(xs).mean;
        double rejected = 0.0;
        double moment = 0.0;
        for (double x : xs) {
            const bool r = x < st.lower || x > st.upper;
            rejected += r;
            moment += (x - mean) * (r ? 1.0 : 0.0);
        }
        CHECK(std::fabs(rejected / m - 0.05) <= 2.0 / std::sqrt(m));
        CHECK(std::fabs(moment / m) <= 2.0 / std::sqrt(m));
    }

    const auto empty = cond_unbiased_thresholds(t, SpendingVector{{0.0, 0.05}});
    CHECK(std::isinf(empty.at(1).upper));
    CHECK(std::isinf(empty.at(1).lower));
}

TEST_CASE("weighted average power")
{
    const auto t = table_of(fixed1, 100000, 11);
    const std::vector<WeightedAlternative> point{{1.5, 0.0, 1.0}};
    const auto wap = wap_critical_value(t, point, 1.0, 0.05);
    const auto np = np_critical_value(t, 1.5, 1.0, 0.05);
    for (const auto& o : t.outcomes()) {
        REQUIRE(wap_test(o, point, 1.0, wap.gamma).reject == np_limit_test(o, 1.5, 1.0, np.gamma).reject);
    }

    const std::vector<WeightedAlternative> sym{{1.0, 0.0, 0.5}, {-1.0, 0.0, 0.5}};
    const auto ws = wap_critical_value(t, sym, 1.0, 0.05);
    for (double x : {0.3, 1.2, 1.9, 2.1, 2.5, 3.0}) {
        const StoppedOutcome up{1.0, x, 1, false};
        const StoppedOutcome down{1.0, -x, -1, false};
        CHECK(wap_test(up, sym, 1.0, ws.gamma).reject == wap_test(down, sym, 1.0, ws.gamma).reject);
    }

    const std::vector<WeightedAlternative> mix{{1.0, 0.0, 0.5}, {2.0, 0.0, 0.5}};
    const auto wm = wap_critical_value(t, mix, 1.0, 0.05);
    const auto fresh = table_of(fixed1, 100000, 12);
    const double rate =
        rejection_rate(fresh, [&](const StoppedOutcome& o) { return wap_test(o, mix, 1.0, wm.gamma).reject; }).mean;
    CHECK(std::fabs(rate - 0.05) < 0.005);

    // Log-domain statistic against direct evaluation.
    const std::vector<WeightedAlternative> big{{5.0, 0.0, 0.3}, {7.0, 0.0, 0.7}};
    for (double x : {0.0, 2.0, 4.0, 5.0}) {
        const StoppedOutcome o{1.0, x, 1, false};
        double direct = 0.0;
        for (const auto& w : big) {
            direct += w.weight * std::exp(w.mu * x - 0.5 * w.mu * w.mu);
        }
        CHECK(wap_log_statistic(o, big, 1.0) == doctest::Approx(std::log(direct)).epsilon(1e-12));
    }
}

TEST_CASE("power envelope")
{
    TableOptions o;
    o.reps = 100000;
    o.base_seed = 13;
    const std::vector<double> grid{0.0, 1.0, 2.0, 2.8};
    const auto curve = power_envelope(fixed1, grid, 1.0, 0.05, o);
    CHECK(curve.degenerate[0]);
    CHECK(curve.power[0] == 0.05);
    CHECK(std::fabs(curve.power[3] - oracle::phi_cdf(2.8 - oracle::phi_quantile(0.95))) < 0.01);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        CHECK(curve.power[k] >= curve.power[k - 1] - 2.0 * curve.standard_error[k]);
        CHECK(std::fabs(curve.power[k] - oracle::phi_cdf(grid[k] - oracle::phi_quantile(0.95))) <
              4.0 * curve.standard_error[k] + 0.002);
    }

    // Envelope dominance: the stopping-time test never beats the NP envelope.
    TableOptions h;
    h.reps = 50000;
    h.dt = 1e-3;
    h.base_seed = 14;
    const std::vector<double> mus{1.0, 2.0};
    const auto np = power_envelope(horizontal, mus, 1.0, 0.05, h);
    const auto st = stopping_time_power_curve(std::get<HorizontalRule>(horizontal), mus, 1.0, 0.05, h);
    for (std::size_t k = 0; k < mus.size(); ++k) {
        CHECK(st.power[k] <= np.power[k] + 2.0 * std::hypot(st.standard_error[k], np.standard_error[k]));
    }

    BatchedTableOptions b;
    b.reps = 100000;
    b.base_seed = 15;
    const std::vector<BatchedAlternative> asym{{0.6, 0.0}, {-0.6, 0.0}, {0.0, 0.0}};
    const auto env = power_envelope(BatchedPolicySpec{ThompsonPolicy{10}}, asym, {1.0, 1.0}, 0.05, b);
    CHECK(env.power[0] > env.power[1] + 2.0 * std::hypot(env.standard_error[0], env.standard_error[1]));
    CHECK(env.degenerate[2]);
    CHECK(env.power[2] == 0.05);
}

TEST_CASE("unbiasedness moments")
{
    const auto t = table_of(horizontal, 100000, 16);
    const double c = tau_quantile(t, 0.05);
    const auto m = unbiasedness_moment(t, [c](const StoppedOutcome& o) { return stopping_time_test(o, c).reject; });
    CHECK(std::fabs(m.mean) <= 4.0 * m.standard_error);

    // A symmetric two-sided test in a fixed-allocation batched experiment.
    BatchedTableOptions b;
    b.reps = 100000;
    const BatchedPolicySpec policy{FixedAllocationPolicy{2, 0.5, 0.5}};
    const auto bt = build_null_table(policy, b);
    auto reject = [](const BatchedState& s) { return std::fabs(s.x[1] - s.x[0]) >= 1.96 * std::sqrt(2.0); };
    const auto bm = unbiasedness_moment(bt, std::function<bool(const BatchedState&)>(reject));
    for (const auto& e : bm) {
        CHECK(std::fabs(e.mean) <= 4.0 * e.standard_error);
    }
    CHECK(rejection_rate(bt, std::function<bool(const BatchedState&)>(reject)).mean ==
          doctest::Approx(0.05).epsilon(0.1));
}

TEST_CASE("table kind checks")
{
    BatchedTableOptions b;
    b.reps = 100;
    const auto bt = build_null_table(BatchedPolicySpec{ThompsonPolicy{2}}, b);
    CHECK_THROWS_AS(tau_quantile(bt, 0.05), ConfigError);
    CHECK_THROWS_AS(np_critical_value(bt, 1.0, 1.0, 0.05), ConfigError);
    CHECK_THROWS_AS(np_critical_value(table_of(fixed1, 100, 1), 1.0, 1.0, 1.5), ConfigError);
}
