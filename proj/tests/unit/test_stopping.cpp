#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "seqinf/calibration.hpp"
#include "seqinf/error.hpp"
#include "seqinf/rng.hpp"
#include "seqinf/stopping.hpp"

using namespace seqinf;

namespace {

DiffusionPath ramp(double dt, std::size_t steps, double slope)
{
    DiffusionPath p{TimeGrid(dt * static_cast<double>(steps), dt), {}, 0.0, 0};
    for (std::size_t k = 0; k <= steps; ++k) {
        p.values.push_back(slope * static_cast<double>(k) * dt);
    }
    return p;
}

} // namespace

TEST_CASE("first exit on a hand-made path")
{
    // 0.1 per step: first |x| >= 0.536 at step 6 (value 0.6).
    const auto p = ramp(0.01, 100, 10.0);
    const auto o = first_exit(p, 0.536, 1.0);
    CHECK(o.tau == doctest::Approx(0.06));
    CHECK(o.x_at_tau == doctest::Approx(0.6));
    CHECK(o.delta == 1);
    CHECK_FALSE(o.censored);

    auto down = p;
    for (auto& v : down.values) {
        v = -v;
    }
    CHECK(first_exit(down, 0.536, 1.0).delta == -1);

    const auto flat = ramp(0.01, 100, 0.1);
    const auto c = first_exit(flat, 0.536, 1.0);
    CHECK(c.censored);
    CHECK(c.delta == 0);
    CHECK(c.tau == doctest::Approx(1.0));

    CHECK_THROWS_AS(first_exit(p, 0.536, 2.0), ConfigError);
    CHECK_THROWS_AS(first_exit(p, 0.0, 1.0), ConfigError);
}

TEST_CASE("closed boundary")
{
    DiffusionPath p{TimeGrid(0.03, 0.01), {0.0, 0.2, 0.5, 0.4}, 0.0, 0};
    CHECK(first_exit(p, 0.5, 0.03).tau == doctest::Approx(0.02));
}

TEST_CASE("streaming exit is bit-identical to the stored path")
{
    for (const auto mon : {Monitoring::discrete, Monitoring::continuous}) {
        for (std::uint64_t r = 0; r < 200; ++r) {
            const std::uint64_t seed = replication_seed(3, r);
            const double drift = r % 2 ? 0.0 : 1.3;
            const auto path = simulate_path(TimeGrid(5.0, 1e-3), drift, seed);
            const auto a = first_exit(path, 0.536, 5.0, mon);
            const auto b = draw_horizontal_exit(1e-3, drift, 0.536, 5.0, mon, seed);
            REQUIRE(a == b);
        }
    }
}

TEST_CASE("mean exit time equals gamma squared")
{
    const double g = 0.536;
    TableOptions o;
    o.reps = 100000;
    o.dt = 1e-3;
    o.base_seed = 1001;
    const auto table = build_null_table(StoppingRuleSpec{HorizontalRule{g, 5.0}}, o);
    CHECK(table.censored_count() == 0);
    std::vector<double> tau;
    std::vector<double> delta;
    for (const auto& out : table.outcomes()) {
        tau.push_back(out.tau);
        delta.push_back(out.delta);
        REQUIRE(std::fabs(out.x_at_tau) >= g);
        REQUIRE(out.delta == (out.x_at_tau > 0 ? 1 : -1));
    }
    const auto m = oracle::moments(tau);
    CHECK(std::fabs(m.mean - g * g) < 4.0 * m.se);

    // Sign is fair and independent of tau.
    const auto d = oracle::moments(delta);
    CHECK(std::fabs(d.mean) < 4.0 * d.se);
    double cov = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        cov += (tau[i] - m.mean) * (delta[i] - d.mean);
    }
    cov /= static_cast<double>(tau.size() - 1);
    const double corr = cov / std::sqrt(m.var * d.var);
    CHECK(std::fabs(corr) < 4.0 / std::sqrt(static_cast<double>(tau.size())));
}

TEST_CASE("continuous monitoring matches the exact exit distribution")
{
    const double g = 0.536;
    TableOptions o;
    o.reps = 100000;
    o.dt = 1e-3;
    o.base_seed = 2002;
    const auto table = build_null_table(StoppingRuleSpec{HorizontalRule{g, 5.0}}, o);
    for (double t : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        const double p = oracle::two_sided_exit_cdf(t, g);
        const double hat =
            rejection_rate(table, [t](const StoppedOutcome& out) { return !out.censored && out.tau <= t; }).mean;
        CHECK(std::fabs(hat - p) < 4.0 * oracle::binomial_se(p, 1e5) + 0.5e-3);
    }
}

TEST_CASE("grid scan overshoots by the expected amount")
{
    // Discrete monitoring exits at |x| ~ gamma + 0.5826 sqrt(dt) on average.
    const double g = 0.536;
    const double dt = 1e-3;
    TableOptions o;
    o.reps = 100000;
    o.dt = dt;
    o.monitoring = Monitoring::discrete;
    o.base_seed = 3003;
    const auto table = build_null_table(StoppingRuleSpec{HorizontalRule{g, 5.0}}, o);
    std::vector<double> tau;
    for (const auto& out : table.outcomes()) {
        tau.push_back(out.tau);
    }
    const auto m = oracle::moments(tau);
    const double shifted = g + 0.5826 * std::sqrt(dt);
    CHECK(std::fabs(m.mean - shifted * shifted) < 4.0 * m.se + 1e-3);
    CHECK(m.mean > g * g + 4.0 * m.se);
}

TEST_CASE("censoring is rare at the default cap")
{
    TableOptions o;
    o.reps = 20000;
    o.dt = 1e-3;
    const auto table = build_null_table(StoppingRuleSpec{HorizontalRule{}}, o);
    CHECK(table.censor_rate() < 1e-3);
}

TEST_CASE("group sequential stop")
{
    const std::vector<Interval> iv{{-2.797, 2.797}};
    std::vector<double> a{3.0, 0.0};
    auto o = group_sequential_stop(a, iv);
    CHECK(o.tau == 1.0);
    CHECK(o.x_at_tau == 3.0);
    std::vector<double> b{0.0, 1.3};
    o = group_sequential_stop(b, iv);
    CHECK(o.tau == 2.0);
    CHECK(o.x_at_tau == 1.3);
    std::vector<double> c{3.0, 99.0};
    CHECK(group_sequential_stop(c, iv) == group_sequential_stop(a, iv));
    std::vector<double> wrong{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(group_sequential_stop(wrong, iv), ConfigError);

    const std::vector<Interval> open{{-INFINITY, INFINITY}, {-INFINITY, INFINITY}};
    std::vector<double> d{50.0, -50.0, 0.1};
    CHECK(group_sequential_stop(d, open).tau == 3.0);
}

TEST_CASE("stage-one stopping probability")
{
    TableOptions o;
    o.reps = 1000000;
    o.base_seed = 4004;
    const auto table = build_null_table(StoppingRuleSpec{GroupSequentialRule{{{-2.797, 2.797}}, 2}}, o);
    const double p = 2.0 * oracle::phi_cdf(-2.797);
    const double hat = stage_probabilities(table)[0];
    CHECK(std::fabs(hat - p) < 4.0 * oracle::binomial_se(p, 1e6));
    for (const auto& out : table.outcomes()) {
        REQUIRE((out.tau == 1.0 || out.tau == 2.0));
    }
}

TEST_CASE("rule validation")
{
    CHECK_THROWS_AS(validate(StoppingRuleSpec{HorizontalRule{0.0, 5.0}}), ConfigError);
    CHECK_THROWS_AS(validate(StoppingRuleSpec{GroupSequentialRule{{{1.0, -1.0}}, 2}}), ConfigError);
    CHECK_THROWS_AS(validate(StoppingRuleSpec{GroupSequentialRule{{}, 0}}), ConfigError);
    CHECK_NOTHROW(validate(StoppingRuleSpec{GroupSequentialRule{{}, 1}}));
    CHECK(rule_hash(StoppingRuleSpec{HorizontalRule{}}) != rule_hash(StoppingRuleSpec{HorizontalRule{0.5, 5.0}}));
}
