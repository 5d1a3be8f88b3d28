#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "seqinf/calibration.hpp"
#include "seqinf/diffusion.hpp"
#include "seqinf/error.hpp"
#include "seqinf/rng.hpp"

using namespace seqinf;

TEST_CASE("time grid")
{
    const TimeGrid g(1.0, 1e-3);
    CHECK(g.n_steps() == 1000);
    CHECK(TimeGrid(0.24, 0.1).n_steps() == 2);
    CHECK_THROWS_AS(TimeGrid(1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(TimeGrid(1.0, -1e-3), ConfigError);
    CHECK_THROWS_AS(TimeGrid(0.01, 1.0), ConfigError);
}

TEST_CASE("simulate_path basics")
{
    const TimeGrid g(1.0, 0.01);
    const auto p = simulate_path(g, 0.3, 77);
    CHECK(p.values.size() == g.n_steps() + 1);
    CHECK(p.values[0] == 0.0);
    const auto q = simulate_path(g, 0.3, 77);
    CHECK(p.values == q.values);
    const auto r = simulate_path(g, 0.3, 78);
    CHECK(p.values != r.values);
}

TEST_CASE("driftless increments have mean zero")
{
    const TimeGrid g(1.0, 0.1);
    std::vector<double> inc;
    inc.reserve(100000 * 10);
    std::vector<double> first;
    for (std::uint64_t r = 0; r < 100000; ++r) {
        const auto p = simulate_path(g, 0.0, replication_seed(5, r));
        first.push_back(p.values[1] - p.values[0]);
    }
    const auto m = oracle::moments(first);
    CHECK(std::fabs(m.mean) < 4.0 * m.se);
    CHECK(m.var == doctest::Approx(0.1).epsilon(0.02));
}

TEST_CASE("drifted terminal mean")
{
    const TimeGrid g(2.0, 0.1);
    const double mu = 1.5;
    std::vector<double> end;
    for (std::uint64_t r = 0; r < 100000; ++r) {
        end.push_back(simulate_path(g, mu, replication_seed(6, r)).values.back());
    }
    const auto m = oracle::moments(end);
    CHECK(std::fabs(m.mean - mu * 2.0) < 4.0 * m.se);
    CHECK(std::fabs(m.var - 2.0) < 4.0 * oracle::variance_se(end));
}

TEST_CASE("batch draws")
{
    CHECK(simulate_batch_draw(1, 0.0, 3.0, 1).value == 0.0);
    CHECK_THROWS_AS(simulate_batch_draw(1, -0.1, 0.0, 1), DomainError);
    CHECK_THROWS_AS(simulate_batch_draw(1, 1.1, 0.0, 1), DomainError);

    std::vector<double> unit;
    std::vector<double> half;
    for (std::uint64_t r = 0; r < 100000; ++r) {
        unit.push_back(simulate_batch_draw(0, 1.0, 0.0, replication_seed(8, r)).value);
        half.push_back(simulate_batch_draw(1, 0.5, 2.0, replication_seed(9, r)).value);
    }
    const auto u = oracle::moments(unit);
    CHECK(std::fabs(u.var - 1.0) < 4.0 * oracle::variance_se(unit));
    const auto h = oracle::moments(half);
    CHECK(std::fabs(h.mean - 1.0) < 4.0 * h.se);
    CHECK(std::fabs(h.var - 0.5) < 4.0 * oracle::variance_se(half));
}

TEST_CASE("girsanov exponent")
{
    CHECK(girsanov_exponent(0.0, 0.0, 3.7, 1.0) == 0.0);
    CHECK(girsanov_exponent(1.0, 1.0, 2.0, 1.0) == 0.0);
    CHECK(girsanov_exponent(0.8, 0.3, 0.0, 1.0) == 0.0);
    CHECK(girsanov_exponent(1.0, 1.0, 2.0, 2.0) == doctest::Approx(1.0 - 0.5));
    CHECK(girsanov_exponent(1.0, 0.5, 1.0, 1.0) < girsanov_exponent(1.1, 0.5, 1.0, 1.0));
    CHECK_THROWS_AS(girsanov_exponent(1.0, 1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("batched girsanov exponent")
{
    BatchedState s;
    CHECK(batched_girsanov_exponent(s, 0.0, 0.0, 1.0, 1.0) == 0.0);
    s.q = {1.0, 1.0};
    s.x = {0.0, 1.0};
    CHECK(batched_girsanov_exponent(s, 1.0, 0.0, 1.0, 1.0) == doctest::Approx(0.5));
    CHECK(batched_girsanov_exponent(s, 1.0, 0.0, 2.0, 2.0) == doctest::Approx(0.375));
    s.q[0] = -0.1;
    CHECK_THROWS_AS(batched_girsanov_exponent(s, 1.0, 0.0, 1.0, 1.0), DomainError);
    s.q[0] = 1.0;
    CHECK_THROWS_AS(batched_girsanov_exponent(s, 1.0, 0.0, 0.0, 1.0), DomainError);
}

TEST_CASE("reweight expectation")
{
    std::vector<WeightedValue> plain{{1.0, 0.0}, {2.0, 0.0}, {6.0, 0.0}};
    CHECK(reweight_expectation(plain).mean == doctest::Approx(3.0));
    CHECK_THROWS_AS(reweight_expectation(std::span<const WeightedValue>{}), DomainError);
    std::vector<WeightedValue> bad{{1.0, std::numeric_limits<double>::infinity()}};
    CHECK_THROWS_AS(reweight_expectation(bad), DomainError);
}

TEST_CASE("stopped likelihood ratio has mean one")
{
    TableOptions o;
    o.reps = 100000;
    o.dt = 1e-3;
    o.base_seed = 404;
    const auto table = build_null_table(StoppingRuleSpec{HorizontalRule{}}, o);
    for (double mu : {1.0, 2.0}) {
        std::vector<WeightedValue> w;
        for (const auto& out : table.outcomes()) {
            w.push_back({1.0, girsanov_exponent(out.x_at_tau, out.tau, mu, 1.0)});
        }
        const auto e = reweight_expectation(w);
        CHECK(std::fabs(e.mean - 1.0) < 4.0 * e.standard_error);
    }
}

TEST_CASE("importance sampling matches direct simulation, fixed time")
{
    TableOptions o;
    o.reps = 100000;
    o.base_seed = 11;
    const StoppingRuleSpec rule{FixedTimeRule{1.0}};
    const auto null_table = build_null_table(rule, o);
    const double mu = 1.2;
    const double z = oracle::phi_quantile(0.95);
    std::vector<WeightedValue> w;
    for (const auto& out : null_table.outcomes()) {
        w.push_back({out.x_at_tau >= z ? 1.0 : 0.0, girsanov_exponent(out.x_at_tau, out.tau, mu, 1.0)});
    }
    const double is = reweight_expectation(w).mean;
    o.drift = mu;
    o.base_seed = 12;
    const auto alt = build_null_table(rule, o);
    const double direct =
        rejection_rate(alt, [z](const StoppedOutcome& out) { return out.x_at_tau >= z; }).mean;
    CHECK(std::fabs(is - direct) < 0.01);
    CHECK(std::fabs(direct - oracle::phi_cdf(mu - z)) < 0.01);
}
