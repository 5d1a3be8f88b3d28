#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "seqinf/calibration.hpp"
#include "seqinf/error.hpp"
#include "seqinf/experiments.hpp"
#include "seqinf/figures.hpp"
#include "seqinf/rng.hpp"
#include "seqinf/study.hpp"

using namespace seqinf;

TEST_CASE("outcome draws")
{
    DGPSpec dgp;
    dgp.errors = ErrorFamily::scaled_uniform;
    CounterRng s(1, Stream::arm1);
    std::vector<double> y;
    for (int i = 0; i < 100000; ++i) {
        y.push_back(draw_outcome(dgp, 1, s));
        REQUIRE(std::fabs(y.back()) <= std::sqrt(3.0));
    }
    const auto m = oracle::moments(y);
    CHECK(std::fabs(m.mean) < 4 * m.se);
    CHECK(std::fabs(m.var - 1.0) < 4 * oracle::variance_se(y));

    const auto local = DGPSpec::local(2.0, 1.0, 400);
    CHECK(local.shift[1] == doctest::Approx(0.1));
    CHECK(local.shift[0] == doctest::Approx(0.05));
    CHECK_THROWS_AS(DGPSpec::local(1.0, 0.0, 0), ConfigError);
}

TEST_CASE("horizontal experiment under the null")
{
    const auto dgp = DGPSpec::local(0.0, 0.0, 10000);
    const HorizontalDesign design;
    std::vector<double> taus;
    for (std::uint64_t r = 0; r < 10000; ++r) {
        const auto res = run_horizontal_experiment(dgp, design, replication_seed(31, r));
        taus.push_back(res.outcome.tau);
        REQUIRE_FALSE(res.outcome.censored);
        REQUIRE(std::fabs(res.outcome.x_at_tau) >= design.gamma);
        REQUIRE(res.arm1.count + res.arm0.count == std::lround(res.outcome.tau * 10000));
    }
    CHECK(std::fabs(oracle::moments(taus).mean - 0.2873) < 0.01);

    // KS distance to the limit table on the same time grid.
    TableOptions o;
    o.reps = 100000;
    o.dt = 1e-4;
    o.monitoring = Monitoring::discrete;
    o.base_seed = 32;
    const auto table = build_null_table(StoppingRuleSpec{HorizontalRule{0.536, 5.0}}, o);
    std::vector<double> limit;
    for (const auto& s : table.outcomes()) {
        limit.push_back(s.tau);
    }
    std::sort(taus.begin(), taus.end());
    std::sort(limit.begin(), limit.end());
    double ks = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < taus.size() && j < limit.size()) {
        const double v = std::min(taus[i], limit[j]);
        while (i < taus.size() && taus[i] == v) {
            ++i;
        }
        while (j < limit.size() && limit[j] == v) {
            ++j;
        }
        ks = std::max(ks, std::fabs(static_cast<double>(i) / taus.size() - static_cast<double>(j) / limit.size()));
    }
    CHECK(ks < 0.02);
}

TEST_CASE("horizontal experiment with zero noise")
{
    const long n = 400;
    auto dgp = DGPSpec::local(4.0, 0.0, n, ErrorFamily::degenerate);
    HorizontalDesign design;
    // Arm 1 holds floor(i / 2) of the first i units, so x(i/n) = 2 delta floor(i/2) / sqrt(n) / sigma,
    // with sigma = sqrt(1/pi + 1/(1-pi)) = 2.
    const double delta = 4.0 / std::sqrt(static_cast<double>(n));
    long expected = 0;
    for (long i = 1; i < 10 * n; ++i) {
        if (std::fabs(2.0 * delta * static_cast<double>(i / 2) / std::sqrt(static_cast<double>(n)) / 2.0) >=
            design.gamma) {
            expected = i;
            break;
        }
    }
    const auto a = run_horizontal_experiment(dgp, design, 1);
    const auto b = run_horizontal_experiment(dgp, design, 2);
    CHECK(a.outcome.tau == doctest::Approx(static_cast<double>(expected) / n));
    CHECK(a.outcome == b.outcome);
    CHECK(a.outcome.delta == 1);

    dgp = DGPSpec::local(0.0, 0.0, n, ErrorFamily::degenerate);
    const auto c = run_horizontal_experiment(dgp, design, 1);
    CHECK(c.outcome.censored);
    CHECK(c.outcome.tau == doctest::Approx(design.t_cap));

    // Neyman allocation is accepted and respected.
    design.pi = neyman_allocation(2.0, 1.0);
    design.sigma = {2.0, 1.0};
    dgp = DGPSpec::local(0.0, 0.0, 1000);
    dgp.error_sd = {2.0, 1.0};
    const auto d = run_horizontal_experiment(dgp, design, 3);
    const double share = static_cast<double>(d.arm1.count) / static_cast<double>(d.arm1.count + d.arm0.count);
    CHECK(std::fabs(share - 2.0 / 3.0) < 0.01);
}

TEST_CASE("group sequential experiment")
{
    const GroupSequentialDesign design;
    const auto dgp = DGPSpec::local(0.0, 0.0, 500);
    const std::size_t reps = 50000;
    std::size_t first = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
        const auto res = run_group_sequential(dgp, design, replication_seed(41, r));
        first += res.outcome.tau == 1.0;
        REQUIRE(res.sigma_hat[0] > 0.0);
    }
    const double p = 2.0 * oracle::phi_cdf(-2.797);
    CHECK(std::fabs(static_cast<double>(first) / reps - p) < 4.0 * oracle::binomial_se(p, reps));

    GroupSequentialDesign open = design;
    open.intervals = {{-1e9, 1e9}};
    CHECK(run_group_sequential(dgp, open, 5).outcome.tau == 2.0);

    const auto far = DGPSpec::local(40.0, 0.0, 500);
    std::size_t early = 0;
    for (std::uint64_t r = 0; r < 200; ++r) {
        early += run_group_sequential(far, design, replication_seed(42, r)).outcome.tau == 1.0;
    }
    CHECK(early == 200);

    CHECK_THROWS_AS(run_group_sequential(DGPSpec::local(0.0, 0.0, 500, ErrorFamily::degenerate), design, 1),
                    DataError);
}

TEST_CASE("thompson experiment")
{
    // The first batch is split evenly.
    const auto one = run_thompson_batched(DGPSpec::local(0.0, 0.0, 100), 1, 7);
    CHECK(one.q[0] == doctest::Approx(0.5));
    CHECK(one.q[1] == doctest::Approx(0.5));
    CHECK(one.batches == 1);

    BatchedTableOptions b;
    b.reps = 100000;
    b.base_seed = 8;
    const auto table = build_null_table(BatchedPolicySpec{ThompsonPolicy{10}}, b);
    std::vector<double> lq;
    std::vector<double> lx;
    for (const auto& s : table.states()) {
        lq.push_back(s.q[1]);
        lx.push_back(s.x[1]);
    }
    const auto dgp = DGPSpec::local(0.0, 0.0, 100);
    std::vector<double> fq;
    std::vector<double> fx;
    for (std::uint64_t r = 0; r < 10000; ++r) {
        const auto s = run_thompson_batched(dgp, 10, replication_seed(9, r));
        fq.push_back(s.q[1]);
        fx.push_back(s.x[1]);
    }
    const auto mq = oracle::moments(fq);
    const auto ml = oracle::moments(lq);
    CHECK(std::fabs(mq.mean - ml.mean) < 4.0 * std::hypot(mq.se, ml.se));
    const auto mx = oracle::moments(fx);
    const auto mlx = oracle::moments(lx);
    CHECK(std::fabs(mx.mean - mlx.mean) < 4.0 * std::hypot(mx.se, mlx.se));
    CHECK(std::fabs(mx.var - mlx.var) < 4.0 * std::hypot(oracle::variance_se(fx), oracle::variance_se(lx)));
}

namespace {

StudyDesign toy_design()
{
    StudyDesign d;
    d.id = "toy";
    d.simulate = [](const CellContext& cell, std::uint64_t seed) -> Observation {
        HorizontalDesign h;
        h.t_cap = 0.5;
        return run_horizontal_experiment(DGPSpec::local(cell.mu1, cell.mu0, cell.n), h, seed);
    };
    d.tests = [](const CellContext&) {
        std::vector<StudyTest> t;
        t.push_back({"early", [](const Observation& o) { return std::get<HorizontalResult>(o).outcome.tau < 0.1; },
                     {}});
        t.push_back({"early|up",
                     [](const Observation& o) { return std::get<HorizontalResult>(o).outcome.tau < 0.1; },
                     [](const Observation& o) { return std::get<HorizontalResult>(o).outcome.delta > 0; }});
        return t;
    };
    return d;
}

} // namespace

TEST_CASE("monte carlo study")
{
    const auto design = toy_design();
    const std::vector<long> ns{200, 400};
    const std::vector<std::array<double, 2>> alts{{0.0, 0.0}, {0.0, 2.0}};
    const auto a = monte_carlo_study(design, ns, alts, 500, 77, Execution::serial);
    CHECK(a.rows.size() == 8);
    for (const auto& row : a.rows) {
        CHECK(row.rate >= 0.0);
        CHECK(row.rate <= 1.0);
        CHECK(row.errors == 0);
        CHECK(row.standard_error ==
              doctest::Approx(std::sqrt(row.rate * (1 - row.rate) / static_cast<double>(row.reps))));
    }
    CHECK(a.find("toy", "early", 200, 0.0).reps == 500);
    CHECK(a.find("toy", "early|up", 200, 2.0).reps < 500);
    CHECK_THROWS_AS(a.find("toy", "early", 300, 0.0), ConfigError);

    for (int threads : {1, 8}) {
        set_thread_count(threads);
        const auto b = monte_carlo_study(design, ns, alts, 500, 77, Execution::parallel);
        REQUIRE(b.rows.size() == a.rows.size());
        for (std::size_t k = 0; k < a.rows.size(); ++k) {
            CHECK(a.rows[k].rejections == b.rows[k].rejections);
            CHECK(a.rows[k].seed == b.rows[k].seed);
        }
    }
    set_thread_count(1);

    // Cell seeds depend on coordinates, not grid position.
    const std::vector<long> ns_rev{400, 200};
    const auto c = monte_carlo_study(design, ns_rev, alts, 500, 77, Execution::serial);
    CHECK(c.find("toy", "early", 200, 2.0).rejections == a.find("toy", "early", 200, 2.0).rejections);

    CHECK_THROWS_AS(monte_carlo_study(design, ns, alts, 99, 77), ConfigError);

    // A failing cell is recorded and the others still run.
    auto broken = design;
    broken.tests = [base = design.tests](const CellContext& cell) {
        if (cell.n == 400) {
            throw CalibrationError("no cutoff");
        }
        return base(cell);
    };
    const auto e = monte_carlo_study(broken, ns, alts, 200, 77, Execution::serial);
    const auto& bad = e.find("toy", "*", 400, 0.0);
    CHECK(std::isnan(bad.rate));
    CHECK(bad.error.find("no cutoff") != std::string::npos);
    CHECK(e.find("toy", "early", 200, 0.0).reps == 200);

    // Replication errors are counted and excluded.
    auto flaky = design;
    flaky.simulate = [base = design.simulate](const CellContext& cell, std::uint64_t seed) -> Observation {
        if (seed % 5 == 0) {
            throw DataError("flaky");
        }
        return base(cell, seed);
    };
    const auto f = monte_carlo_study(flaky, ns, alts, 1000, 77, Execution::serial);
    const auto& row = f.find("toy", "early", 200, 0.0);
    CHECK(row.errors > 0);
    CHECK(row.reps + row.errors == 1000);
}

TEST_CASE("thompson study null point")
{
    ThompsonStudy spec;
    spec.table_reps = 1000;
    const auto design = thompson_study(spec, Execution::serial);
    const std::vector<long> ns{20};
    const std::vector<std::array<double, 2>> alts{{0.0, 0.0}, {0.0, 2.0}};
    const auto r = monte_carlo_study(design, ns, alts, 100, 5, Execution::serial);
    CHECK(std::isnan(r.find(design.id, "*", 20, 0.0).rate));
    CHECK(r.find(design.id, "np", 20, 2.0).rate > 0.0);
}
