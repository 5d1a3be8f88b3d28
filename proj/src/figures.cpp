#include "seqinf/figures.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>

#include "seqinf/calibration.hpp"
#include "seqinf/decision.hpp"
#include "seqinf/error.hpp"
#include "seqinf/experiments.hpp"
#include "seqinf/normal.hpp"
#include "seqinf/sufficient_stats.hpp"

namespace seqinf {

namespace {

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

Check within(const std::string& name, double value, double target, double tol)
{
    const bool pass = std::fabs(value - target) <= tol;
    return {name, pass, fmt("value %.5f, target %.5f, tolerance %.5f", value, target, tol)};
}

const HorizontalResult& as_horizontal(const Observation& obs)
{
    return std::get<HorizontalResult>(obs);
}

const GroupSequentialResult& as_group_sequential(const Observation& obs)
{
    return std::get<GroupSequentialResult>(obs);
}

const BatchedState& as_batched(const Observation& obs)
{
    return std::get<BatchedState>(obs);
}

} // namespace

StudyDesign horizontal_study(const HorizontalStudy& spec, Execution execution)
{
    const HorizontalRule rule{spec.gamma, spec.t_cap};
    validate(StoppingRuleSpec{rule});
    HorizontalDesign design;
    design.pi = spec.pi;
    design.gamma = spec.gamma;
    design.t_cap = spec.t_cap;

    // Cutoffs are cached by n so each matched table is built once.
    auto cutoffs = std::make_shared<std::map<long, double>>();
    double limit_cutoff = 0.0;
    if (spec.include_limit_cutoff) {
        TableOptions o;
        o.reps = spec.table_reps;
        o.dt = spec.limit_dt;
        o.monitoring = Monitoring::continuous;
        o.base_seed = spec.table_seed;
        o.execution = execution;
        limit_cutoff = tau_quantile(build_null_table(StoppingRuleSpec{rule}, o), spec.alpha);
    }

    StudyDesign d;
    d.id = "horizontal";
    d.simulate = [design](const CellContext& cell, std::uint64_t seed) -> Observation {
        return run_horizontal_experiment(DGPSpec::local(cell.mu1, cell.mu0, cell.n), design, seed);
    };
    d.tests = [spec, rule, execution, cutoffs, limit_cutoff](const CellContext& cell) {
        auto it = cutoffs->find(cell.n);
        if (it == cutoffs->end()) {
            TableOptions o;
            o.reps = spec.table_reps;
            o.dt = 1.0 / static_cast<double>(cell.n);
            o.monitoring = Monitoring::discrete;
            o.base_seed = derive_seed(spec.table_seed, static_cast<std::uint64_t>(cell.n));
            o.execution = execution;
            const double c = tau_quantile(build_null_table(StoppingRuleSpec{rule}, o), spec.alpha);
            it = cutoffs->emplace(cell.n, c).first;
        }
        const double c = it->second;
        const double alpha = spec.alpha;
        std::vector<StudyTest> tests;
        tests.push_back({"stopping_time",
                         [c](const Observation& obs) { return stopping_time_test(as_horizontal(obs).outcome, c).reject; },
                         {}});
        if (spec.include_limit_cutoff) {
            tests.push_back({"stopping_time_limit_cutoff",
                             [limit_cutoff](const Observation& obs) {
                                 return stopping_time_test(as_horizontal(obs).outcome, limit_cutoff).reject;
                             },
                             {}});
        }
        tests.push_back({"naive_two_sample",
                         [alpha](const Observation& obs) {
                             const auto& h = as_horizontal(obs);
                             return naive_two_sample_test(h.arm1, h.arm0, alpha).reject;
                         },
                         {}});
        return tests;
    };
    return d;
}

StudyDesign group_sequential_study(const GroupSequentialStudy& spec, Execution execution)
{
    const GroupSequentialRule rule{spec.intervals, spec.stages};
    validate(StoppingRuleSpec{rule});
    const double sigma = two_sample_sigma(spec.pi, spec.sigma[1], spec.sigma[0]);
    GroupSequentialDesign design;
    design.intervals = spec.intervals;
    design.stages = spec.stages;
    design.pi = spec.pi;

    auto thresholds = std::make_shared<std::map<double, ThresholdTable>>();

    StudyDesign d;
    d.id = "group_sequential";
    d.simulate = [design](const CellContext& cell, std::uint64_t seed) -> Observation {
        return run_group_sequential(DGPSpec::local(cell.mu1, cell.mu0, cell.n), design, seed);
    };
    d.tests = [spec, rule, sigma, execution, thresholds](const CellContext& cell) {
        if (cell.mu0 != 0.0) {
            throw ConfigError("group-sequential study: the control arm shift must be 0");
        }
        auto it = thresholds->find(cell.mu1);
        if (it == thresholds->end()) {
            TableOptions o;
            o.reps = spec.table_reps;
            o.drift = cell.mu1 / sigma;
            o.base_seed = spec.table_seed;
            o.execution = execution;
            const NullTable table = build_null_table(StoppingRuleSpec{rule}, o);
            it = thresholds->emplace(cell.mu1, alpha_spending_thresholds(table, conditional_spending(table, spec.alpha)))
                     .first;
        }
        const ThresholdTable th = it->second;
        auto reject = [th](const Observation& obs) {
            return alpha_spending_test(as_group_sequential(obs).outcome, th).reject;
        };
        std::vector<StudyTest> tests;
        tests.push_back({"alpha_spending", reject, {}});
        for (int t = 1; t <= spec.stages; ++t) {
            tests.push_back({"alpha_spending|stage=" + std::to_string(t), reject, [t](const Observation& obs) {
                                 return static_cast<int>(as_group_sequential(obs).outcome.tau) == t;
                             }});
        }
        return tests;
    };
    return d;
}

StudyDesign thompson_study(const ThompsonStudy& spec, Execution execution)
{
    const BatchedPolicySpec policy{ThompsonPolicy{spec.batches}};
    validate(policy);
    BatchedTableOptions o;
    o.reps = spec.table_reps;
    o.base_seed = spec.table_seed;
    o.execution = execution;
    auto table = std::make_shared<const NullTable>(build_null_table(policy, o));
    const double J = static_cast<double>(spec.batches);
    const std::array<double, 2> unit{1.0, 1.0};

    StudyDesign d;
    d.id = "thompson";
    const int batches = spec.batches;
    d.simulate = [batches](const CellContext& cell, std::uint64_t seed) -> Observation {
        const double scale = 1.0 / static_cast<double>(batches);
        return run_thompson_batched(DGPSpec::local(cell.mu1 * scale, cell.mu0 * scale, cell.n), batches, seed);
    };
    d.tests = [spec, table, J, unit](const CellContext& cell) {
        const BatchedAlternative alt{cell.mu1 / J, cell.mu0 / J};
        const CriticalValue cv = np_critical_value(*table, alt, unit, spec.alpha);
        if (cv.degenerate) {
            throw DomainError("thompson study: the NP test is degenerate at the null point");
        }
        std::vector<StudyTest> tests;
        tests.push_back({"np",
                         [alt, unit, cv](const Observation& obs) {
                             return batched_np_test(as_batched(obs), alt, unit, cv.gamma).reject;
                         },
                         {}});
        return tests;
    };
    return d;
}

FigureReport replicate_fig1(const Fig1Config& config)
{
    FigureReport report;
    const HorizontalRule rule{config.gamma, config.t_cap};
    const double sigma = two_sample_sigma(config.pi, 1.0, 1.0);

    HorizontalStudy spec;
    spec.gamma = config.gamma;
    spec.pi = config.pi;
    spec.alpha = config.alpha;
    spec.t_cap = config.t_cap;
    spec.table_reps = config.table_reps;
    spec.limit_dt = config.dt;
    spec.table_seed = derive_seed(config.seed, 1);
    const StudyDesign design = horizontal_study(spec, config.execution);

    std::vector<std::array<double, 2>> alternatives;
    for (double mu : config.mu_grid) {
        alternatives.push_back({0.0, mu});
    }
    const StudyResult study =
        monte_carlo_study(design, config.n_grid, alternatives, config.reps, derive_seed(config.seed, 2),
                          config.execution);
    report.panels.push_back({"fig1_finite.csv", study_csv(study)});

    TableOptions env;
    env.reps = config.table_reps;
    env.dt = config.dt;
    env.monitoring = Monitoring::continuous;
    env.base_seed = derive_seed(config.seed, 3);
    env.execution = config.execution;
    const PowerCurve envelope = stopping_time_power_curve(rule, config.mu_grid, sigma, config.alpha, env);
    report.panels.push_back({"fig1_envelope.csv", power_curve_csv(envelope)});

    for (const long n : config.n_grid) {
        for (const auto& row : study.rows) {
            if (row.n != n || row.mu1 != 0.0) {
                continue;
            }
            if (row.test == "stopping_time") {
                report.checks.push_back(
                    within("fig1 size n=" + std::to_string(n), row.rate, config.alpha, 0.01));
            } else if (row.test == "naive_two_sample") {
                const bool pass = row.rate >= 0.07 && row.rate <= 0.11;
                report.checks.push_back({"fig1 naive size n=" + std::to_string(n), pass,
                                         fmt("value %.5f, allowed [0.07, 0.11]", row.rate)});
            }
        }
    }
    if (!config.n_grid.empty()) {
        long n_max = config.n_grid.front();
        for (long n : config.n_grid) {
            n_max = std::max(n_max, n);
        }
        for (std::size_t k = 0; k < envelope.mu.size(); ++k) {
            if (envelope.mu[k] == 0.0) {
                continue;
            }
            const auto& row = study.find("horizontal", "stopping_time", n_max, envelope.mu[k], 0.0);
            report.checks.push_back(within(fmt("fig1 power n=%.0f mu=%g", static_cast<double>(n_max), envelope.mu[k]),
                                           row.rate, envelope.power[k], 0.03));
        }
    }
    return report;
}

FigureReport replicate_fig2(const Fig2Config& config)
{
    FigureReport report;
    const GroupSequentialRule rule{config.intervals, config.stages};
    const double sigma = two_sample_sigma(config.pi, config.sigma[1], config.sigma[0]);
    const std::uint64_t table_seed = derive_seed(config.seed, 1);

    CsvTable curves;
    curves.header = {"mu_bar", "stage", "p_stop", "alpha_t", "gamma", "mode", "draws", "table_reps"};
    std::vector<std::pair<double, double>> gap;  // (mu_bar, gamma(1) - gamma(2))
    double p1_null = -1.0;
    for (const double mu_bar : config.threshold_grid) {
        TableOptions o;
        o.reps = config.table_reps;
        o.drift = mu_bar / sigma;
        o.base_seed = table_seed;
        o.execution = config.execution;
        const NullTable table = build_null_table(StoppingRuleSpec{rule}, o);
        const ThresholdTable th = alpha_spending_thresholds(table, conditional_spending(table, config.alpha));
        for (const auto& st : th.stages) {
            curves.add_row({format_double(mu_bar), std::to_string(st.stage), format_double(st.p_stop),
                            format_double(st.alpha_t), format_double(st.upper),
                            st.mode == StageMode::always_reject ? "always_reject" : "one_sided",
                            std::to_string(st.draws), std::to_string(config.table_reps)});
        }
        if (th.stages.size() >= 2) {
            gap.emplace_back(mu_bar, th.stages[0].upper - th.stages[1].upper);
        }
        if (mu_bar == 0.0) {
            p1_null = th.stages[0].p_stop;
        }
    }
    report.panels.push_back({"fig2_thresholds.csv", curves});

    if (p1_null >= 0.0 && config.intervals.size() == 1) {
        const double target = 2.0 * normal_cdf(-config.intervals[0].hi);
        const double se = std::sqrt(target * (1.0 - target) / static_cast<double>(config.table_reps));
        report.checks.push_back(within("fig2 stage-1 stop probability", p1_null, target, 4.0 * se));
    }
    bool has_pos = false;
    bool has_neg = false;
    for (const auto& [mu_bar, g] : gap) {
        has_pos = has_pos || g > 0.0;
        has_neg = has_neg || g < 0.0;
    }
    report.checks.push_back({"fig2 threshold curves cross", has_pos && has_neg,
                             has_pos && has_neg ? "gamma(1) - gamma(2) changes sign" : "no sign change"});

    GroupSequentialStudy spec;
    spec.intervals = config.intervals;
    spec.stages = config.stages;
    spec.pi = config.pi;
    spec.alpha = config.alpha;
    spec.sigma = config.sigma;
    spec.table_reps = config.table_reps;
    spec.table_seed = derive_seed(config.seed, 2);
    const StudyDesign design = group_sequential_study(spec, config.execution);
    std::vector<std::array<double, 2>> alternatives;
    for (double mu_bar : config.size_grid) {
        alternatives.push_back({0.0, mu_bar});
    }
    const StudyResult study = monte_carlo_study(design, config.n_grid, alternatives, config.reps,
                                                derive_seed(config.seed, 3), config.execution);
    report.panels.push_back({"fig2_size.csv", study_csv(study)});

    for (const auto& row : study.rows) {
        if (row.mu1 != 0.0 || row.test.find("|stage=") == std::string::npos) {
            continue;
        }
        report.checks.push_back(
            within("fig2 conditional size n=" + std::to_string(row.n) + " " + row.test, row.rate, config.alpha, 0.012));
    }
    return report;
}

FigureReport replicate_fig3(const Fig3Config& config)
{
    FigureReport report;
    const BatchedPolicySpec policy{ThompsonPolicy{config.batches}};
    const double J = static_cast<double>(config.batches);
    const std::array<double, 2> unit{1.0, 1.0};

    std::vector<BatchedAlternative> grid;
    for (double mu1 : config.envelope_grid) {
        for (double mu0 : config.envelope_grid) {
            grid.push_back({mu1 / J, mu0 / J});
        }
    }
    BatchedTableOptions o;
    o.reps = config.envelope_reps;
    o.base_seed = derive_seed(config.seed, 1);
    o.execution = config.execution;
    PowerCurve surface = power_envelope(policy, grid, unit, config.alpha, o);
    // Report coordinates on the mu scale, taken from the grid to avoid rounding.
    for (std::size_t i = 0, k = 0; i < config.envelope_grid.size(); ++i) {
        for (std::size_t j = 0; j < config.envelope_grid.size(); ++j, ++k) {
            surface.mu[k] = config.envelope_grid[i];
            surface.mu0[k] = config.envelope_grid[j];
        }
    }
    report.panels.push_back({"fig3_envelope.csv", power_curve_csv(surface)});

    std::vector<BatchedAlternative> asym;
    for (double a : config.asymmetry_grid) {
        asym.push_back({a / J, 0.0});
        asym.push_back({-a / J, 0.0});
    }
    if (!asym.empty()) {
        BatchedTableOptions ao = o;
        ao.reps = config.asymmetry_reps;
        ao.base_seed = derive_seed(config.seed, 2);
        PowerCurve curve = power_envelope(policy, asym, unit, config.alpha, ao);
        for (std::size_t i = 0; i < config.asymmetry_grid.size(); ++i) {
            curve.mu[2 * i] = config.asymmetry_grid[i];
            curve.mu[2 * i + 1] = -config.asymmetry_grid[i];
        }
        report.panels.push_back({"fig3_asymmetry.csv", power_curve_csv(curve)});
        for (std::size_t i = 0; i + 1 < curve.mu.size(); i += 2) {
            const double gap = curve.power[i] - curve.power[i + 1];
            const double se = std::hypot(curve.standard_error[i], curve.standard_error[i + 1]);
            report.checks.push_back({fmt("fig3 envelope asymmetry a=%g", curve.mu[i]), gap > 2.0 * se,
                                     fmt("beta(a,0) - beta(-a,0) = %.5f, 2 SE = %.5f", gap, 2.0 * se)});
        }
    }

    // Finite-sample NP power along H1: (mu, mu) and (mu, 0).
    std::vector<std::array<double, 2>> alternatives;
    std::vector<BatchedAlternative> limit_points;
    for (double mu : config.mu_grid) {
        alternatives.push_back({mu, mu});
        alternatives.push_back({0.0, mu});
        limit_points.push_back({mu / J, mu / J});
        limit_points.push_back({mu / J, 0.0});
    }
    if (!alternatives.empty()) {
        ThompsonStudy spec;
        spec.batches = config.batches;
        spec.alpha = config.alpha;
        spec.table_reps = config.table_reps;
        spec.table_seed = derive_seed(config.seed, 3);
        const StudyResult study = monte_carlo_study(thompson_study(spec, config.execution), config.n_grid,
                                                    alternatives, config.reps, derive_seed(config.seed, 4),
                                                    config.execution);
        report.panels.push_back({"fig3_finite.csv", study_csv(study)});

        BatchedTableOptions lo = o;
        lo.reps = config.table_reps;
        lo.base_seed = derive_seed(config.seed, 5);
        PowerCurve limit = power_envelope(policy, limit_points, unit, config.alpha, lo);
        for (std::size_t k = 0; k < alternatives.size(); ++k) {
            limit.mu[k] = alternatives[k][1];
            limit.mu0[k] = alternatives[k][0];
        }
        report.panels.push_back({"fig3_limit_points.csv", power_curve_csv(limit)});
        for (const long n : config.n_grid) {
            const double tol = n >= 100 ? 0.03 : 0.06;
            for (std::size_t k = 0; k < limit.mu.size(); ++k) {
                const double mu1 = limit.mu[k];
                const double mu0 = limit.mu0[k];
                const auto& row = study.find("thompson", "np", n, mu1, mu0);
                report.checks.push_back(within(fmt("fig3 NP power n=%.0f mu=(%g,%g)", static_cast<double>(n), mu1, mu0),
                                               row.rate, limit.power[k], tol));
            }
        }
    }
    return report;
}

} // namespace seqinf
