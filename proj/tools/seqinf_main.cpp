// seqinf command-line front end: calibrate, power-envelope, simulate, replicate.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "seqinf/calibration.hpp"
#include "seqinf/csv.hpp"
#include "seqinf/error.hpp"
#include "seqinf/figures.hpp"
#include "seqinf/serialization.hpp"
#include "seqinf/sufficient_stats.hpp"
#include "seqinf/version.hpp"

namespace fs = std::filesystem;
using namespace seqinf;
using namespace seqinf::cli;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<long> reps;
    std::optional<double> dt;
    std::string out = ".";
    std::string threads = "auto";
    std::string figure;
};

void apply_threads(const std::string& threads)
{
    if (threads == "auto") {
        return;
    }
    int n = 0;
    try {
        std::size_t used = 0;
        n = std::stoi(threads, &used);
        if (used != threads.size()) {
            n = 0;
        }
    } catch (const std::exception&) {
        n = 0;
    }
    if (n < 1) {
        throw ConfigError("--threads must be a positive integer or 'auto'");
    }
    set_thread_count(n);
}

/// Loads the config file and folds command-line overrides into it, so the
/// provenance hash covers the effective settings.
json effective_config(const Options& o, const char* reps_key = "reps")
{
    json j = load_config(o.config);
    if (!j.is_object()) {
        throw ConfigError("config: top level must be an object");
    }
    if (o.seed) {
        j["seed"] = *o.seed;
    }
    if (o.reps) {
        j[reps_key] = *o.reps;
    }
    if (o.dt) {
        j["dt"] = *o.dt;
    }
    return j;
}

Provenance provenance_of(const std::string& command, const json& config, std::uint64_t seed)
{
    return {fnv1a64(command + "\n" + config.dump()), seed};
}

fs::path prepare_out(const Options& o)
{
    const fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw CalibrationError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    return dir;
}

int cmd_calibrate(const Options& o)
{
    const json j = effective_config(o);
    Section s(j, "");
    const bool batched = s.has("policy");
    const double alpha = s.number("alpha", 0.05);
    const std::uint64_t seed = s.seed("seed", 1);
    const auto reps = static_cast<std::size_t>(s.integer("reps", 100000));
    const fs::path dir = prepare_out(o);
    const Provenance prov = provenance_of("calibrate", j, seed);
    CsvTable summary;
    summary.header = {"quantity", "stage", "value", "se"};

    if (batched) {
        const BatchedPolicySpec policy = parse_policy(s.child("policy"));
        const auto drift = s.numbers("drift", {0.0, 0.0});
        if (drift.size() != 2) {
            throw ConfigError("config: 'drift' must be [drift0, drift1] for a policy");
        }
        s.finish();
        BatchedTableOptions opt;
        opt.reps = reps;
        opt.drift = {drift[0], drift[1]};
        opt.base_seed = seed;
        const NullTable table = build_null_table(policy, opt);
        write_null_table(table, dir / "null_table.bin");
        RunningMoments q1;
        RunningMoments x1;
        for (const auto& st : table.states()) {
            q1.add(st.q[1]);
            x1.add(st.x[1]);
        }
        const double r = static_cast<double>(table.size());
        summary.add_row({"mean_q1", "", format_double(q1.mean()), format_double(std::sqrt(q1.variance() / r))});
        summary.add_row({"mean_x1", "", format_double(x1.mean()), format_double(std::sqrt(x1.variance() / r))});
        summary.add_row({"reps", "", std::to_string(table.size()), ""});
        std::printf("%s: %zu draws, mean q1 %.5f (se %.5f)\n", describe(policy).c_str(), table.size(), q1.mean(),
                    std::sqrt(q1.variance() / r));
        write_csv(dir / "calibration.csv", summary, prov);
        return 0;
    }

    const StoppingRuleSpec rule = parse_rule(s.child("rule"));
    TableOptions opt;
    opt.reps = reps;
    opt.dt = s.number("dt", 1e-4);
    opt.drift = s.number("drift", 0.0);
    opt.monitoring = parse_monitoring(s.text("monitoring", "continuous"));
    opt.base_seed = seed;
    const std::string test = s.text("test", "one_sided");
    const json& spending_json = s.raw("spending");
    s.finish();

    const NullTable table = build_null_table(rule, opt);
    write_null_table(table, dir / "null_table.bin");
    const double level_se = std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(table.size()));
    std::printf("%s: %zu draws, censor rate %.6f\n", describe(rule).c_str(), table.size(), table.censor_rate());
    summary.add_row({"censor_rate", "", format_double(table.censor_rate()), ""});

    if (std::holds_alternative<HorizontalRule>(rule)) {
        const double c = tau_quantile(table, alpha);
        summary.add_row({"tau_quantile", "", format_double(c), format_double(level_se)});
        std::printf("c = F0^-1(%.4g) = %.6f (level se %.5f)\n", alpha, c, level_se);
    } else {
        SpendingVector spending;
        if (spending_json.is_null() || (spending_json.is_string() && spending_json.get<std::string>() == "conditional")) {
            spending = conditional_spending(table, alpha);
        } else if (spending_json.is_array()) {
            for (const auto& v : spending_json) {
                if (!v.is_number()) {
                    throw ConfigError("config: 'spending' must be \"conditional\" or an array of numbers");
                }
                spending.alpha.push_back(v.get<double>());
            }
            spending.validate(alpha);
        } else {
            throw ConfigError("config: 'spending' must be \"conditional\" or an array of numbers");
        }
        ThresholdTable th;
        if (test == "one_sided") {
            th = alpha_spending_thresholds(table, spending);
        } else if (test == "two_sided") {
            th = cond_unbiased_thresholds(table, spending);
        } else {
            throw ConfigError("config: 'test' must be 'one_sided' or 'two_sided'");
        }
        write_threshold_table(th, dir / "thresholds.bin");
        write_csv(dir / "thresholds.csv", threshold_csv(th), prov);
        for (const auto& st : th.stages) {
            const double se = st.draws ? std::sqrt(st.p_stop * (1.0 - st.p_stop) / static_cast<double>(table.size())) : 0.0;
            summary.add_row({"p_stop", std::to_string(st.stage), format_double(st.p_stop), format_double(se)});
            summary.add_row({"lower", std::to_string(st.stage), format_double(st.lower), ""});
            summary.add_row({"upper", std::to_string(st.stage), format_double(st.upper), ""});
            std::printf("stage %d: P(tau=t) %.6f (se %.6f), alpha_t %.6f, [%.5f, %.5f]\n", st.stage, st.p_stop, se,
                        st.alpha_t, st.lower, st.upper);
        }
    }
    write_csv(dir / "calibration.csv", summary, prov);
    return 0;
}

int cmd_power_envelope(const Options& o)
{
    const json j = effective_config(o);
    Section s(j, "");
    const double alpha = s.number("alpha", 0.05);
    const std::uint64_t seed = s.seed("seed", 1);
    const auto reps = static_cast<std::size_t>(s.integer("reps", 100000));
    PowerCurve curve;
    if (s.has("policy")) {
        const BatchedPolicySpec policy = parse_policy(s.child("policy"));
        Section grid = s.child("grid");
        const auto mu1 = grid.numbers("mu1", {0.0});
        const auto mu0 = grid.numbers("mu0", {0.0});
        grid.finish();
        const auto sigma = s.numbers("sigma", {1.0, 1.0});
        if (sigma.size() != 2) {
            throw ConfigError("config: 'sigma' must be [sigma0, sigma1] for a policy");
        }
        s.finish();
        // Grid coordinates are mu = J mu_bar; the limit drift per unit q is mu_bar.
        const double J = static_cast<double>(batch_count(policy));
        std::vector<BatchedAlternative> alts;
        for (double a : mu1) {
            for (double b : mu0) {
                alts.push_back({a / J, b / J});
            }
        }
        BatchedTableOptions opt;
        opt.reps = reps;
        opt.base_seed = seed;
        curve = power_envelope(policy, alts, {sigma[0], sigma[1]}, alpha, opt);
        std::size_t k = 0;
        for (double a : mu1) {
            for (double b : mu0) {
                curve.mu[k] = a;
                curve.mu0[k] = b;
                ++k;
            }
        }
    } else {
        const StoppingRuleSpec rule = parse_rule(s.child("rule"));
        const auto grid = s.numbers("grid", {0.0, 1.0, 2.0, 3.0, 4.0});
        const double sigma = s.number("sigma", 1.0);
        const std::string test = s.text("test", "np");
        TableOptions opt;
        opt.reps = reps;
        opt.dt = s.number("dt", 1e-4);
        opt.monitoring = parse_monitoring(s.text("monitoring", "continuous"));
        opt.base_seed = seed;
        s.finish();
        if (test == "np") {
            curve = power_envelope(rule, grid, sigma, alpha, opt);
        } else if (test == "stopping_time") {
            const auto* h = std::get_if<HorizontalRule>(&rule);
            if (!h) {
                throw ConfigError("config: test 'stopping_time' needs a horizontal rule");
            }
            curve = stopping_time_power_curve(*h, grid, sigma, alpha, opt);
        } else {
            throw ConfigError("config: 'test' must be 'np' or 'stopping_time'");
        }
    }
    const fs::path dir = prepare_out(o);
    write_csv(dir / "power_envelope.csv", power_curve_csv(curve), provenance_of("power-envelope", j, seed));
    for (std::size_t k = 0; k < curve.mu.size(); ++k) {
        std::printf("mu=(%g, %g) power %.5f se %.5f%s\n", curve.mu[k], curve.mu0[k], curve.power[k],
                    curve.standard_error[k], curve.degenerate[k] ? " (null point)" : "");
    }
    return 0;
}

int cmd_simulate(const Options& o)
{
    const json j = effective_config(o);
    Section s(j, "");
    const std::string design_id = s.text("design", "horizontal");
    const std::uint64_t seed = s.seed("seed", 1);
    const auto reps = static_cast<std::size_t>(s.integer("reps", 10000));
    const auto n_grid = s.integers("n_grid", {1000});
    std::vector<std::array<double, 2>> alternatives;
    const json& alts = s.raw("alternatives");
    if (alts.is_null()) {
        alternatives.push_back({0.0, 0.0});
    } else {
        if (!alts.is_array()) {
            throw ConfigError("config: 'alternatives' must be an array of [mu1, mu0] pairs");
        }
        for (const auto& a : alts) {
            if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
                throw ConfigError("config: 'alternatives' must be an array of [mu1, mu0] pairs");
            }
            alternatives.push_back({a[1].get<double>(), a[0].get<double>()});
        }
    }
    const std::uint64_t table_seed = derive_seed(seed, 1);
    StudyDesign design;
    if (design_id == "horizontal") {
        HorizontalStudy h;
        h.gamma = s.number("gamma", h.gamma);
        h.pi = s.number("pi", h.pi);
        h.alpha = s.number("alpha", h.alpha);
        h.t_cap = s.number("t_cap", h.t_cap);
        h.table_reps = static_cast<std::size_t>(s.integer("table_reps", static_cast<long>(h.table_reps)));
        h.limit_dt = s.number("dt", h.limit_dt);
        h.table_seed = table_seed;
        s.finish();
        design = horizontal_study(h, Execution::parallel);
    } else if (design_id == "group_sequential") {
        GroupSequentialStudy g;
        Section rule = s.child("rule");
        const auto spec = parse_rule(std::move(rule));
        const auto* gs = std::get_if<GroupSequentialRule>(&spec);
        if (!gs) {
            throw ConfigError("config: design 'group_sequential' needs a group_sequential rule");
        }
        g.intervals = gs->intervals;
        g.stages = gs->stages;
        g.pi = s.number("pi", g.pi);
        g.alpha = s.number("alpha", g.alpha);
        g.table_reps = static_cast<std::size_t>(s.integer("table_reps", static_cast<long>(g.table_reps)));
        g.table_seed = table_seed;
        s.finish();
        design = group_sequential_study(g, Execution::parallel);
    } else if (design_id == "thompson") {
        ThompsonStudy t;
        t.batches = static_cast<int>(s.integer("batches", t.batches));
        t.alpha = s.number("alpha", t.alpha);
        t.table_reps = static_cast<std::size_t>(s.integer("table_reps", static_cast<long>(t.table_reps)));
        t.table_seed = table_seed;
        s.finish();
        design = thompson_study(t, Execution::parallel);
    } else {
        throw ConfigError("config: unknown design '" + design_id + "'");
    }
    const StudyResult result = monte_carlo_study(design, n_grid, alternatives, reps, derive_seed(seed, 2));
    const fs::path dir = prepare_out(o);
    write_csv(dir / "study.csv", study_csv(result), provenance_of("simulate", j, seed));
    for (const auto& r : result.rows) {
        std::printf("%s %s n=%ld mu=(%g, %g): rate %.5f se %.5f reps %zu%s%s\n", r.design.c_str(), r.test.c_str(), r.n,
                    r.mu1, r.mu0, r.rate, r.standard_error, r.reps, r.errors ? " errors: " : "",
                    r.errors ? r.error.c_str() : "");
    }
    return 0;
}

int cmd_replicate(const Options& o)
{
    const json j = effective_config(o);
    FigureReport report;
    std::uint64_t seed = 0;
    if (o.figure == "fig1") {
        const Fig1Config c = parse_fig1(Section(j, ""));
        seed = c.seed;
        report = replicate_fig1(c);
    } else if (o.figure == "fig2") {
        const Fig2Config c = parse_fig2(Section(j, ""));
        seed = c.seed;
        report = replicate_fig2(c);
    } else if (o.figure == "fig3") {
        const Fig3Config c = parse_fig3(Section(j, ""));
        seed = c.seed;
        report = replicate_fig3(c);
    } else {
        throw ConfigError("replicate: figure must be fig1, fig2 or fig3");
    }
    const fs::path dir = prepare_out(o);
    const Provenance prov = provenance_of("replicate " + o.figure, j, seed);
    for (const auto& p : report.panels) {
        write_csv(dir / p.file, p.table, prov);
        std::printf("wrote %s\n", (dir / p.file).string().c_str());
    }
    for (const auto& c : report.checks) {
        std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Inference after adaptive experiments: calibration, power envelopes and Monte Carlo studies"};
    app.set_version_flag("--version", std::string(seqinf::version));
    app.require_subcommand(1);
    Options o;

    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON config file");
        sub->add_option("--seed", o.seed, "Base seed (overrides config)");
        sub->add_option("--reps", o.reps, "Replications (overrides config)");
        sub->add_option("--dt", o.dt, "Time step of limit simulations (overrides config)");
        sub->add_option("--out", o.out, "Output directory")->capture_default_str();
        sub->add_option("--threads", o.threads, "Thread count or 'auto'")->capture_default_str();
    };
    auto* calibrate = app.add_subcommand("calibrate", "Build a null table and its thresholds");
    auto* envelope = app.add_subcommand("power-envelope", "NP power envelope over an alternative grid");
    auto* simulate = app.add_subcommand("simulate", "Finite-sample Monte Carlo study");
    auto* replicate = app.add_subcommand("replicate", "Regenerate figure data as CSV");
    for (auto* sub : {calibrate, envelope, simulate, replicate}) {
        add_common(sub);
    }
    replicate->add_option("figure", o.figure, "fig1, fig2 or fig3")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        apply_threads(o.threads);
        if (*calibrate) {
            return cmd_calibrate(o);
        }
        if (*envelope) {
            return cmd_power_envelope(o);
        }
        if (*simulate) {
            return cmd_simulate(o);
        }
        return cmd_replicate(o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: config: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
