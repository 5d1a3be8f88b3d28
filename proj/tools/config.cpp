#include "config.hpp"

#include <fstream>

#include "seqinf/error.hpp"

namespace seqinf::cli {

Section::Section(const json& value, std::string path) : value_(value), path_(std::move(path))
{
    if (value_.is_null()) {
        value_ = json::object();
    }
    if (!value_.is_object()) {
        throw ConfigError("config: '" + path_ + "' must be an object");
    }
}

bool Section::has(const std::string& key) const
{
    return value_.contains(key);
}

const json* Section::find(const std::string& key)
{
    const auto it = value_.find(key);
    if (it == value_.end()) {
        return nullptr;
    }
    used_.insert(key);
    return &*it;
}

namespace {

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

} // namespace

double Section::number(const std::string& key, double fallback)
{
    const json* v = find(key);
    if (!v) {
        return fallback;
    }
    if (!v->is_number()) {
        throw ConfigError("config: '" + join(path_, key) + "' must be a number");
    }
    return v->get<double>();
}

long Section::integer(const std::string& key, long fallback)
{
    const json* v = find(key);
    if (!v) {
        return fallback;
    }
    if (!v->is_number_integer()) {
        throw ConfigError("config: '" + join(path_, key) + "' must be an integer");
    }
    return v->get<long>();
}

std::uint64_t Section::seed(const std::string& key, std::uint64_t fallback)
{
    const json* v = find(key);
    if (!v) {
        return fallback;
    }
    if (!v->is_number_unsigned()) {
        throw ConfigError("config: '" + join(path_, key) + "' must be a non-negative integer");
    }
    return v->get<std::uint64_t>();
}

std::string Section::text(const std::string& key, const std::string& fallback)
{
    const json* v = find(key);
    if (!v) {
        return fallback;
    }
    if (!v->is_string()) {
        throw ConfigError("config: '" + join(path_, key) + "' must be a string");
    }
    return v->get<std::string>();
}

std::vector<double> Section::numbers(const std::string& key, const std::vector<double>& fallback)
{
    const json* v = find(key);
    if (!v) {
        return fallback;
    }
    std::vector<double> out;
    if (!v->is_array()) {
        throw ConfigError("config: '" + join(path_, key) + "' must be an array of numbers");
    }
    for (const auto& e : *v) {
        if (!e.is_number()) {
            throw ConfigError("config: '" + join(path_, key) + "' must be an array of numbers");
        }
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<long> Section::integers(const std::string& key, const std::vector<long>& fallback)
{
    const json* v = find(key);
    if (!v) {
        return fallback;
    }
    std::vector<long> out;
    if (!v->is_array()) {
        throw ConfigError("config: '" + join(path_, key) + "' must be an array of integers");
    }
    for (const auto& e : *v) {
        if (!e.is_number_integer()) {
            throw ConfigError("config: '" + join(path_, key) + "' must be an array of integers");
        }
        out.push_back(e.get<long>());
    }
    return out;
}

Section Section::child(const std::string& key)
{
    const json* v = find(key);
    return Section(v ? *v : json::object(), join(path_, key));
}

const json& Section::raw(const std::string& key)
{
    static const json null_value;
    const json* v = find(key);
    return v ? *v : null_value;
}

void Section::finish() const
{
    for (auto it = value_.begin(); it != value_.end(); ++it) {
        if (!used_.count(it.key())) {
            throw ConfigError("config: unknown key '" + join(path_, it.key()) + "'");
        }
    }
}

json load_config(const std::filesystem::path& path)
{
    if (path.empty()) {
        return json::object();
    }
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open '" + path.string() + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: '" + path.string() + "': " + e.what());
    }
}

Monitoring parse_monitoring(const std::string& text)
{
    if (text == "continuous") {
        return Monitoring::continuous;
    }
    if (text == "discrete") {
        return Monitoring::discrete;
    }
    throw ConfigError("config: monitoring must be 'continuous' or 'discrete', got '" + text + "'");
}

namespace {

std::vector<Interval> parse_intervals(Section& s, const std::vector<Interval>& fallback)
{
    const json& v = s.raw("intervals");
    if (v.is_null()) {
        return fallback;
    }
    std::vector<Interval> out;
    if (!v.is_array()) {
        throw ConfigError("config: '" + s.path() + ".intervals' must be an array of [lo, hi] pairs");
    }
    for (const auto& e : v) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw ConfigError("config: '" + s.path() + ".intervals' must be an array of [lo, hi] pairs");
        }
        out.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return out;
}

Execution parse_execution(Section& s)
{
    const std::string e = s.text("execution", "parallel");
    if (e == "parallel") {
        return Execution::parallel;
    }
    if (e == "serial") {
        return Execution::serial;
    }
    throw ConfigError("config: execution must be 'parallel' or 'serial'");
}

std::size_t count(Section& s, const std::string& key, std::size_t fallback)
{
    const long v = s.integer(key, static_cast<long>(fallback));
    if (v < 1) {
        throw ConfigError("config: '" + s.path() + (s.path().empty() ? "" : ".") + key + "' must be positive");
    }
    return static_cast<std::size_t>(v);
}

} // namespace

StoppingRuleSpec parse_rule(Section s)
{
    const std::string type = s.text("type", "horizontal");
    StoppingRuleSpec rule;
    if (type == "horizontal") {
        HorizontalRule r;
        r.gamma = s.number("gamma", r.gamma);
        r.t_cap = s.number("t_cap", r.t_cap);
        rule = r;
    } else if (type == "group_sequential") {
        GroupSequentialRule r;
        r.intervals = parse_intervals(s, {{-2.797, 2.797}});
        r.stages = static_cast<int>(s.integer("stages", 2));
        rule = r;
    } else if (type == "fixed_time") {
        FixedTimeRule r;
        r.t = s.number("t", r.t);
        rule = r;
    } else {
        throw ConfigError("config: unknown rule type '" + type + "'");
    }
    s.finish();
    validate(rule);
    return rule;
}

BatchedPolicySpec parse_policy(Section s)
{
    const std::string type = s.text("type", "thompson");
    BatchedPolicySpec policy;
    if (type == "thompson") {
        policy = ThompsonPolicy{static_cast<int>(s.integer("batches", 10))};
    } else if (type == "fixed_allocation") {
        FixedAllocationPolicy p;
        p.batches = static_cast<int>(s.integer("batches", 1));
        p.pi1 = s.number("pi1", p.pi1);
        p.pi0 = s.number("pi0", p.pi0);
        policy = p;
    } else {
        throw ConfigError("config: unknown policy type '" + type + "'");
    }
    s.finish();
    validate(policy);
    return policy;
}

Fig1Config parse_fig1(Section s)
{
    Fig1Config c;
    c.gamma = s.number("gamma", c.gamma);
    c.pi = s.number("pi", c.pi);
    c.alpha = s.number("alpha", c.alpha);
    c.t_cap = s.number("t_cap", c.t_cap);
    c.n_grid = s.integers("n_grid", c.n_grid);
    c.mu_grid = s.numbers("mu_grid", c.mu_grid);
    c.reps = count(s, "reps", c.reps);
    c.table_reps = count(s, "table_reps", c.table_reps);
    c.dt = s.number("dt", c.dt);
    c.seed = s.seed("seed", c.seed);
    c.execution = parse_execution(s);
    s.finish();
    return c;
}

Fig2Config parse_fig2(Section s)
{
    Fig2Config c;
    c.intervals = parse_intervals(s, c.intervals);
    c.stages = static_cast<int>(s.integer("stages", c.stages));
    c.pi = s.number("pi", c.pi);
    c.alpha = s.number("alpha", c.alpha);
    const auto sigma = s.numbers("sigma", {c.sigma[0], c.sigma[1]});
    if (sigma.size() != 2) {
        throw ConfigError("config: 'sigma' must be [sigma0, sigma1]");
    }
    c.sigma = {sigma[0], sigma[1]};
    c.threshold_grid = s.numbers("threshold_grid", c.threshold_grid);
    c.n_grid = s.integers("n_grid", c.n_grid);
    c.size_grid = s.numbers("size_grid", c.size_grid);
    c.reps = count(s, "reps", c.reps);
    c.table_reps = count(s, "table_reps", c.table_reps);
    c.seed = s.seed("seed", c.seed);
    c.execution = parse_execution(s);
    s.finish();
    return c;
}

Fig3Config parse_fig3(Section s)
{
    Fig3Config c;
    c.batches = static_cast<int>(s.integer("batches", c.batches));
    c.alpha = s.number("alpha", c.alpha);
    c.envelope_grid = s.numbers("envelope_grid", c.envelope_grid);
    c.envelope_reps = count(s, "envelope_reps", c.envelope_reps);
    c.asymmetry_grid = s.numbers("asymmetry_grid", c.asymmetry_grid);
    c.asymmetry_reps = count(s, "asymmetry_reps", c.asymmetry_reps);
    c.n_grid = s.integers("n_grid", c.n_grid);
    c.mu_grid = s.numbers("mu_grid", c.mu_grid);
    c.reps = count(s, "reps", c.reps);
    c.table_reps = count(s, "table_reps", c.table_reps);
    c.seed = s.seed("seed", c.seed);
    c.execution = parse_execution(s);
    s.finish();
    return c;
}

} // namespace seqinf::cli
