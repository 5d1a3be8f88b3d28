#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "seqinf/batched_policy.hpp"
#include "seqinf/figures.hpp"
#include "seqinf/stopping.hpp"

namespace seqinf::cli {

using nlohmann::json;

/// Reads a JSON object key by key and rejects anything left unread, so a
/// misspelt key is an error rather than a silently ignored setting.
class Section {
public:
    Section(const json& value, std::string path);

    bool has(const std::string& key) const;
    double number(const std::string& key, double fallback);
    long integer(const std::string& key, long fallback);
    std::uint64_t seed(const std::string& key, std::uint64_t fallback);
    std::string text(const std::string& key, const std::string& fallback);
    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
    std::vector<long> integers(const std::string& key, const std::vector<long>& fallback);
    /// Nested object; an absent key yields an empty section.
    Section child(const std::string& key);
    const json& raw(const std::string& key);
    /// Throws ConfigError naming the first unread key.
    void finish() const;

    const std::string& path() const { return path_; }

private:
    const json* find(const std::string& key);
    json value_;
    std::string path_;
    std::set<std::string> used_;
};

/// Empty path yields an empty object. Parse errors become ConfigError.
json load_config(const std::filesystem::path& path);

StoppingRuleSpec parse_rule(Section section);
BatchedPolicySpec parse_policy(Section section);
Monitoring parse_monitoring(const std::string& text);

Fig1Config parse_fig1(Section section);
Fig2Config parse_fig2(Section section);
Fig3Config parse_fig3(Section section);

} // namespace seqinf::cli
