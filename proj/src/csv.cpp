#include "seqinf/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "seqinf/error.hpp"
#include "seqinf/version.hpp"

namespace seqinf {

void CsvTable::add_row(std::vector<std::string> row)
{
    if (row.size() != header.size()) {
        throw ConfigError("csv: row has " + std::to_string(row.size()) + " cells, header has " +
                          std::to_string(header.size()));
    }
    rows.push_back(std::move(row));
}

std::size_t CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw ConfigError("csv: no column '" + name + "'");
}

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_bool(bool v)
{
    return v ? "1" : "0";
}

std::uint64_t fnv1a64(std::string_view text) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_csv(const CsvTable& table, const Provenance& provenance)
{
    std::string out;
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(provenance.config_hash));
    out += "# seqinf " + std::string(version) + " config_hash=" + hash +
           " seed=" + std::to_string(provenance.seed) + "\n";
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += cells[i];
        }
        out += '\n';
    };
    emit(table.header);
    for (const auto& r : table.rows) {
        emit(r);
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table, const Provenance& provenance)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw CalibrationError("cannot open '" + path.string() + "' for writing");
    }
    out << to_csv(table, provenance);
    if (!out) {
        throw CalibrationError("write failed for '" + path.string() + "'");
    }
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CalibrationError("cannot open '" + path.string() + "'");
    }
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
        } else if (cells.size() != table.header.size()) {
            throw CalibrationError("'" + path.string() + "': ragged row");
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

CsvTable study_csv(const StudyResult& result)
{
    CsvTable t;
    t.header = {"design", "test", "n", "mu1", "mu0", "rejection_rate", "se", "reps", "rejections", "errors", "seed"};
    for (const auto& r : result.rows) {
        t.add_row({r.design, r.test, std::to_string(r.n), format_double(r.mu1), format_double(r.mu0),
                   format_double(r.rate), format_double(r.standard_error), std::to_string(r.reps),
                   std::to_string(r.rejections), std::to_string(r.errors), std::to_string(r.seed)});
    }
    return t;
}

CsvTable power_curve_csv(const PowerCurve& curve)
{
    CsvTable t;
    t.header = {"mu1", "mu0", "power", "se", "degenerate", "alpha", "reps"};
    for (std::size_t i = 0; i < curve.mu.size(); ++i) {
        t.add_row({format_double(curve.mu[i]), format_double(curve.mu0[i]), format_double(curve.power[i]),
                   format_double(curve.standard_error[i]), format_bool(curve.degenerate[i]),
                   format_double(curve.alpha), std::to_string(curve.reps)});
    }
    return t;
}

CsvTable threshold_csv(const ThresholdTable& table)
{
    static const char* modes[] = {"always_reject", "one_sided", "two_sided"};
    CsvTable t;
    t.header = {"stage", "mode", "lower", "upper", "p_stop", "alpha_t", "draws", "symmetric"};
    for (const auto& s : table.stages) {
        t.add_row({std::to_string(s.stage), modes[static_cast<int>(s.mode)], format_double(s.lower),
                   format_double(s.upper), format_double(s.p_stop), format_double(s.alpha_t),
                   std::to_string(s.draws), format_bool(s.symmetric)});
    }
    return t;
}

} // namespace seqinf
