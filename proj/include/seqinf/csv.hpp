#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <string>
#include <vector>

#include "seqinf/calibration.hpp"
#include "seqinf/study.hpp"

namespace seqinf {

/// Header plus rows of already-formatted cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Throws ConfigError when the row width differs from the header.
    void add_row(std::vector<std::string> row);
    /// Index of a header column; throws ConfigError if absent.
    std::size_t column(const std::string& name) const;
};

/// Written as the first line: "# seqinf <version> config_hash=<hex> seed=<u64>".
struct Provenance {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

/// Shortest round-trip decimal; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);
std::string format_bool(bool v);

std::string to_csv(const CsvTable& table, const Provenance& provenance);
/// Throws CalibrationError on I/O failure.
void write_csv(const std::filesystem::path& path, const CsvTable& table, const Provenance& provenance);
/// Skips '#' comment lines. No quoting support; cells must not contain commas.
CsvTable read_csv(const std::filesystem::path& path);

CsvTable study_csv(const StudyResult& result);
CsvTable power_curve_csv(const PowerCurve& curve);
CsvTable threshold_csv(const ThresholdTable& table);

/// FNV-1a 64 over arbitrary text (config hashes).
std::uint64_t fnv1a64(std::string_view text) noexcept;

} // namespace seqinf
