#pragma once

#include <filesystem>

#include "seqinf/calibration.hpp"

namespace seqinf {

// Binary tables are little-endian with a fixed header followed by fixed-size
// records. Any I/O or format problem throws CalibrationError.

void write_null_table(const NullTable& table, const std::filesystem::path& path);
NullTable read_null_table(const std::filesystem::path& path);

void write_threshold_table(const ThresholdTable& table, const std::filesystem::path& path);
ThresholdTable read_threshold_table(const std::filesystem::path& path);

} // namespace seqinf
