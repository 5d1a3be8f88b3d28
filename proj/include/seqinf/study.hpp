#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "seqinf/diffusion.hpp"
#include "seqinf/experiments.hpp"
#include "seqinf/parallel.hpp"

namespace seqinf {

/// One replication's output, whatever the design.
using Observation = std::variant<HorizontalResult, GroupSequentialResult, BatchedState>;

/// A cell of the study grid. Alternatives are on the local scale.
struct CellContext {
    long n = 0;
    double mu1 = 0.0;
    double mu0 = 0.0;
};

struct StudyTest {
    std::string id;
    std::function<bool(const Observation&)> reject;
    /// Optional: restrict the rate to replications satisfying this (e.g. a
    /// given stopping stage). Empty means every replication counts.
    std::function<bool(const Observation&)> condition;
};

struct StudyDesign {
    std::string id;
    std::function<Observation(const CellContext&, std::uint64_t seed)> simulate;
    /// Builds the calibrated tests of a cell. Called once per cell, before any
    /// replication runs.
    std::function<std::vector<StudyTest>(const CellContext&)> tests;
};

struct StudyRow {
    std::string design;
    std::string test;
    long n = 0;
    double mu1 = 0.0;
    double mu0 = 0.0;
    double rate = 0.0;
    double standard_error = 0.0;
    /// Replications entering the rate (after any condition and errors).
    std::size_t reps = 0;
    std::size_t rejections = 0;
    std::size_t errors = 0;
    std::uint64_t seed = 0;
    /// First error message seen in the cell, if any.
    std::string error;
};

struct StudyResult {
    std::vector<StudyRow> rows;

    /// Order by (design, test, n, mu1, mu0).
    void sort_canonical();
    /// Throws ConfigError if no row matches.
    const StudyRow& find(const std::string& design, const std::string& test, long n, double mu1,
                         double mu0 = 0.0) const;
};

/// Seed of a cell, derived from the base seed and the cell's coordinates (not
/// its position in the grid).
std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& design_id, const CellContext& cell);

/// Full factorial over n_grid x alternatives. Replication r of a cell uses
/// replication_seed(cell_seed, r). Replication errors are counted and the
/// replication is dropped; a failing test factory marks every row of the cell
/// with NaN rates. Throws ConfigError if reps < 100.
StudyResult monte_carlo_study(const StudyDesign& design, std::span<const long> n_grid,
                              std::span<const std::array<double, 2>> alternatives, std::size_t reps,
                              std::uint64_t base_seed, Execution execution = Execution::parallel);

} // namespace seqinf
