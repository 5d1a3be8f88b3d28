#include "seqinf/study.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>

#include "seqinf/error.hpp"
#include "seqinf/rng.hpp"

namespace seqinf {

namespace {

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

auto row_key(const StudyRow& r)
{
    return std::tie(r.design, r.test, r.n, r.mu1, r.mu0);
}

} // namespace

void StudyResult::sort_canonical()
{
    std::stable_sort(rows.begin(), rows.end(),
                     [](const StudyRow& a, const StudyRow& b) { return row_key(a) < row_key(b); });
}

const StudyRow& StudyResult::find(const std::string& design, const std::string& test, long n, double mu1,
                                  double mu0) const
{
    for (const auto& r : rows) {
        if (r.design == design && r.test == test && r.n == n && r.mu1 == mu1 && r.mu0 == mu0) {
            return r;
        }
    }
    throw ConfigError("study result: no row for " + design + "/" + test);
}

std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& design_id, const CellContext& cell)
{
    std::uint64_t h = fnv1a(design_id);
    h = splitmix64(h ^ static_cast<std::uint64_t>(cell.n));
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(cell.mu1));
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(cell.mu0));
    return derive_seed(base_seed, h);
}

StudyResult monte_carlo_study(const StudyDesign& design, std::span<const long> n_grid,
                              std::span<const std::array<double, 2>> alternatives, std::size_t reps,
                              std::uint64_t base_seed, Execution execution)
{
    if (reps < 100) {
        throw ConfigError("monte_carlo_study: reps must be >= 100");
    }
    if (!design.simulate || !design.tests) {
        throw ConfigError("monte_carlo_study: design '" + design.id + "' is incomplete");
    }
    StudyResult result;
    for (const long n : n_grid) {
        for (const auto& alt : alternatives) {
            const CellContext cell{n, alt[1], alt[0]};
            const std::uint64_t seed = cell_seed(base_seed, design.id, cell);

            std::vector<StudyTest> tests;
            std::string setup_error;
            try {
                tests = design.tests(cell);
            } catch (const Error& e) {
                setup_error = e.what();
            }
            if (!setup_error.empty()) {
                StudyRow row;
                row.design = design.id;
                row.test = "*";
                row.n = n;
                row.mu1 = cell.mu1;
                row.mu0 = cell.mu0;
                row.rate = std::numeric_limits<double>::quiet_NaN();
                row.standard_error = row.rate;
                row.seed = seed;
                row.error = setup_error;
                result.rows.push_back(std::move(row));
                continue;
            }

            // Per-replication verdicts: bit 0 = counted, bit 1 = rejected, per test.
            const std::size_t k = tests.size();
            std::vector<std::uint8_t> verdict(reps * k, 0);
            std::vector<std::optional<std::string>> failures(reps);
            for_each_index(reps, execution, [&](std::size_t r) {
                try {
                    const Observation obs = design.simulate(cell, replication_seed(seed, r));
                    for (std::size_t j = 0; j < k; ++j) {
                        const auto& t = tests[j];
                        if (t.condition && !t.condition(obs)) {
                            continue;
                        }
                        verdict[r * k + j] = static_cast<std::uint8_t>(1 | (t.reject(obs) ? 2 : 0));
                    }
                } catch (const Error& e) {
                    failures[r] = e.what();
                }
            });

            std::size_t errors = 0;
            std::string first_error;
            for (const auto& f : failures) {
                if (f) {
                    if (errors++ == 0) {
                        first_error = *f;
                    }
                }
            }
            for (std::size_t j = 0; j < k; ++j) {
                StudyRow row;
                row.design = design.id;
                row.test = tests[j].id;
                row.n = n;
                row.mu1 = cell.mu1;
                row.mu0 = cell.mu0;
                row.seed = seed;
                row.errors = errors;
                row.error = first_error;
                for (std::size_t r = 0; r < reps; ++r) {
                    const std::uint8_t v = verdict[r * k + j];
                    row.reps += v & 1;
                    row.rejections += (v >> 1) & 1;
                }
                if (row.reps > 0) {
                    const double m = static_cast<double>(row.reps);
                    row.rate = static_cast<double>(row.rejections) / m;
                    row.standard_error = std::sqrt(row.rate * (1.0 - row.rate) / m);
                } else {
                    row.rate = std::numeric_limits<double>::quiet_NaN();
                    row.standard_error = row.rate;
                }
                result.rows.push_back(std::move(row));
            }
        }
    }
    result.sort_canonical();
    return result;
}

} // namespace seqinf
