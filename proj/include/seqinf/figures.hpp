#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "seqinf/csv.hpp"
#include "seqinf/parallel.hpp"
#include "seqinf/stopping.hpp"
#include "seqinf/study.hpp"

namespace seqinf {

/// A named pass/fail verdict printed by `seqinf replicate`.
struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Panel {
    std::string file;
    CsvTable table;
};

struct FigureReport {
    std::vector<Panel> panels;
    std::vector<Check> checks;
};

/// Horizontal boundary design with sqrt(3) Uniform errors and known unit
/// variances. The finite-sample cutoff for each n comes from a limit table
/// on the grid dt = 1/n (discrete monitoring); the envelope uses continuous
/// monitoring at `dt` with an independent seed.
struct Fig1Config {
    double gamma = 0.536;
    double pi = 0.5;
    double alpha = 0.05;
    double t_cap = 5.0;
    std::vector<long> n_grid{500, 2000, 10000};
    std::vector<double> mu_grid{0.0, 1.0, 2.0, 3.0, 4.0};
    std::size_t reps = 10000;
    std::size_t table_reps = 100000;
    double dt = 1e-4;
    std::uint64_t seed = 20230611;
    Execution execution = Execution::parallel;
};

/// Two-stage design with I_1 = [-2.797, 2.797], conditional spending
/// alpha_t = alpha P(tau = t) and one-sided thresholds. Finite samples
/// estimate sigma_a from stage 1.
struct Fig2Config {
    std::vector<Interval> intervals{{-2.797, 2.797}};
    int stages = 2;
    double pi = 0.5;
    double alpha = 0.05;
    std::array<double, 2> sigma{1.0, 1.0};
    std::vector<double> threshold_grid{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0};
    std::vector<long> n_grid{500, 2000};
    std::vector<double> size_grid{0.0, 1.0, 2.0, 3.0, 4.0};
    std::size_t reps = 200000;
    std::size_t table_reps = 4000000;
    std::uint64_t seed = 20230612;
    Execution execution = Execution::parallel;
};

/// Batched Thompson sampling, sigma_a = 1. Alternatives are on the mu = J mu_bar
/// scale.
struct Fig3Config {
    int batches = 10;
    double alpha = 0.05;
    std::vector<double> envelope_grid{-6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0};
    std::size_t envelope_reps = 200000;
    std::vector<double> asymmetry_grid{2.0, 4.0, 6.0};
    std::size_t asymmetry_reps = 1000000;
    std::vector<long> n_grid{20, 100};
    std::vector<double> mu_grid{2.0, 4.0, 6.0};
    std::size_t reps = 10000;
    std::size_t table_reps = 200000;
    std::uint64_t seed = 20230613;
    Execution execution = Execution::parallel;
};

FigureReport replicate_fig1(const Fig1Config& config);
FigureReport replicate_fig2(const Fig2Config& config);
FigureReport replicate_fig3(const Fig3Config& config);

/// Study designs shared by the figures and `seqinf simulate`.
struct HorizontalStudy {
    double gamma = 0.536;
    double pi = 0.5;
    double alpha = 0.05;
    double t_cap = 5.0;
    std::size_t table_reps = 100000;
    double limit_dt = 1e-4;
    std::uint64_t table_seed = 1;
    /// Also run the test calibrated on the continuous-monitoring table.
    bool include_limit_cutoff = true;
};
StudyDesign horizontal_study(const HorizontalStudy& spec, Execution execution);

struct GroupSequentialStudy {
    std::vector<Interval> intervals{{-2.797, 2.797}};
    int stages = 2;
    double pi = 0.5;
    double alpha = 0.05;
    /// Variances assumed by the limit calibration, by arm.
    std::array<double, 2> sigma{1.0, 1.0};
    std::size_t table_reps = 1000000;
    std::uint64_t table_seed = 1;
};
/// mu1 of a cell is the drifting null mu_bar; mu0 must be 0.
StudyDesign group_sequential_study(const GroupSequentialStudy& spec, Execution execution);

struct ThompsonStudy {
    int batches = 10;
    double alpha = 0.05;
    std::size_t table_reps = 200000;
    std::uint64_t table_seed = 1;
};
/// Cell alternatives are (mu1, mu0) on the J mu_bar scale.
StudyDesign thompson_study(const ThompsonStudy& spec, Execution execution);

} // namespace seqinf
