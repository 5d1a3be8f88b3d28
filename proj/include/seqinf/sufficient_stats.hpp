#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "seqinf/diffusion.hpp"

namespace seqinf {

/// Per-arm influence values psi_a(Y_i) in arrival order; arm1 is the
/// treatment arm. For mean functionals psi(Y) = Y.
struct InfluenceStream {
    std::vector<double> arm1;
    std::vector<double> arm0;
};

/// sigma^2 = sigma1^2 / pi + sigma0^2 / (1 - pi).
double two_sample_sigma(double pi, double sigma1, double sigma0);

/// Neyman allocation pi* = sigma1 / (sigma1 + sigma0).
double neyman_allocation(double sigma1, double sigma0);

/// x_n(t) = sigma^{-1} [ (pi sqrt n)^{-1} sum_{i <= floor(n pi t)} psi_1
///                     - ((1-pi) sqrt n)^{-1} sum_{i <= floor(n (1-pi) t)} psi_0 ].
/// Throws DomainError for pi outside (0, 1), DataError when an arm has too
/// few observations.
double two_sample_eif_process(const InfluenceStream& stream, double pi, double sigma1, double sigma0, long n,
                              double t);

/// x~(t) = sigma^{-1} a' I^{-1/2} x(t) with sigma^2 = a' I^{-1} a, applied to
/// every row of `path` (one d-vector per time point). Throws NumericError if
/// `information` is not symmetric positive definite, DomainError if a = 0.
std::vector<double> project_linear_combination(std::span<const Eigen::VectorXd> path, const Eigen::VectorXd& a,
                                               const Eigen::MatrixXd& information);

/// Advance (q, x) by one batch: q_a += pi_a, x_a += (sigma_a sqrt n)^{-1} sum psi_a.
/// outcomes[a] must hold floor(n pi_a) values. Throws DomainError when
/// pi_1 + pi_0 > 1 and DataError on an outcome count mismatch.
BatchedState batched_state_update(const BatchedState& state, const std::array<std::span<const double>, 2>& outcomes,
                                  const std::array<double, 2>& allocation, const std::array<double, 2>& sigma, long n);

/// Number of outcomes arm a contributes in a batch of size n: floor(n pi_a).
long batch_outcome_count(long n, double allocation);

enum class VarianceMethod { first_batch, running };

struct VarianceEstimate {
    double value = 0.0;
    VarianceMethod method = VarianceMethod::running;
    std::size_t sample_size = 0;
};

/// Mean of squares minus squared mean. `running` uses every value;
/// `first_batch` uses only the first `first_batch_size` values. Throws
/// DataError with fewer than two usable values.
VarianceEstimate estimate_variance(std::span<const double> values, VarianceMethod method,
                                   std::size_t first_batch_size = 0);

/// Sum and sum of squares of a prefix; the running estimator's state.
class RunningMoments {
public:
    void add(double v) noexcept
    {
        ++count_;
        sum_ += v;
        sum_sq_ += v * v;
    }
    std::size_t count() const noexcept { return count_; }
    double mean() const noexcept { return count_ ? sum_ / static_cast<double>(count_) : 0.0; }
    double sum() const noexcept { return sum_; }
    /// Plug-in (1/m) variance.
    double variance() const noexcept;
    /// Unbiased (1/(m-1)) variance.
    double sample_variance() const noexcept;

private:
    std::size_t count_ = 0;
    double sum_ = 0.0;
    double sum_sq_ = 0.0;
};

} // namespace seqinf
