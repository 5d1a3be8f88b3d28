#include "seqinf/sufficient_stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqinf/error.hpp"

namespace seqinf {

namespace {

void check_pi(double pi)
{
    if (!(pi > 0.0 && pi < 1.0)) {
        throw DomainError("sampling fraction pi must lie in (0, 1), got " + std::to_string(pi));
    }
}

double prefix_sum(std::span<const double> values, std::size_t count)
{
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        s += values[i];
    }
    return s;
}

} // namespace

double two_sample_sigma(double pi, double sigma1, double sigma0)
{
    check_pi(pi);
    return std::sqrt(sigma1 * sigma1 / pi + sigma0 * sigma0 / (1.0 - pi));
}

double neyman_allocation(double sigma1, double sigma0)
{
    if (!(sigma1 > 0.0) || !(sigma0 > 0.0)) {
        throw DomainError("neyman allocation: standard deviations must be positive");
    }
    return sigma1 / (sigma1 + sigma0);
}

double two_sample_eif_process(const InfluenceStream& stream, double pi, double sigma1, double sigma0, long n,
                              double t)
{
    check_pi(pi);
    if (n < 1 || t < 0.0) {
        throw DomainError("two_sample_eif_process: need n >= 1 and t >= 0");
    }
    const double nd = static_cast<double>(n);
    const auto count1 = static_cast<std::size_t>(std::floor(nd * pi * t));
    const auto count0 = static_cast<std::size_t>(std::floor(nd * (1.0 - pi) * t));
    if (stream.arm1.size() < count1 || stream.arm0.size() < count0) {
        throw DataError("two_sample_eif_process: insufficient observations for t = " + std::to_string(t));
    }
    const double sigma = two_sample_sigma(pi, sigma1, sigma0);
    const double root_n = std::sqrt(nd);
    const double s1 = prefix_sum(stream.arm1, count1) / (pi * root_n);
    const double s0 = prefix_sum(stream.arm0, count0) / ((1.0 - pi) * root_n);
    return (s1 - s0) / sigma;
}

std::vector<double> project_linear_combination(std::span<const Eigen::VectorXd> path, const Eigen::VectorXd& a,
                                               const Eigen::MatrixXd& information)
{
    const auto d = information.rows();
    if (information.cols() != d || a.size() != d) {
        throw DomainError("project_linear_combination: dimension mismatch");
    }
    if (a.isZero(0.0)) {
        throw DomainError("project_linear_combination: a must be non-zero");
    }
    if (!information.isApprox(information.transpose(), 1e-12)) {
        throw NumericError("project_linear_combination: information matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(information);
    if (eig.info() != Eigen::Success) {
        throw NumericError("project_linear_combination: eigendecomposition failed");
    }
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double scale = std::max(std::fabs(lambda.maxCoeff()), 1.0);
    if (lambda.minCoeff() <= 1e-12 * scale) {
        throw NumericError("project_linear_combination: information matrix is singular");
    }
    const Eigen::MatrixXd& v = eig.eigenvectors();
    const Eigen::MatrixXd inv_sqrt = v * lambda.cwiseInverse().cwiseSqrt().asDiagonal() * v.transpose();
    const Eigen::MatrixXd inv = v * lambda.cwiseInverse().asDiagonal() * v.transpose();
    const double sigma = std::sqrt(a.dot(inv * a));
    const Eigen::RowVectorXd weights = (a.transpose() * inv_sqrt) / sigma;

    std::vector<double> out;
    out.reserve(path.size());
    for (const auto& x : path) {
        if (x.size() != d) {
            throw DomainError("project_linear_combination: path point has wrong dimension");
        }
        out.push_back(weights.dot(x));
    }
    return out;
}

long batch_outcome_count(long n, double allocation)
{
    return static_cast<long>(std::floor(static_cast<double>(n) * allocation));
}

BatchedState batched_state_update(const BatchedState& state, const std::array<std::span<const double>, 2>& outcomes,
                                  const std::array<double, 2>& allocation, const std::array<double, 2>& sigma, long n)
{
    if (n < 1) {
        throw DomainError("batched_state_update: n must be >= 1");
    }
    for (int a = 0; a < 2; ++a) {
        if (!(allocation[a] >= 0.0 && allocation[a] <= 1.0)) {
            throw DomainError("batched_state_update: allocation outside [0, 1]");
        }
        if (!(sigma[a] > 0.0)) {
            throw DomainError("batched_state_update: sigma must be positive");
        }
    }
    // Tolerate rounding in pi_1 + (1 - pi_1).
    if (allocation[0] + allocation[1] > 1.0 + 1e-12) {
        throw DomainError("batched_state_update: allocations sum to more than 1");
    }
    BatchedState next = state;
    const double root_n = std::sqrt(static_cast<double>(n));
    for (int a = 0; a < 2; ++a) {
        const long expected = batch_outcome_count(n, allocation[a]);
        if (static_cast<long>(outcomes[a].size()) != expected) {
            throw DataError("batched_state_update: arm " + std::to_string(a) + " supplied " +
                            std::to_string(outcomes[a].size()) + " outcomes, expected " + std::to_string(expected));
        }
        next.q[a] += allocation[a];
        next.x[a] += prefix_sum(outcomes[a], outcomes[a].size()) / (sigma[a] * root_n);
    }
    next.batches += 1;
    return next;
}

double RunningMoments::variance() const noexcept
{
    if (count_ == 0) {
        return 0.0;
    }
    const double m = mean();
    return std::max(0.0, sum_sq_ / static_cast<double>(count_) - m * m);
}

double RunningMoments::sample_variance() const noexcept
{
    if (count_ < 2) {
        return 0.0;
    }
    const double m = static_cast<double>(count_);
    return variance() * m / (m - 1.0);
}

VarianceEstimate estimate_variance(std::span<const double> values, VarianceMethod method,
                                   std::size_t first_batch_size)
{
    std::size_t used = values.size();
    if (method == VarianceMethod::first_batch) {
        if (first_batch_size > values.size()) {
            throw DataError("estimate_variance: first batch larger than the sample");
        }
        used = first_batch_size;
    }
    if (used < 2) {
        throw DataError("estimate_variance: need at least two values");
    }
    // Two-pass form: exact zero for constant input, permutation-stable.
    double mean = 0.0;
    for (std::size_t i = 0; i < used; ++i) {
        mean += values[i];
    }
    mean /= static_cast<double>(used);
    double ss = 0.0;
    for (std::size_t i = 0; i < used; ++i) {
        const double d = values[i] - mean;
        ss += d * d;
    }
    return {ss / static_cast<double>(used), method, used};
}

} // namespace seqinf
