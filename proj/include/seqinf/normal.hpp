#pragma once

namespace seqinf {

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

/// Standard normal quantile (Wichura's AS241, ~1e-16 relative accuracy).
/// Returns -inf/+inf at p = 0/1 and NaN outside [0, 1].
double normal_quantile(double p) noexcept;

} // namespace seqinf
