#pragma once

namespace rsde {

/// Standard normal density.
double std_normal_pdf(double x);

/// Φ(x), computed through erfc so both tails keep full relative accuracy.
double std_normal_cdf(double x);

/// Φ⁻¹(p) for p ∈ (0, 1). Rational initial guess (Acklam) polished by Halley
/// steps on the cdf. Throws RangeError outside (0, 1).
double std_normal_quantile(double p);

}  // namespace rsde
