#pragma once

namespace qrng {

/// Complementary error function.
double erfc(double x);

/// Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a), a > 0, x >= 0.
/// This is the χ² tail used for p-values: P(χ²_k > x) = Q(k/2, x/2).
double igamc(double a, double x);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace qrng
