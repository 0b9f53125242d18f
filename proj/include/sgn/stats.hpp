#pragma once

#include <cmath>

namespace sgn {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Standard normal density.
inline double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

/// Standard normal CDF, computed from erfc so both tails keep full relative accuracy.
double normal_cdf(double z);

/// Inverse standard normal CDF for 0 < u < 1.
double normal_quantile(double u);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Inverse CDF of the χ² distribution with `dof` degrees of freedom.
double chi2_quantile(int dof, double level);

}  // namespace sgn
