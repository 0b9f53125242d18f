#include "sgn/stats.hpp"

#include <cmath>
#include <limits>

#include "sgn/errors.hpp"

namespace sgn {

double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw ContractError("normal_quantile: argument must lie in (0, 1)");
  // 1 − u is exact for u > 0.5; the lower tail keeps full relative accuracy.
  if (u > 0.5) return -normal_quantile(1.0 - u);

  // Acklam's rational approximation, then one Halley step against erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double lo = 0.02425;

  double x;
  if (u < lo) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = normal_cdf(x) - u;
  const double step = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - step / (1.0 + 0.5 * x * step);
}

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw ContractError("gamma_p: shape must be positive");
  if (x <= 0.0) return 0.0;
  constexpr int kMaxIter = 1000;
  constexpr double kEps = 1e-16;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);

  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxIter; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(log_prefix);
  }

  // Upper tail via the Lentz continued fraction.
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double bb = x + 1.0 - a;
  double cc = 1.0 / tiny;
  double dd = 1.0 / bb;
  double h = dd;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    bb += 2.0;
    dd = an * dd + bb;
    if (std::fabs(dd) < tiny) dd = tiny;
    cc = bb + an / cc;
    if (std::fabs(cc) < tiny) cc = tiny;
    dd = 1.0 / dd;
    const double del = dd * cc;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return 1.0 - std::exp(log_prefix) * h;
}

double chi2_quantile(int dof, double level) {
  if (dof < 1) throw ContractError("chi2_quantile: degrees of freedom must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw ContractError("chi2_quantile: level must lie in (0, 1)");
  const double shape = 0.5 * dof;
  auto cdf = [&](double x) { return gamma_p(shape, 0.5 * x); };

  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(dof));
  while (cdf(hi) < level) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sgn
