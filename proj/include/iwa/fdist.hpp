#pragma once

#include <cmath>
#include <limits>

#include "iwa/error.hpp"

namespace iwa {

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz evaluation. Converges fast
// for x < (a + 1) / (a + b + 2); callers use the symmetry relation otherwise.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-12;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error(ErrorKind::Domain, "incomplete beta continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in [0, 1].
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::Domain, "incomplete_beta: shape parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::Domain, "incomplete_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// CDF of the F(df1, df2) distribution.
inline double f_cdf(double x, double df1, double df2) {
  if (!(df1 > 0.0) || !(df2 > 0.0)) throw Error(ErrorKind::Domain, "f_cdf: degrees of freedom must be positive");
  if (std::isnan(x)) throw Error(ErrorKind::Domain, "f_cdf: NaN argument");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double z = df1 * x;
  return incomplete_beta(0.5 * df1, 0.5 * df2, z / (z + df2));
}

/// Upper-alpha quantile of F(df1, df2): the value c with P(F > c) = alpha.
///
/// Brackets the root by doubling, then bisects on the CDF (at most 200
/// halvings, stopping once the bracket is below double resolution).
inline double f_critical(double alpha, int df1, int df2) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::Domain, "f_critical: alpha must lie in (0, 1)");
  if (df1 <= 0 || df2 <= 0) throw Error(ErrorKind::Domain, "f_critical: degrees of freedom must be positive");
  const double target = 1.0 - alpha;
  const double d1 = df1;
  const double d2 = df2;

  double lo = 0.0;
  double hi = 1.0;
  while (f_cdf(hi, d1, d2) < target) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw Error(ErrorKind::Domain, "f_critical: quantile overflow");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f_cdf(mid, d1, d2) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace iwa
