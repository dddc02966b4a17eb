#pragma once
// Independent reference computations used by the tests. Nothing here calls
// into the library.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// Plain bisection for a decreasing function with f(lo) > 0 > f(hi).
inline double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi,
                                double tol = 1e-14) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Volume of {sum |x_i|^{p_i} < 1}.
inline double power_body_volume(const std::vector<double>& p) {
  double prod = 1.0, s = 0.0;
  for (double pi : p) {
    prod *= 2.0 * std::tgamma(1.0 + 1.0 / pi);
    s += 1.0 / pi;
  }
  return prod / std::tgamma(1.0 + s);
}

/// Normalizing constant c_{n,s} of the classical fractional Laplacian,
/// (-Delta)^s u = c_{n,s} PV int (u(x) - u(y)) / |x - y|^{n + 2s} dy.
inline double riesz_constant(int n, double s) {
  return std::pow(4.0, s) * std::tgamma(n / 2.0 + s) /
         (std::pow(std::numbers::pi, n / 2.0) * std::abs(std::tgamma(-s)));
}

/// int (|x|^{-g} - |y|^{-g}) / |x - y|^{n + 2s} dy = M * |x|^{-g-2s}; returns M.
/// Valid for 0 < g < n (the integral converges for 0 < s < 1).
inline double riesz_power_multiplier(int n, double s, double g) {
  const double num = std::pow(4.0, s) * std::tgamma((n - g) / 2.0) * std::tgamma((g + 2.0 * s) / 2.0);
  const double den = std::tgamma(g / 2.0) * std::tgamma((n - g - 2.0 * s) / 2.0);
  return num / den / riesz_constant(n, s);
}

}  // namespace oracle
