#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace aniso {

/// Periodic cubic spline through values at s_k = (k + 1/2) 2 pi / N.
class PeriodicSpline {
 public:
  explicit PeriodicSpline(std::vector<double> values);

  double operator()(double s) const;
  double derivative(double s) const;
  std::size_t size() const { return coef_.size(); }
  const std::vector<double>& coefficients() const { return coef_; }

  /// B-spline coefficient indices and weights active at s.
  struct Stencil {
    std::array<std::size_t, 4> index{};
    std::array<double, 4> weight{};
  };
  static Stencil stencil(double s, std::size_t n);

  /// Solves the interpolation system (c_{k-1} + 4 c_k + c_{k+1}) / 6 = v_k.
  static std::vector<double> solve_coefficients(const std::vector<double>& values);
  /// Dense inverse of the interpolation system, row-major.
  static std::vector<double> interpolation_inverse(std::size_t n);

 private:
  std::vector<double> coef_;
};

}  // namespace aniso
