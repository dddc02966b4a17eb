#include "aniso/spline.hpp"

#include <cmath>
#include <numbers>

#include "aniso/errors.hpp"

namespace aniso {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// cyclic tridiagonal solve with constant bands (1/6, 4/6, 1/6), Sherman-Morrison
std::vector<double> cyclic_solve(const std::vector<double>& rhs) {
  const std::size_t n = rhs.size();
  const double a = 1.0 / 6.0, b = 4.0 / 6.0;
  auto thomas = [&](std::vector<double> d, double b0, double bn) {
    std::vector<double> cp(n), x(n);
    double diag = b0;
    cp[0] = a / diag;
    d[0] /= diag;
    for (std::size_t i = 1; i < n; ++i) {
      diag = (i + 1 == n ? bn : b) - a * cp[i - 1];
      cp[i] = a / diag;
      d[i] = (d[i] - a * d[i - 1]) / diag;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - cp[i] * x[i + 1];
    return x;
  };
  const double g = -b;
  const double b0 = b - g, bn = b - a * a / g;
  const auto y = thomas(rhs, b0, bn);
  std::vector<double> u(n, 0.0);
  u[0] = g;
  u[n - 1] = a;
  const auto z = thomas(u, b0, bn);
  const double f = (y[0] + a * y[n - 1] / g) / (1.0 + z[0] + a * z[n - 1] / g);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - f * z[i];
  return x;
}

}  // namespace

PeriodicSpline::PeriodicSpline(std::vector<double> values) {
  if (values.size() < 4) throw ParameterError("periodic spline needs at least 4 values");
  coef_ = solve_coefficients(values);
}

std::vector<double> PeriodicSpline::solve_coefficients(const std::vector<double>& values) {
  return cyclic_solve(values);
}

std::vector<double> PeriodicSpline::interpolation_inverse(std::size_t n) {
  std::vector<double> inv(n * n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const auto col = cyclic_solve(e);
    for (std::size_t i = 0; i < n; ++i) inv[i * n + j] = col[i];
    e[j] = 0.0;
  }
  return inv;
}

PeriodicSpline::Stencil PeriodicSpline::stencil(double s, std::size_t n) {
  const double u = s / (kTwoPi / static_cast<double>(n)) - 0.5;
  const double fl = std::floor(u);
  const double t = u - fl;
  const long k0 = static_cast<long>(fl);
  const long N = static_cast<long>(n);
  Stencil st;
  for (int j = 0; j < 4; ++j) {
    st.index[j] = static_cast<std::size_t>((((k0 - 1 + j) % N) + N) % N);
  }
  const double t2 = t * t, t3 = t2 * t, m = 1.0 - t;
  st.weight = {m * m * m / 6.0, (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0,
               (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0, t3 / 6.0};
  return st;
}

double PeriodicSpline::operator()(double s) const {
  const auto st = stencil(s, coef_.size());
  double v = 0.0;
  for (int j = 0; j < 4; ++j) v += st.weight[j] * coef_[st.index[j]];
  return v;
}

double PeriodicSpline::derivative(double s) const {
  const std::size_t n = coef_.size();
  const double h = kTwoPi / static_cast<double>(n);
  const double u = s / h - 0.5;
  const double t = u - std::floor(u);
  const auto st = stencil(s, n);
  const double m = 1.0 - t;
  const double d[4] = {-0.5 * m * m, 1.5 * t * t - 2.0 * t, -1.5 * t * t + t + 0.5, 0.5 * t * t};
  double v = 0.0;
  for (int j = 0; j < 4; ++j) v += d[j] * coef_[st.index[j]];
  return v / h;
}

}  // namespace aniso
