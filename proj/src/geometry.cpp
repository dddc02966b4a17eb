#include "aniso/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "aniso/errors.hpp"

namespace aniso {

Anisotropy make_anisotropy(std::vector<double> beta, std::optional<int> mu_override) {
  if (beta.empty()) throw ParameterError("beta must have at least one entry");
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (!(beta[i] > 0.0) || !std::isfinite(beta[i])) {
      std::ostringstream os;
      os << "beta[" << i << "] = " << beta[i] << " must be a positive finite number";
      throw ParameterError(os.str());
    }
  }
  Anisotropy a;
  a.beta = std::move(beta);
  a.b_max = *std::max_element(a.beta.begin(), a.beta.end());
  a.b_min = *std::min_element(a.beta.begin(), a.beta.end());
  for (double b : a.beta) a.c += 2.0 / b;
  if (mu_override) {
    if (*mu_override < 1) throw ParameterError("mu must be a positive integer");
    a.mu = *mu_override;
  } else {
    a.mu = static_cast<int>(std::ceil(4.0 / a.b_min - 1e-12));
    if (a.mu < 1) a.mu = 1;
  }
  const double n = static_cast<double>(a.dim());
  a.beta_star.resize(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) a.beta_star[i] = a.c / n * a.beta[i];
  return a;
}

double quasi_norm(std::span<const double> x, const Anisotropy& a, double multiplier) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (x[i] != 0.0) s += std::pow(std::abs(x[i]), multiplier * a.beta[i]);
  }
  return std::sqrt(s);
}

double radial_coordinate(std::span<const double> x, const Anisotropy& a) {
  return std::pow(quasi_norm(x, a, a.mu), 1.0 / a.mu);
}

double cbl_residual(std::span<const double> x, const Anisotropy& a, double r) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += x[i] * x[i] * std::pow(r, -4.0 / a.beta_star[i]);
  return s - 1.0;
}

double cbl_distance(std::span<const double> x, const Anisotropy& a) {
  const std::size_t n = a.dim();
  double lo = -INFINITY, hi = -INFINITY;
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 0.0) continue;
    any = true;
    const double ax = std::abs(x[i]);
    // on each axis bound one term alone reaches 1 (lo) or all terms drop below 1/n (hi)
    lo = std::max(lo, 0.5 * a.beta_star[i] * std::log(ax));
    hi = std::max(hi, 0.25 * a.beta_star[i] * std::log(static_cast<double>(n) * ax * ax));
  }
  if (!any) return 0.0;
  lo -= 1.0;  // margin against rounding at the axis bounds
  hi += 1.0;
  // work in s = log r, where f(s) = sum x_i^2 exp(-a_i s) - 1 is convex and decreasing
  auto f = [&](double s, double* df) {
    double v = 0.0, d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == 0.0) continue;
      const double ai = 4.0 / a.beta_star[i];
      const double t = x[i] * x[i] * std::exp(-ai * s);
      v += t;
      d -= ai * t;
    }
    if (df) *df = d;
    return v - 1.0;
  };
  if (f(lo, nullptr) < 0.0 || f(hi, nullptr) > 0.0) {
    throw Error(ErrorKind::internal, "cbl_distance: root bracket failed");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid, nullptr) > 0.0) lo = mid; else hi = mid;
  }
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    double d = 0.0;
    const double v = f(s, &d);
    if (v == 0.0 || d == 0.0) break;
    s -= v / d;
  }
  return std::exp(s);
}

Point scale_map(std::span<const double> x, const Anisotropy& a, double r) {
  if (!(r > 0.0)) throw ParameterError("scale_map requires r > 0");
  Point y(x.begin(), x.end());
  for (std::size_t i = 0; i < a.dim(); ++i) y[i] *= std::pow(r, 2.0 / a.beta[i]);
  return y;
}

SphereProjection project_to_sphere(std::span<const double> x, const Anisotropy& a) {
  SphereProjection p;
  p.radius = radial_coordinate(x, a);
  if (!(p.radius > 0.0)) throw DomainError("project_to_sphere: x must be nonzero");
  p.omega = scale_map(x, a, 1.0 / p.radius);
  return p;
}

bool ellipsoid_contains(std::span<const double> center, double r, const Anisotropy& a,
                        std::span<const double> y) {
  if (!(r > 0.0)) throw ParameterError("ellipsoid radius must be positive");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = y[i] - center[i];
    s += d * d / std::pow(r, 4.0 / a.beta[i]);
  }
  return s < 1.0;
}

bool ball_contains(std::span<const double> center, double r, const Anisotropy& a,
                   std::span<const double> y) {
  if (!(r > 0.0)) throw ParameterError("ball radius must be positive");
  Point d(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) d[i] = y[i] - center[i];
  return quasi_norm(d, a) < r;
}

double unit_ball_volume(std::size_t n) {
  const double h = 0.5 * static_cast<double>(n);
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

double ellipsoid_volume(double r, const Anisotropy& a) {
  if (!(r > 0.0)) throw ParameterError("ellipsoid radius must be positive");
  return unit_ball_volume(a.dim()) * std::pow(r, a.c);
}

double ellipsoid_inclusion_constant(const Anisotropy& a) {
  const double n = static_cast<double>(a.dim());
  double c = 1.0;
  for (double b : a.beta) c = std::max(c, std::pow(n, b / 4.0 + 0.5));
  return c;
}

InclusionReport set_inclusion_check(const Anisotropy& a, std::size_t samples, std::uint64_t seed) {
  const std::size_t n = a.dim();
  const double C = ellipsoid_inclusion_constant(a);
  const double sn = std::sqrt(static_cast<double>(n));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  InclusionReport rep;
  rep.samples = samples;
  Point c(n), y(n);
  for (std::size_t k = 0; k < samples; ++k) {
    const double r = std::exp(2.0 * u(rng));
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = 3.0 * u(rng);
      y[i] = c[i] + 1.1 * u(rng) * std::pow(r * C, 2.0 / a.beta[i]);
    }
    const bool e = ellipsoid_contains(c, r, a, y);
    const bool b = ball_contains(c, r * sn, a, y);
    const bool e2 = ellipsoid_contains(c, r * C, a, y);
    if ((e && !b) || (b && !e2)) ++rep.violations;
    const double ratio = ellipsoid_volume(2.0 * r, a) / ellipsoid_volume(r, a);
    rep.volume_ratio_error = std::max(rep.volume_ratio_error, std::abs(ratio / std::pow(2.0, a.c) - 1.0));
  }
  return rep;
}

Point power_chart(std::span<const double> y, std::span<const double> exponents) {
  Point x(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::copysign(std::pow(std::abs(y[i]), 2.0 / exponents[i]), y[i]);
  }
  return x;
}

Point power_chart_inverse(std::span<const double> x, std::span<const double> exponents) {
  Point y(x.begin(), x.end());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = std::copysign(std::pow(std::abs(x[i]), exponents[i] / 2.0), x[i]);
  }
  return y;
}

std::vector<double> cone_weights(std::span<const double> x, std::span<const double> exponents) {
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    d[i] = x[i] == 0.0 ? 1.0 : std::pow(std::abs(x[i]), exponents[i] - 2.0);
  }
  return d;
}

Point cone_chart(std::span<const double> y, std::span<const double> exponents) {
  const auto d = cone_weights(y, exponents);
  Point z(y.begin(), y.end());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] *= std::sqrt(d[i]);
  return z;
}

TriangleConstantEstimate quasi_triangle_constant(const Anisotropy& a, std::size_t samples,
                                                 std::uint64_t seed) {
  if (samples < 1000) throw ParameterError("quasi_triangle_constant needs at least 1000 samples");
  TriangleConstantEstimate out;
  out.analytic_bound = std::max(1.0, std::pow(2.0, (a.b_max - 1.0) / 2.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> logscale(-3.0, 3.0);
  const std::size_t n = a.dim();
  Point x(n), y(n), s(n);
  out.estimate = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t i = 0; i < n; ++i) x[i] = normal(rng);
    x = scale_map(x, a, std::pow(10.0, logscale(rng)));
    switch (k % 3) {
      case 0:
        for (std::size_t i = 0; i < n; ++i) y[i] = normal(rng);
        y = scale_map(y, a, std::pow(10.0, logscale(rng)));
        break;
      case 1:  // near-collinear pairs approach the extremal x = y case
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] * (1.0 + 0.05 * normal(rng));
        break;
      default: {  // one coordinate direction carries the mass
        const std::size_t j = k / 3 % n;
        std::fill(y.begin(), y.end(), 0.0);
        y[j] = x[j] * (1.0 + 0.1 * normal(rng));
      }
    }
    for (std::size_t i = 0; i < n; ++i) s[i] = x[i] + y[i];
    const double den = quasi_norm(x, a) + quasi_norm(y, a);
    if (den > 0.0) out.estimate = std::max(out.estimate, quasi_norm(s, a) / den);
  }
  return out;
}

}  // namespace aniso
