#include "aniso/field.hpp"

#include <algorithm>
#include <cmath>

#include "aniso/errors.hpp"

namespace aniso {

Field constant_field(double value) {
  Field f;
  f.eval = [value](std::span<const double>) { return value; };
  f.gradient = [](std::span<const double> x) { return std::vector<double>(x.size(), 0.0); };
  f.hessian = [](std::span<const double> x) {
    return std::vector<double>(x.size() * x.size(), 0.0);
  };
  f.homogeneity = 0.0;
  f.decay = {DecayKind::bounded, {}, 0.0, std::abs(value)};
  return f;
}

double support_radius(const Anisotropy& a, double rho) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::pow(rho, a.smoothed(i));
  return std::pow(s, 0.5 / a.mu);
}

Field gaussian_field(const Anisotropy& a, Point center, std::vector<double> sigma) {
  if (center.size() != a.dim() || sigma.size() != a.dim()) {
    throw ParameterError("gaussian_field: dimension mismatch");
  }
  for (double s : sigma) {
    if (!(s > 0.0)) throw ParameterError("gaussian_field: widths must be positive");
  }
  Field f;
  auto q = [center, sigma](std::span<const double> x, std::vector<double>* g) {
    double e = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = (x[i] - center[i]) / sigma[i];
      e += d * d;
      if (g) (*g)[i] = -(x[i] - center[i]) / (sigma[i] * sigma[i]);
    }
    return std::exp(-0.5 * e);
  };
  f.eval = [q](std::span<const double> x) { return q(x, nullptr); };
  f.gradient = [q](std::span<const double> x) {
    std::vector<double> g(x.size());
    const double u = q(x, &g);
    for (double& v : g) v *= u;
    return g;
  };
  f.hessian = [q, sigma](std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> g(n), h(n * n);
    const double u = q(x, &g);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        h[i * n + j] = u * (g[i] * g[j] - (i == j ? 1.0 / (sigma[i] * sigma[i]) : 0.0));
      }
    }
    return h;
  };
  // exp(-0.5 * 40^2) underflows to zero
  const double smax = *std::max_element(sigma.begin(), sigma.end());
  f.decay = {DecayKind::compact, center, support_radius(a, 40.0 * smax), 1.0};
  return f;
}

Field bump_field(const Anisotropy& a, Point center, double radius) {
  if (center.size() != a.dim()) throw ParameterError("bump_field: dimension mismatch");
  if (!(radius > 0.0)) throw ParameterError("bump_field: radius must be positive");
  Field f;
  f.eval = [center, radius](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = (x[i] - center[i]) / radius;
      s += d * d;
    }
    return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
  };
  f.decay = {DecayKind::compact, center, support_radius(a, radius), 1.0};
  return f;
}

Field euclidean_power_field(const Anisotropy& a, double g) {
  if (!(g > 0.0)) throw ParameterError("euclidean_power_field: exponent must be positive");
  Field f;
  auto r2 = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  };
  f.eval = [g, r2](std::span<const double> x) { return std::pow(r2(x), -0.5 * g); };
  f.gradient = [g, r2](std::span<const double> x) {
    const double s = r2(x);
    std::vector<double> d(x.begin(), x.end());
    for (double& v : d) v *= -g * std::pow(s, -0.5 * g - 1.0);
    return d;
  };
  f.hessian = [g, r2](std::span<const double> x) {
    const std::size_t n = x.size();
    const double s = r2(x);
    const double a1 = -g * std::pow(s, -0.5 * g - 1.0);
    const double a2 = g * (g + 2.0) * std::pow(s, -0.5 * g - 2.0);
    std::vector<double> h(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) h[i * n + j] = a2 * x[i] * x[j] + (i == j ? a1 : 0.0);
    }
    return h;
  };
  f.smoothness_at = [r2](std::span<const double> x) { return r2(x) > 0.0; };
  if (a.b_min == a.b_max) {
    f.homogeneity = -2.0 * g / a.b_max;
    f.decay.kind = DecayKind::homogeneous;
  } else {
    f.decay = {DecayKind::bounded, {}, 0.0, INFINITY};
  }
  return f;
}

Field translated(const Field& u, Point h) {
  Field f;
  auto shift = [h](std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= h[i];
    return y;
  };
  f.eval = [u, shift](std::span<const double> x) { return u.eval(shift(x)); };
  if (u.gradient) f.gradient = [u, shift](std::span<const double> x) { return u.gradient(shift(x)); };
  if (u.hessian) f.hessian = [u, shift](std::span<const double> x) { return u.hessian(shift(x)); };
  if (u.smoothness_at) {
    f.smoothness_at = [u, shift](std::span<const double> x) { return u.smoothness_at(shift(x)); };
  }
  f.decay = u.decay;
  if (u.decay.kind == DecayKind::compact) {
    for (std::size_t i = 0; i < h.size(); ++i) f.decay.anchor[i] += h[i];
  } else if (u.decay.kind == DecayKind::homogeneous) {
    // homogeneity about a moved origin is not representable
    f.decay = {DecayKind::bounded, {}, 0.0, INFINITY};
  }
  if (u.decay.kind != DecayKind::homogeneous) f.homogeneity = u.homogeneity;
  return f;
}

Field combine(double s, const Field& u, double t, const Field& v) {
  Field f;
  f.eval = [=](std::span<const double> x) { return s * u.eval(x) + t * v.eval(x); };
  if (u.hessian && v.hessian) {
    f.hessian = [=](std::span<const double> x) {
      auto a = u.hessian(x);
      const auto b = v.hessian(x);
      for (std::size_t i = 0; i < a.size(); ++i) a[i] = s * a[i] + t * b[i];
      return a;
    };
  }
  if (u.gradient && v.gradient) {
    f.gradient = [=](std::span<const double> x) {
      auto a = u.gradient(x);
      const auto b = v.gradient(x);
      for (std::size_t i = 0; i < a.size(); ++i) a[i] = s * a[i] + t * b[i];
      return a;
    };
  }
  if (u.smoothness_at || v.smoothness_at) {
    f.smoothness_at = [=](std::span<const double> x) {
      return (!u.smoothness_at || u.smoothness_at(x)) && (!v.smoothness_at || v.smoothness_at(x));
    };
  }
  const auto& du = u.decay;
  const auto& dv = v.decay;
  if (du.kind == DecayKind::compact && dv.kind == DecayKind::compact && du.anchor == dv.anchor) {
    f.decay = {DecayKind::compact, du.anchor, std::max(du.radius, dv.radius), 0.0};
    f.decay.bound = std::abs(s) * du.bound + std::abs(t) * dv.bound;
  } else if (du.kind == DecayKind::homogeneous && dv.kind == DecayKind::homogeneous &&
             u.homogeneity == v.homogeneity) {
    f.decay.kind = DecayKind::homogeneous;
    f.homogeneity = u.homogeneity;
  } else {
    f.decay = {DecayKind::bounded, {}, 0.0, std::abs(s) * du.bound + std::abs(t) * dv.bound};
  }
  return f;
}

Field dilated(const Field& u, const Anisotropy& a, double r) {
  if (!(r > 0.0)) throw ParameterError("dilated: r must be positive");
  Field f;
  f.eval = [u, a, r](std::span<const double> x) { return u.eval(scale_map(x, a, r)); };
  if (u.hessian) {
    f.hessian = [u, a, r](std::span<const double> x) {
      auto h = u.hessian(scale_map(x, a, r));
      const std::size_t n = x.size();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h[i * n + j] *= std::pow(r, 2.0 / a.beta[i] + 2.0 / a.beta[j]);
        }
      }
      return h;
    };
  }
  f.homogeneity = u.homogeneity;
  f.decay = u.decay;
  if (u.decay.kind == DecayKind::compact) {
    f.decay.anchor = scale_map(u.decay.anchor, a, 1.0 / r);
    f.decay.radius = u.decay.radius / r;
  }
  return f;
}

std::vector<double> field_hessian(const Field& u, std::span<const double> x) {
  if (u.hessian) return u.hessian(x);
  const std::size_t n = x.size();
  std::vector<double> h(n * n);
  std::vector<double> y(x.begin(), x.end());
  std::vector<double> step(n);
  for (std::size_t i = 0; i < n; ++i) step[i] = 1e-4 * std::max(1.0, std::abs(x[i]));
  const double u0 = u.eval(x);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double v;
      if (i == j) {
        y[i] = x[i] + step[i];
        const double up = u.eval(y);
        y[i] = x[i] - step[i];
        const double um = u.eval(y);
        y[i] = x[i];
        v = (up - 2.0 * u0 + um) / (step[i] * step[i]);
      } else {
        double acc = 0.0;
        for (int si : {1, -1}) {
          for (int sj : {1, -1}) {
            y[i] = x[i] + si * step[i];
            y[j] = x[j] + sj * step[j];
            acc += si * sj * u.eval(y);
          }
        }
        y[i] = x[i];
        y[j] = x[j];
        v = acc / (4.0 * step[i] * step[j]);
      }
      h[i * n + j] = h[j * n + i] = v;
    }
  }
  return h;
}

}  // namespace aniso
