#include "aniso/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "aniso/errors.hpp"
#include "aniso/io.hpp"

namespace aniso {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Point cross(const Point& u, const Point& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

std::array<int, 3> lattice_key(int a, int b, int c) {
  return {a == 0 ? 0 : a, b == 0 ? 0 : b, c == 0 ? 0 : c};
}

}  // namespace

Point radial_sphere_point(std::span<const double> e, const Anisotropy& a) {
  const std::size_t n = a.dim();
  double lo = INFINITY, hi = INFINITY;
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (e[i] == 0.0) continue;
    any = true;
    const double p = a.smoothed(i);
    const double l = -std::log(std::abs(e[i]));
    hi = std::min(hi, l);
    lo = std::min(lo, l - std::log(static_cast<double>(n)) / p);
  }
  if (!any) throw DomainError("radial_sphere_point: zero direction");
  auto h = [&](double s, double* dh) {
    double v = 0.0, d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (e[i] == 0.0) continue;
      const double p = a.smoothed(i);
      const double t = std::exp(p * (s + std::log(std::abs(e[i]))));
      v += t;
      d += p * t;
    }
    if (dh) *dh = d;
    return v - 1.0;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid, nullptr) < 0.0) lo = mid; else hi = mid;
  }
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 2; ++it) {
    double d = 0.0;
    const double v = h(s, &d);
    if (v == 0.0 || d == 0.0) break;
    s -= v / d;
  }
  const double lambda = std::exp(s);
  Point w(e.begin(), e.end());
  for (double& wi : w) wi *= lambda;
  return w;
}

double polar_density(std::span<const double> omega, const Anisotropy& a) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double p = a.smoothed(i);
    const double d = omega[i] == 0.0 ? 0.0 : p * std::pow(std::abs(omega[i]), p - 1.0);
    g += d * d;
  }
  return 2.0 * a.mu / std::sqrt(g);
}

Point SphereGrid::direction_to_sphere(std::span<const double> e) const {
  if (chart_ == SphereChart::radial) return radial_sphere_point(e, a_);
  std::vector<double> ex(a_.dim());
  for (std::size_t i = 0; i < a_.dim(); ++i) ex[i] = a_.smoothed(i);
  // the image already has unit mu*beta norm; re-project to clean up rounding
  Point w = power_chart(e, ex);
  return project_to_sphere(w, a_).omega;
}

Point SphereGrid::sphere_to_direction(std::span<const double> omega) const {
  Point e;
  if (chart_ == SphereChart::radial) {
    e.assign(omega.begin(), omega.end());
  } else {
    std::vector<double> ex(a_.dim());
    for (std::size_t i = 0; i < a_.dim(); ++i) ex[i] = a_.smoothed(i);
    e = power_chart_inverse(omega, ex);
  }
  const double r = norm2(e);
  for (double& v : e) v /= r;
  return e;
}

double SphereGrid::total_weight() const {
  double s = 0.0;
  for (const auto& q : nodes_) s += q.weight;
  return s;
}

double SphereGrid::total_polar_weight() const {
  double s = 0.0;
  for (double w : polar_) s += w;
  return s;
}

double SphereGrid::angle_of(double s) const {
  double t = s;
  for (std::size_t k = 0; k < warp_.size(); ++k) t += warp_[k] * std::sin(2.0 * (k + 1.0) * (s - peak_));
  return t;
}

double SphereGrid::parameter_of_angle(double theta) const {
  if (warp_.empty()) return theta;
  double s = theta;
  for (int it = 0; it < 60; ++it) {
    double d = 1.0;
    for (std::size_t k = 0; k < warp_.size(); ++k) {
      d += 2.0 * (k + 1.0) * warp_[k] * std::cos(2.0 * (k + 1.0) * (s - peak_));
    }
    const double step = (angle_of(s) - theta) / d;
    s -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return s;
}

double SphereGrid::min_spacing() const {
  if (a_.dim() != 2) return kTwoPi / static_cast<double>(std::max<std::size_t>(nodes_.size(), 1));
  return (1.0 - grading_) * kTwoPi / static_cast<double>(nodes_.size());
}

Point SphereGrid::point_at(double s) const {
  if (a_.dim() != 2) throw ParameterError("point_at is defined for n = 2 grids only");
  const double t = angle_of(s);
  const double e[2] = {std::cos(t), std::sin(t)};
  return direction_to_sphere(e);
}

double SphereGrid::parameter_of_node(std::size_t k) const {
  return (static_cast<double>(k) + 0.5) * kTwoPi / static_cast<double>(nodes_.size());
}

double SphereGrid::parameter_of(std::span<const double> x) const {
  if (a_.dim() != 2) throw ParameterError("parameter_of is defined for n = 2 grids only");
  const auto p = project_to_sphere(x, a_);
  const Point e = sphere_to_direction(p.omega);
  double t = std::atan2(e[1], e[0]);
  if (t < 0.0) t += kTwoPi;
  double s = parameter_of_angle(t);
  if (s < 0.0) s += kTwoPi;
  if (s >= kTwoPi) s -= kTwoPi;
  return s;
}

Stencil SphereGrid::locate(std::span<const double> x) const {
  Stencil st;
  const std::size_t n = a_.dim();
  if (n == 1) {
    if (x[0] == 0.0) throw DomainError("locate: zero point");
    st.count = 1;
    st.node[0] = x[0] > 0.0 ? 0 : 1;
    st.weight[0] = 1.0;
    return st;
  }
  if (n == 2) {
    const std::size_t N = nodes_.size();
    const double u = parameter_of(x) / (kTwoPi / static_cast<double>(N)) - 0.5;
    const double fl = std::floor(u);
    const double f = u - fl;
    const long k0 = static_cast<long>(fl);
    const std::size_t i0 = static_cast<std::size_t>(((k0 % static_cast<long>(N)) + N) % N);
    st.count = 2;
    st.node[0] = i0;
    st.node[1] = (i0 + 1) % N;
    st.weight[0] = 1.0 - f;
    st.weight[1] = f;
    return st;
  }
  const auto p = project_to_sphere(x, a_);
  const Point e = sphere_to_direction(p.omega);
  const int m = resolution_;
  const double l1 = std::abs(e[0]) + std::abs(e[1]) + std::abs(e[2]);
  const int sx = e[0] < 0.0 ? -1 : 1, sy = e[1] < 0.0 ? -1 : 1, sz = e[2] < 0.0 ? -1 : 1;
  const double pa = std::abs(e[0]) / l1 * m, pb = std::abs(e[1]) / l1 * m;
  int i = std::clamp(static_cast<int>(std::floor(pa)), 0, m - 1);
  int j = std::clamp(static_cast<int>(std::floor(pb)), 0, m - 1);
  if (i + j > m - 1) {
    // only on the face boundary, where pa + pb = m
    if (i > 0) i = m - 1 - j; else j = m - 1 - i;
  }
  const double fa = std::clamp(pa - i, 0.0, 1.0), fb = std::clamp(pb - j, 0.0, 1.0);
  auto node = [&](int a, int b) {
    return lattice_.at(lattice_key(sx * a, sy * b, sz * (m - a - b)));
  };
  st.count = 3;
  if (fa + fb <= 1.0 || i + j == m - 1) {
    const double s = fa + fb > 1.0 ? fa + fb : 1.0;
    st.node = {node(i, j), node(i + 1, j), node(i, j + 1)};
    st.weight = {1.0 - (fa + fb) / s, fa / s, fb / s};
  } else {
    st.node = {node(i + 1, j + 1), node(i + 1, j), node(i, j + 1)};
    st.weight = {fa + fb - 1.0, 1.0 - fb, 1.0 - fa};
  }
  for (double& w : st.weight) w = std::max(w, 0.0);
  return st;
}

double SphereGrid::interpolate(std::span<const double> x, std::span<const double> values) const {
  const Stencil st = locate(x);
  double v = 0.0;
  for (int k = 0; k < st.count; ++k) v += st.weight[k] * values[st.node[k]];
  return v;
}

void SphereGrid::write_csv(std::ostream& os) const {
  os << "node_index";
  for (std::size_t i = 0; i < a_.dim(); ++i) os << ",x_" << (i + 1);
  os << ",weight\n";
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    os << k;
    for (double v : nodes_[k].x) os << ',' << fmt(v);
    os << ',' << fmt(nodes_[k].weight) << '\n';
  }
}

SphereGrid build_sphere_grid(const Anisotropy& a, int resolution, SphereChart chart,
                             double grading, double peak, int sharpness) {
  const std::size_t n = a.dim();
  if (n > 3) throw ParameterError("sphere grids are implemented for n <= 3");
  if (resolution < 8) throw ParameterError("sphere grid resolution must be at least 8");
  if (!(grading >= 0.0 && grading < 1.0)) throw ParameterError("sphere grid grading must lie in [0, 1)");
  if (grading != 0.0 && n != 2) throw ParameterError("sphere grid grading is for n = 2 only");
  if (sharpness < 1 || sharpness > 32) throw ParameterError("sphere grid sharpness must lie in [1, 32]");
  SphereGrid g;
  g.a_ = a;
  g.resolution_ = resolution;
  g.chart_ = chart;
  g.grading_ = grading;
  g.peak_ = peak;
  if (grading > 0.0) {
    // cos^{2p} x = 4^{-p} (C(2p,p) + 2 sum_k C(2p,p-k) cos 2kx)
    const int p = sharpness;
    std::vector<double> binom(p + 1);
    double c = std::pow(0.25, p);  // 4^{-p} C(2p, 0)
    for (int j = 0; j <= p; ++j) {
      binom[j] = c;  // 4^{-p} C(2p, j)
      c *= static_cast<double>(2 * p - j) / static_cast<double>(j + 1);
    }
    const double mp = binom[p];
    g.warp_.resize(p);
    for (int k = 1; k <= p; ++k) g.warp_[k - 1] = -grading / (1.0 - mp) * binom[p - k] / k;
  }

  if (n == 1) {
    g.nodes_ = {{{1.0}, 1.0}, {{-1.0}, 1.0}};
    g.polar_ = {2.0 / a.beta[0], 2.0 / a.beta[0]};
    return g;
  }

  if (n == 2) {
    const std::size_t N = static_cast<std::size_t>(resolution);
    const double h = kTwoPi / static_cast<double>(N);
    const double fd = 1e-6;
    g.nodes_.resize(N);
    g.polar_.resize(N);
    for (std::size_t k = 0; k < N; ++k) {
      const double s = (static_cast<double>(k) + 0.5) * h;
      const Point w = g.point_at(s);
      const Point wp = g.point_at(s + fd), wm = g.point_at(s - fd);
      const double d0 = (wp[0] - wm[0]) / (2.0 * fd), d1 = (wp[1] - wm[1]) / (2.0 * fd);
      const double g0 = 2.0 / a.beta[0] * w[0], g1 = 2.0 / a.beta[1] * w[1];
      g.nodes_[k] = {w, std::hypot(d0, d1) * h};
      g.polar_[k] = std::abs(g0 * d1 - g1 * d0) * h;
    }
    return g;
  }

  // n = 3: subdivided octahedron, vertices carried to the sphere through the chart
  const int m = resolution;
  auto add_vertex = [&](int x, int y, int z) {
    const auto key = lattice_key(x, y, z);
    auto it = g.lattice_.find(key);
    if (it != g.lattice_.end()) return it->second;
    Point e = {static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
    const double r = norm2(e);
    for (double& v : e) v /= r;
    g.nodes_.push_back({g.direction_to_sphere(e), 0.0});
    g.polar_.push_back(0.0);
    g.lattice_.emplace(key, g.nodes_.size() - 1);
    return g.nodes_.size() - 1;
  };
  auto add_triangle = [&](std::size_t i0, std::size_t i1, std::size_t i2) {
    const Point& p0 = g.nodes_[i0].x;
    const Point& p1 = g.nodes_[i1].x;
    const Point& p2 = g.nodes_[i2].x;
    const Point u = {p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]};
    const Point v = {p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]};
    const double area = 0.5 * norm2(cross(u, v));
    // polar mass of the cone over the patch is c times its volume; use the tetrahedron
    const double vol = std::abs(p0[0] * (p1[1] * p2[2] - p1[2] * p2[1]) -
                                p0[1] * (p1[0] * p2[2] - p1[2] * p2[0]) +
                                p0[2] * (p1[0] * p2[1] - p1[1] * p2[0])) / 6.0;
    for (std::size_t idx : {i0, i1, i2}) {
      g.nodes_[idx].weight += area / 3.0;
      g.polar_[idx] += a.c * vol / 3.0;
    }
  };
  for (int sx : {1, -1}) {
    for (int sy : {1, -1}) {
      for (int sz : {1, -1}) {
        auto v = [&](int i, int j) { return add_vertex(sx * i, sy * j, sz * (m - i - j)); };
        for (int i = 0; i < m; ++i) {
          for (int j = 0; i + j < m; ++j) {
            add_triangle(v(i, j), v(i + 1, j), v(i, j + 1));
            if (i + j <= m - 2) add_triangle(v(i + 1, j), v(i + 1, j + 1), v(i, j + 1));
          }
        }
      }
    }
  }
  return g;
}

}  // namespace aniso
