#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "aniso/barrier.hpp"
#include "aniso/errors.hpp"

using namespace aniso;
using doctest::Approx;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const std::vector<double>& a) {
  double m = 0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("barrier values and homogeneity") {
  auto iso = make_anisotropy({2, 2});
  auto b = barrier(iso, 0.3);
  Point e1{1, 0};
  CHECK(b.field(e1) == Approx(1.0));
  Point p{0.5, 0.7};
  CHECK(b.field(p) == Approx(std::pow(std::pow(0.5, 4) + std::pow(0.7, 4), -0.3 / 4)));
  CHECK_THROWS_AS(barrier(iso, 0.0), ParameterError);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> lr(-2, 2);
  for (auto beta : {std::vector<double>{2, 2}, {4.0 / 3.0, 4}, {1, 3, 6}}) {
    auto a = make_anisotropy(beta);
    auto bf = barrier(a, 0.4);
    for (int k = 0; k < 100; ++k) {
      Point x(a.dim());
      for (double& v : x) v = nd(rng);
      const double r = std::pow(10.0, lr(rng));
      const double lhs = bf.field(scale_map(x, a, r));
      CHECK(lhs == Approx(std::pow(r, -0.4) * bf.field(x)).epsilon(1e-10));
    }
  }

  auto a = make_anisotropy({4.0 / 3.0, 4});
  auto bq = barrier(a, 0.25);
  auto g = build_sphere_grid(a, 64);
  for (auto& q : g.nodes()) CHECK(bq.field(q.x) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("barrier derivatives against finite differences") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (auto beta : {std::vector<double>{2, 2}, {4.0 / 3.0, 4}, {1, 3, 6}}) {
    auto a = make_anisotropy(beta);
    for (double gamma : {0.1, 0.8}) {
      auto b = barrier(a, gamma);
      const std::size_t n = a.dim();
      for (int k = 0; k < 100; ++k) {
        Point x(n);
        for (double& v : x) v = nd(rng);
        const auto g = barrier_gradient(b, x);
        const auto H = barrier_hessian(b, x);
        std::vector<double> gfd(n), Hfd(n * n);
        const double h = 1e-5;
        for (std::size_t j = 0; j < n; ++j) {
          Point xp = x, xm = x;
          xp[j] += h;
          xm[j] -= h;
          gfd[j] = (b.field(xp) - b.field(xm)) / (2 * h);
          const auto gp = barrier_gradient(b, xp), gm = barrier_gradient(b, xm);
          for (std::size_t i = 0; i < n; ++i) Hfd[i * n + j] = (gp[i] - gm[i]) / (2 * h);
        }
        CHECK(max_abs_diff(g, gfd) <= 1e-6 * max_abs(g));
        CHECK(max_abs_diff(H, Hfd) <= 1e-5 * max_abs(H));
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            CHECK(std::abs(H[i * n + j] - H[j * n + i]) <= 1e-14 * max_abs(H));
      }
    }
  }
}

TEST_CASE("isotropic barrier Hessian by hand") {
  auto a = make_anisotropy({2, 2});
  const double g = 0.3;
  auto b = barrier(a, g);
  for (auto x : {Point{0.5, 0.7}, Point{1.0, -0.2}, Point{-0.3, 0.9}}) {
    const double S = std::pow(x[0], 4) + std::pow(x[1], 4);
    const double e1 = std::pow(S, -g / 4 - 1), e2 = std::pow(S, -g / 4 - 2);
    const double c2 = g * (g / 4 + 1) * 4;
    const double hxx = -3 * g * x[0] * x[0] * e1 + c2 * std::pow(x[0], 6) * e2;
    const double hyy = -3 * g * x[1] * x[1] * e1 + c2 * std::pow(x[1], 6) * e2;
    const double hxy = c2 * std::pow(x[0] * x[1], 3) * e2;
    const auto H = barrier_hessian(b, x);
    CHECK(H[0] == Approx(hxx).epsilon(1e-12));
    CHECK(H[3] == Approx(hyy).epsilon(1e-12));
    CHECK(H[1] == Approx(hxy).epsilon(1e-12));
  }
  Point zero{0, 0};
  CHECK_THROWS_AS(barrier_hessian(b, zero), DomainError);
}

TEST_CASE("cone membership") {
  auto a = make_anisotropy({4.0 / 3.0, 4});
  Point x{0.6, 0.9};
  auto c = make_cone(a, x, 0.2);
  CHECK(quasi_norm(c.apex, a) == Approx(1.0));
  CHECK_FALSE(cone_membership(c, c.apex));
  // <x, y>_x = 0
  Point y{-c.d[1] * c.apex[1], c.d[0] * c.apex[0]};
  CHECK(cone_membership(c, y));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  int violations = 0;
  for (int k = 0; k < 10000; ++k) {
    Point z{nd(rng), nd(rng)}, mz{-z[0], -z[1]};
    if (cone_membership(c, z) != cone_membership(c, mz)) ++violations;
  }
  CHECK(violations == 0);
  CHECK_THROWS_AS(make_cone(a, x, 1.0), ParameterError);
}

TEST_CASE("cone complement measure") {
  auto circle = make_anisotropy({2, 2}, 1);
  auto g = build_sphere_grid(circle, 1024);
  double prev = -1;
  for (double d : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double lo = INFINITY, hi = 0;
    for (double th : {0.0, 0.7, 1.9, 4.0}) {
      Point x{std::cos(th), std::sin(th)};
      const double m = cone_complement_measure(circle, d, g, x);
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    CHECK(hi == Approx(4 * std::acos(1 - d)).epsilon(0.02));
    CHECK((hi - lo) / hi < 0.02);
    CHECK(hi >= prev);
    prev = hi;
  }

  // Monte Carlo on the chart parameter for an anisotropic sphere
  auto a = make_anisotropy({4.0 / 3.0, 4}, 1);
  auto ga = build_sphere_grid(a, 1024);
  Point apex{0.5, 0.8};
  const auto apex_on = make_cone(a, apex, 0.5).apex;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> us(0, 2 * std::numbers::pi);
  for (double d : {0.1, 0.5, 0.9}) {
    const auto cone = make_cone(a, apex_on, d);
    double acc = 0;
    const int N = 200000;
    for (int k = 0; k < N; ++k) {
      const double s = us(rng);
      if (cone_membership(cone, ga.point_at(s))) continue;
      const auto p = ga.point_at(s + 1e-6), m = ga.point_at(s - 1e-6);
      acc += std::hypot(p[0] - m[0], p[1] - m[1]) / 2e-6;
    }
    const double mc = acc / N * 2 * std::numbers::pi;
    CHECK(cone_complement_measure(a, d, ga, apex_on) == Approx(mc).epsilon(0.02));
  }
}

TEST_CASE("delta threshold report") {
  auto circle = make_anisotropy({2, 2}, 1);
  auto g = build_sphere_grid(circle, 256);
  auto rep = cone_delta_threshold(circle, g, {0.02, 0.05, 0.07, 0.1, 0.3});
  // 4 arccos(1 - delta) <= pi/2  <=>  delta <= 1 - cos(pi/8) = 0.0761
  REQUIRE(rep.delta0.has_value());
  CHECK(*rep.delta0 == 0.07);
  CHECK_FALSE(rep.delta0_above_half);
  CHECK(std::is_sorted(rep.worst_measure.begin(), rep.worst_measure.end()));
}

TEST_CASE("g_k truncation") {
  auto a = make_anisotropy({2, 2});
  const double gamma = 0.2, alpha = 0.6;
  const double e = (gamma + 2 * alpha) / a.mu;
  CHECK(gk_truncation(0.5, 0, gamma, alpha, a) == 1.0);
  CHECK(gk_truncation(2.0, 0, gamma, alpha, a) == 0.0);
  CHECK(gk_truncation(1.0, 0, gamma, alpha, a) == 0.0);
  CHECK(gk_truncation(0.1, 2, gamma, alpha, a) == Approx(std::pow(2.0, 2 * e)));
  CHECK(gk_truncation(1.0, 2, gamma, alpha, a) == Approx(1.0));
  for (int k : {0, 1, 3, 6}) {
    double prev = INFINITY;
    for (double t = 1e-3; t < 1e3; t *= 1.1) {
      const double v = gk_truncation(t, k, gamma, alpha, a);
      CHECK(v <= prev);
      CHECK(v <= std::min(std::pow(2.0, e * k), std::pow(t, -e)) * (1 + 1e-14));
      prev = v;
    }
  }
  for (double t : {1e-3, 0.3, 7.0}) {
    CHECK(gk_truncation(t, 40, gamma, alpha, a) == Approx(std::pow(t, -e)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gk_truncation(0.0, 1, gamma, alpha, a), ParameterError);
}

TEST_CASE("barrier sweep") {
  auto circle = make_anisotropy({2, 2}, 1);
  auto g = build_sphere_grid(circle, 32);
  QuadratureConfig cfg;
  cfg.angular_resolution = 256;
  auto t = barrier_sweep(circle, {0.85, 0.9}, {0.1, 1.8}, g, cfg);
  CHECK(t.at(1, 0).min_value > 0.0);  // gamma = 0.1 below 2 - 2 alpha
  CHECK(t.at(1, 1).min_value < 0.0);
  REQUIRE(t.alpha0[0].has_value());
  CHECK(*t.alpha0[0] == 0.85);
  CHECK_FALSE(t.alpha0[1].has_value());

  // (-Delta)^alpha |x|^{-gamma} changes sign where gamma + 2 alpha = n
  auto flip = barrier_sweep(circle, {0.93, 0.97}, {0.1}, g, cfg);
  CHECK(flip.at(0, 0).min_value > 0.0);
  CHECK(flip.at(1, 0).min_value < 0.0);

  auto t4 = barrier_sweep(circle, {0.85, 0.9}, {0.1, 1.8}, g, cfg, 4);
  std::ostringstream a1, a4;
  t.write_csv(a1);
  t4.write_csv(a4);
  CHECK(a1.str() == a4.str());
  CHECK(a1.str().rfind("alpha,gamma,min_value,argmin_node,error_flag\n", 0) == 0);

  // continuity: after refining the alpha ladder the jumps stay small
  auto a = make_anisotropy({4.0 / 3.0, 4});
  auto ga = build_sphere_grid(a, 16);
  std::vector<double> al;
  for (int i = 0; i < 8; ++i) al.push_back((0.5 + 0.01 * i) * a.alpha_limit());
  auto tc = barrier_sweep(a, al, {0.1}, ga, cfg);
  double scale = 0;
  for (auto& c : tc.cells) scale = std::max(scale, std::abs(c.min_value));
  for (std::size_t i = 1; i < al.size(); ++i) {
    CHECK(std::abs(tc.at(i, 0).min_value - tc.at(i - 1, 0).min_value) < 0.1 * scale);
  }
  CHECK_THROWS_AS(barrier_sweep(a, {0.6}, {0.1}, ga, cfg), ParameterError);
}
