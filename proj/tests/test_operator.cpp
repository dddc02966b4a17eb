#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "aniso/barrier.hpp"
#include "aniso/errors.hpp"
#include "aniso/operator.hpp"
#include "oracles.hpp"

using namespace aniso;
using doctest::Approx;

TEST_CASE("normalization constant") {
  CHECK(normalization_constant(make_anisotropy({2, 2}), 0.5) == Approx(0.5));
  CHECK(normalization_constant(make_anisotropy({2, 4}), 0.4) == Approx(0.1));
  CHECK(normalization_constant(make_anisotropy({2, 2}), 1.0 - 1e-12) < 1e-11);
  CHECK_THROWS_AS(normalization_constant(make_anisotropy({2, 4}), 0.5), ParameterError);
  CHECK_THROWS_AS(normalization_constant(make_anisotropy({2, 4}), 0.0), ParameterError);
}

TEST_CASE("constants are annihilated") {
  for (auto beta : {std::vector<double>{2, 2}, {4.0 / 3.0, 4}, {2, 4}}) {
    auto a = make_anisotropy(beta);
    for (double f : {0.3, 0.9}) {
      Point x{0.4, -1.1};
      auto r = eval_operator(constant_field(2.5), x, a, f * a.alpha_limit());
      CHECK(std::abs(r.value) < 1e-10);
      CHECK(r.value == r.near_part + r.far_part + r.tail_part);
    }
  }
}

TEST_CASE("translation covariance") {
  for (auto beta : {std::vector<double>{2, 2}, {4.0 / 3.0, 4}}) {
    auto a = make_anisotropy(beta);
    const double alpha = 0.7 * a.alpha_limit();
    Point h{1.5, -0.75};
    for (const Field& u : {gaussian_field(a, {0.1, 0.2}, {1.0, 0.7}), bump_field(a, {0.0, 0.3}, 1.2)}) {
      Point x{0.3, -0.2}, xh{0.3 + h[0], -0.2 + h[1]};
      const double v1 = eval_operator(u, x, a, alpha).value;
      const double v2 = eval_operator(translated(u, h), xh, a, alpha).value;
      CHECK(std::abs(v1 - v2) < 1e-8 * std::abs(v1));
    }
  }
}

TEST_CASE("isotropic power field matches the Riesz multiplier") {
  auto a = make_anisotropy({2, 2});
  for (double alpha : {0.5, 0.9}) {
    for (double g : {0.3, 1.0}) {
      auto u = euclidean_power_field(a, g);
      Point x{0.6, 0.8}, x2{1.2, 1.6};
      const auto r1 = eval_operator(u, x, a, alpha);
      const auto r2 = eval_operator(u, x2, a, alpha);
      const double ref = normalization_constant(a, alpha) * oracle::riesz_power_multiplier(2, alpha, g);
      if (std::abs(ref) > 1e-6) CHECK(r1.value == Approx(ref).epsilon(1e-4));
      if (std::abs(ref) > 1e-6) {
        const double slope = std::log(r2.value / r1.value) / std::log(2.0);
        CHECK(slope == Approx(-(g + 2 * alpha)).epsilon(1e-3));
      }
    }
  }
  // n = 1
  auto a1 = make_anisotropy({2}, 1);
  Point x{1.3};
  const double ref = normalization_constant(a1, 0.3) * oracle::riesz_power_multiplier(1, 0.3, 0.2) *
                     std::pow(1.3, -0.8);
  CHECK(eval_operator(euclidean_power_field(a1, 0.2), x, a1, 0.3).value == Approx(ref).epsilon(1e-5));
}

TEST_CASE("three dimensions, coarse") {
  auto a = make_anisotropy({2, 2, 2}, 1);
  Point x{0.48, 0.6, 0.64};
  const double ref = normalization_constant(a, 0.5) * oracle::riesz_power_multiplier(3, 0.5, 0.5);
  CHECK(eval_operator(euclidean_power_field(a, 0.5), x, a, 0.5).value == Approx(ref).epsilon(1e-2));
}

TEST_CASE("homogeneity identity") {
  auto iso = make_anisotropy({2, 2});
  auto u = euclidean_power_field(iso, 0.3);
  Point x{1, 0};
  CHECK(homogeneity_identity_check(u, x, 1.0, iso, 0.9).relative_error == 0.0);
  auto h = homogeneity_identity_check(u, x, 2.0, iso, 0.9);
  CHECK_FALSE(h.inconclusive);
  CHECK(h.relative_error < 1e-5);

  auto a = make_anisotropy({4.0 / 3.0, 4});
  auto b = barrier(a, 0.3);
  Point p{0.7, 0.5};
  auto hb = homogeneity_identity_check(b.field, p, 0.5, a, 0.9 * a.alpha_limit());
  CHECK_FALSE(hb.inconclusive);
  CHECK(hb.relative_error < 1e-4);

  CHECK(homogeneity_identity_check(constant_field(1.0), x, 2.0, iso, 0.5).inconclusive);
}

TEST_CASE("barrier sign at alpha = 0.9, circle sphere") {
  auto a = make_anisotropy({2, 2}, 1);
  auto b = barrier(a, 0.1);
  for (double th : {0.0, 0.3, 1.0, 2.5}) {
    Point x{std::cos(th), std::sin(th)};
    CHECK(eval_operator(b.field, x, a, 0.9).value > 0.0);
  }
}

TEST_CASE("kernel integrability report") {
  auto circle = make_anisotropy({2, 2}, 1);
  auto r = kernel_integrability_report(circle, 0.5, 1.0);
  CHECK(r.near == Approx(2 * std::numbers::pi).epsilon(0.01));
  CHECK(r.far == Approx(2 * std::numbers::pi).epsilon(0.01));
  for (auto beta : {std::vector<double>{2, 2}, {4.0 / 3.0, 4}}) {
    auto a = make_anisotropy(beta);
    const double alpha = 0.6 * a.alpha_limit();
    double prev_near = INFINITY, prev_far = 0;
    for (double rr : {0.5, 0.25, 0.125}) {
      auto rep = kernel_integrability_report(a, alpha, rr);
      CHECK(std::isfinite(rep.near));
      CHECK(rep.near < prev_near);
      CHECK(rep.far > prev_far);
      prev_near = rep.near;
      prev_far = rep.far;
    }
  }
}

TEST_CASE("linearity and sign at a maximum") {
  auto a = make_anisotropy({4.0 / 3.0, 4});
  const double alpha = 0.3;
  Point c{0.2, -0.1};
  auto u = gaussian_field(a, c, {0.8, 0.5});
  auto v = bump_field(a, c, 1.5);
  auto w = combine(2.0, u, -0.5, v);
  Point x{0.5, 0.3};
  const double lhs = eval_operator(w, x, a, alpha).value;
  const double rhs = 2.0 * eval_operator(u, x, a, alpha).value - 0.5 * eval_operator(v, x, a, alpha).value;
  CHECK(std::abs(lhs - rhs) < 1e-8 * std::abs(rhs));
  CHECK(eval_operator(v, c, a, alpha).value > 0.0);
  CHECK(eval_operator(u, c, a, alpha).value > 0.0);
}

TEST_CASE("tolerance refinement stays within the error estimate") {
  auto a = make_anisotropy({4.0 / 3.0, 4});
  const double alpha = 0.4;
  Point x{0.3, 0.4};
  for (const Field& u : {gaussian_field(a, {0, 0}, {1, 1}), barrier(a, 0.2).field}) {
    QuadratureConfig c1, c2;
    c2.rel_tol = c1.rel_tol / 2;
    const auto r1 = eval_operator(u, x, a, alpha, c1);
    const auto r2 = eval_operator(u, x, a, alpha, c2);
    CHECK_FALSE(r1.flagged);
    CHECK(std::abs(r1.value - r2.value) <= r1.error_estimate);
  }
}

TEST_CASE("subdivision limit flags the result") {
  auto a = make_anisotropy({2, 2});
  QuadratureConfig c;
  c.max_subdivisions = 2;
  Point x{0.3, 0.1};
  auto r = eval_operator(gaussian_field(a, {0, 0}, {1, 1}), x, a, 0.5, c);
  CHECK(r.flagged);
  CHECK(r.error_estimate == kErrorSentinel);
}

TEST_CASE("argument validation") {
  auto a = make_anisotropy({2, 4});
  Point x{1, 1};
  CHECK_THROWS_AS(eval_operator(constant_field(1), x, a, 0.6), ParameterError);
  QuadratureConfig bad;
  bad.rel_tol = 0.5;
  CHECK_THROWS_AS(eval_operator(constant_field(1), x, a, 0.3, bad), ParameterError);
  Point zero{0, 0};
  CHECK_THROWS_AS(eval_operator(barrier(a, 0.2).field, zero, a, 0.3), DomainError);
}
