#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace aniso {

using Point = std::vector<double>;

/// Exponent vector beta = (b_1..b_n) together with the quantities every
/// other module derives from it.
struct Anisotropy {
  std::vector<double> beta;
  double c = 0.0;      // anisotropic dimension, sum of 2/b_i
  double b_max = 0.0;
  double b_min = 0.0;
  int mu = 1;          // smoothing multiplier; mu*beta defines the C^2 sphere
  std::vector<double> beta_star;  // (c/n) beta, normalized so that c(beta_star) = n

  std::size_t dim() const { return beta.size(); }
  /// 2 / b_max, the upper end of the admissible fractional order.
  double alpha_limit() const { return 2.0 / b_max; }
  /// mu * b_i
  double smoothed(std::size_t i) const { return mu * beta[i]; }
};

/// Validates beta and fills the derived fields. Without an override mu is
/// the smallest integer with mu * b_min >= 4.
Anisotropy make_anisotropy(std::vector<double> beta, std::optional<int> mu_override = {});

/// (sum |x_i|^{m b_i})^{1/2}
double quasi_norm(std::span<const double> x, const Anisotropy& a, double multiplier = 1.0);

/// Radial coordinate ||x||_{mu beta}^{1/mu}; homogeneous of degree one under scale_map.
double radial_coordinate(std::span<const double> x, const Anisotropy& a);

/// Implicit distance r solving sum x_i^2 / r^{4/b*_i} = 1 (0 at the origin).
double cbl_distance(std::span<const double> x, const Anisotropy& a);

/// Left side of the defining equation of cbl_distance minus one, at radius r.
double cbl_residual(std::span<const double> x, const Anisotropy& a, double r);

/// T_{beta,r}: x_i -> r^{2/b_i} x_i.
Point scale_map(std::span<const double> x, const Anisotropy& a, double r);

struct SphereProjection {
  double radius = 0.0;
  Point omega;  // on the mu*beta unit sphere
};

/// Polar decomposition x = T_{beta,radius}(omega) with ||omega||_{mu beta} = 1.
SphereProjection project_to_sphere(std::span<const double> x, const Anisotropy& a);

/// y in E_r(center) = {sum (y_i - c_i)^2 / r^{4/b_i} < 1}
bool ellipsoid_contains(std::span<const double> center, double r, const Anisotropy& a,
                        std::span<const double> y);
/// y in Theta_r(center) = {||y - center||_beta < r}
bool ball_contains(std::span<const double> center, double r, const Anisotropy& a,
                   std::span<const double> y);

double unit_ball_volume(std::size_t n);
/// |E_r| = |B_1| * prod r^{2/b_i} = |B_1| r^c
double ellipsoid_volume(double r, const Anisotropy& a);
/// Constant C with Theta_{r sqrt(n)}(x) inside E_{rC}(x): max_i n^{b_i/4 + 1/2}.
double ellipsoid_inclusion_constant(const Anisotropy& a);

/// Odd extension of y -> (|y_i|^{2/e_i} sign(y_i)); maps the Euclidean unit
/// sphere onto the unit sphere of ||.||_e.
Point power_chart(std::span<const double> y, std::span<const double> exponents);
/// Inverse of power_chart.
Point power_chart_inverse(std::span<const double> x, std::span<const double> exponents);

/// Cone weights d_i(x) = |x_i|^{b_i - 2}, or 1 where x_i = 0.
std::vector<double> cone_weights(std::span<const double> x, std::span<const double> exponents);
/// (d_i(y)^{1/2} y_i), mapping the beta-sphere to the Euclidean sphere.
Point cone_chart(std::span<const double> y, std::span<const double> exponents);

struct TriangleConstantEstimate {
  double estimate = 0.0;        // sampled max of ||x+y|| / (||x|| + ||y||)
  double analytic_bound = 0.0;  // max(1, 2^{(b_max-1)/2}), an upper estimate
};

struct InclusionReport {
  std::size_t samples = 0;
  std::size_t violations = 0;  // points breaking E_r in Theta_{r sqrt n} in E_{rC}
  double volume_ratio_error = 0.0;  // max |(|E_{2r}| / |E_r|) / 2^c - 1| over the sampled r
};

/// Random centers in [-3, 3]^n, radii e^{[-2, 2]}, points in a box slightly
/// larger than E_{rC}.
InclusionReport set_inclusion_check(const Anisotropy& a, std::size_t samples, std::uint64_t seed);

TriangleConstantEstimate quasi_triangle_constant(const Anisotropy& a, std::size_t samples,
                                                 std::uint64_t seed);

}  // namespace aniso
