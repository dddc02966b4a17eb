#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "aniso/geometry.hpp"

namespace aniso {

struct QuadPoint {
  Point x;
  double weight = 0.0;
};

/// How Euclidean-sphere directions are carried onto the mu*beta sphere.
/// radial: e -> lambda(e) e, smooth everywhere on the sphere.
/// power: odd extension of y_i -> |y_i|^{2/(mu b_i)}; follows the textbook
/// chart but its Jacobian blows up on the coordinate planes.
enum class SphereChart { radial, power };

/// Convex combination of at most three nodes.
struct Stencil {
  std::array<std::size_t, 3> node{};
  std::array<double, 3> weight{};
  int count = 0;
};

class SphereGrid {
 public:
  const Anisotropy& anisotropy() const { return a_; }
  const std::vector<QuadPoint>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  /// Weights of the polar measure dm with dy = t^{c-1} dt dm(omega) for
  /// y = T_t omega (so sum = c * |unit mu*beta ball|).
  const std::vector<double>& polar_weights() const { return polar_; }
  int resolution() const { return resolution_; }
  SphereChart chart() const { return chart_; }
  /// n = 2 node grading g in [0, 1) with sharpness p: the polar angle has
  /// d theta / ds = 1 + g (m_p - cos^{2p}(s - peak)) / (1 - m_p), m_p the mean
  /// of cos^{2p}, so spacing shrinks by 1 - g on the axis through `peak`.
  double grading() const { return grading_; }
  double min_spacing() const;

  double total_weight() const;
  double total_polar_weight() const;

  /// Interpolation stencil for any nonzero point; x is first projected
  /// onto the sphere along the scaling orbit.
  Stencil locate(std::span<const double> x) const;
  double interpolate(std::span<const double> x, std::span<const double> values) const;

  /// n = 2 only: chart parameter s in [0, 2 pi) of node k and of a point.
  double parameter_of_node(std::size_t k) const;
  double parameter_of(std::span<const double> x) const;
  /// n = 2 only: sphere point at chart parameter s.
  Point point_at(double s) const;
  /// n = 2 only: polar angle of the chart parameter s, and its inverse.
  double angle_of(double s) const;
  double parameter_of_angle(double theta) const;

  void write_csv(std::ostream& os) const;

  friend SphereGrid build_sphere_grid(const Anisotropy& a, int resolution, SphereChart chart,
                                      double grading, double peak, int sharpness);

 private:
  Point direction_to_sphere(std::span<const double> e) const;
  Point sphere_to_direction(std::span<const double> omega) const;

  Anisotropy a_;
  std::vector<QuadPoint> nodes_;
  std::vector<double> polar_;
  int resolution_ = 0;
  SphereChart chart_ = SphereChart::radial;
  double grading_ = 0.0;
  double peak_ = 0.0;
  std::vector<double> warp_;  // sin(2k(s - peak)) coefficients of theta(s) - s
  std::map<std::array<int, 3>, std::size_t> lattice_;  // octahedral vertex -> node, n = 3
};

/// n = 2: `resolution` nodes equally spaced in the chart parameter. n = 3:
/// octahedron with `resolution` divisions per edge (4 m^2 + 2 nodes).
/// n = 1: the two points. Grading is for n = 2 only.
SphereGrid build_sphere_grid(const Anisotropy& a, int resolution,
                             SphereChart chart = SphereChart::radial, double grading = 0.0,
                             double peak = 0.0, int sharpness = 1);

/// Point on the mu*beta sphere along the Euclidean direction e.
Point radial_sphere_point(std::span<const double> e, const Anisotropy& a);

/// Polar density 2 mu / |grad F| at omega, F = sum |omega_i|^{mu b_i}.
double polar_density(std::span<const double> omega, const Anisotropy& a);

}  // namespace aniso
