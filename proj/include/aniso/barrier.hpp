#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "aniso/field.hpp"
#include "aniso/operator.hpp"
#include "aniso/sphere_grid.hpp"

namespace aniso {

/// u_gamma(x) = ||x||_{mu beta}^{-gamma/mu} with exact derivatives.
struct BarrierField {
  Anisotropy anisotropy;
  double gamma = 0.0;
  Field field;
};

BarrierField barrier(const Anisotropy& a, double gamma);

std::vector<double> barrier_gradient(const BarrierField& b, std::span<const double> x);
/// Row-major n x n Hessian.
std::vector<double> barrier_hessian(const BarrierField& b, std::span<const double> x);

struct ConeSpec {
  Point apex;  // on the beta unit sphere
  double delta = 0.0;
  std::vector<double> d;  // |apex_i|^{b_i - 2}, or 1 where apex_i = 0
};

/// Apex is pulled back to the beta unit sphere along its scaling orbit.
ConeSpec make_cone(const Anisotropy& a, std::span<const double> apex, double delta);

/// y in Omega = {|<x,y>_x| <= (1 - delta) ||x||_x ||y||_x}
bool cone_membership(const ConeSpec& c, std::span<const double> y);

/// Surface measure of the grid nodes outside the cone.
double cone_complement_measure(const Anisotropy& a, double delta, const SphereGrid& grid,
                               std::span<const double> apex);

struct DeltaThresholdReport {
  std::vector<double> deltas;
  std::vector<double> worst_measure;  // max over apexes, per delta
  double bound = 0.0;                 // c0 |S| / (2n)
  std::optional<double> delta0;       // largest delta where every apex satisfies the bound
  bool delta0_above_half = false;
};

/// Apexes are the grid nodes pulled back to the beta sphere.
DeltaThresholdReport cone_delta_threshold(const Anisotropy& a, const SphereGrid& grid,
                                          const std::vector<double>& deltas, double c0 = 1.0);

/// g_k(t) with exponent (gamma + 2 alpha) / mu.
double gk_truncation(double t, int k, double gamma, double alpha, const Anisotropy& a);

struct SweepCell {
  double alpha = 0.0;
  double gamma = 0.0;
  double min_value = 0.0;
  std::size_t argmin_node = 0;
  double error_estimate = 0.0;
  bool error_flag = false;
};

struct SweepTable {
  std::vector<double> alphas;
  std::vector<double> gammas;
  std::vector<SweepCell> cells;  // gamma-major, alpha-minor
  std::vector<std::optional<double>> alpha0;  // per gamma: smallest grid alpha with m > 0
  std::vector<double> end_slope;              // per gamma: dm/dalpha over the last two alphas

  const SweepCell& at(std::size_t ia, std::size_t ig) const { return cells[ig * alphas.size() + ia]; }
  void write_csv(std::ostream& os) const;
};

std::vector<double> default_alpha_grid(const Anisotropy& a);
std::vector<double> default_gamma_grid(const Anisotropy& a);

/// m(alpha, gamma) = min over the grid of Delta u_gamma. The grid must lie on the
/// mu*beta sphere of `a`; only nodes with all coordinates >= 0 are evaluated since
/// u_gamma and the kernel are even in every coordinate.
SweepTable barrier_sweep(const Anisotropy& a, const std::vector<double>& alphas,
                         const std::vector<double>& gammas, const SphereGrid& grid,
                         const QuadratureConfig& cfg, int threads = 1);

}  // namespace aniso
