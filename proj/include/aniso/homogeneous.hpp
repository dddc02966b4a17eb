#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "aniso/io.hpp"
#include "aniso/operator.hpp"
#include "aniso/sphere_grid.hpp"
#include "aniso/spline.hpp"

namespace aniso {

/// Node values of phi on the mu*beta sphere; the induced field is
/// u(x) = R(x)^{-gamma} phi(pi(x)) with phi the periodic spline through the values.
class HomogeneousProfile {
 public:
  HomogeneousProfile(std::shared_ptr<const SphereGrid> grid, std::vector<double> values,
                     double gamma);

  const SphereGrid& grid() const { return *grid_; }
  std::shared_ptr<const SphereGrid> grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double gamma() const { return gamma_; }
  bool positive() const;

  /// phi at chart parameter s
  double sphere_value(double s) const { return spline_(s); }
  double induced(std::span<const double> x) const;
  /// columns node_index, x_1..x_n, psi_value
  void write_csv(std::ostream& os) const;

 private:
  std::shared_ptr<const SphereGrid> grid_;
  std::vector<double> values_;
  double gamma_ = 0.0;
  PeriodicSpline spline_;
};

struct AssemblyDiagnostics {
  double near_radius = 0.0;
  double inner_radius = 0.0;  // below this the near field is the Hessian model
  double far_cutoff = 0.0;
  int shells = 0;
  std::size_t far_nodes = 0;         // radial nodes per row
  std::size_t singular_samples = 0;  // samples that hit the origin and were dropped
};

/// (L phi)_i = D_i phi_i + sum_j W_ij phi_j, W with zero diagonal.
struct ProfileOperator {
  Anisotropy anisotropy;
  double alpha = 0.0;
  double gamma = 0.0;
  std::shared_ptr<const SphereGrid> grid;
  std::vector<double> D;
  std::vector<double> W;  // row-major
  AssemblyDiagnostics diagnostics;

  std::size_t size() const { return D.size(); }
  std::vector<double> apply(std::span<const double> phi) const;
  /// D + W as a dense row-major matrix
  std::vector<double> dense() const;
};

/// n = 2 only; the grid must use the radial chart.
ProfileOperator assemble_profile_operator(const Anisotropy& a, double alpha, double gamma,
                                          const SphereGrid& grid, const QuadratureConfig& cfg,
                                          int threads = 1);

struct PoissonSolution {
  HomogeneousProfile profile;
  double min_value = 0.0;
  double max_abs = 0.0;
  double rcond = 0.0;
  double residual = 0.0;  // ||L phi - 1||_inf
  bool near_critical = false;
};

PoissonSolution solve_homogeneous_poisson(const ProfileOperator& P);

struct EigenResult {
  double value = 0.0;
  std::vector<double> vector;  // unit Euclidean norm, sum >= 0
  double residual = 0.0;       // ||L v - value v||_inf / ||v||_inf
  int iterations = 0;
  bool converged = false;
};

/// Inverse iteration with shift 0; start vector all ones, or random for seed != 0.
EigenResult principal_eigenpair(const ProfileOperator& P, double tol = 1e-12,
                                std::uint64_t seed = 0, int max_iterations = 500);

struct GammaStarResult {
  double gamma_star = 0.0;
  double bracket_lo = 0.0;  // final bisection bracket
  double bracket_hi = 0.0;
  double eigenvalue_lo = 0.0;
  double eigenvalue_hi = 0.0;
  double eigenvalue_at_star = 0.0;
  bool eigen_crossing = false;   // principal eigenvalue changes sign within 2 tol
  bool threshold_bound = false;  // blow-up threshold decided some step
  int steps = 0;
  double tol = 0.0;

  KeyValues key_values() const;
};

/// Sphere grid for profiles: uniform when all b_i agree, otherwise graded
/// toward the axis of the largest b_i, where the profile peaks sharply.
SphereGrid profile_grid(const Anisotropy& a, int resolution);

GammaStarResult gamma_star(const Anisotropy& a, double alpha, const SphereGrid& grid,
                           const QuadratureConfig& cfg, std::optional<double> lo = {},
                           std::optional<double> hi = {}, double tol = 1e-3, int threads = 1);

struct FundamentalSolution {
  HomogeneousProfile psi;
  GammaStarResult search;
  double gamma = 0.0;       // where the principal eigenvalue vanishes
  double eigenvalue = 0.0;  // at gamma
  double eigen_residual = 0.0;
  double m0 = 0.0;  // min / max of the induced field on the beta sphere
  double harnack = 0.0;

  KeyValues key_values() const;
};

FundamentalSolution fundamental_solution(const Anisotropy& a, double alpha,
                                         const SphereGrid& grid, const QuadratureConfig& cfg,
                                         double tol = 1e-3, int threads = 1);

struct BoundsCheck {
  std::size_t points = 0;
  std::size_t violations = 0;  // points outside m0 ||x||^{-g} <= Psi <= ||x||^{-g} beyond the slack
  double worst_upper = 0.0;    // max of ||x||_beta^g Psi(x) - 1
  double worst_lower = 0.0;    // max of m0 - ||x||_beta^g Psi(x)
};

/// Random x = T_t(omega), omega on the beta sphere, t log-uniform in [1e-2, 1e2];
/// relative slack on both sides.
BoundsCheck two_sided_bounds_check(const FundamentalSolution& fs, std::size_t points,
                                   std::uint64_t seed, double slack = 1e-6);

/// max / min of the node values
double harnack_ratio(const HomogeneousProfile& psi);

/// Sampled sup of |Psi(x) - Psi(y)| / ||x - y||^theta over 1/2 <= ||x|| <= 2,
/// ||x - y|| <= 1, in the beta quasi-norm.
double holder_seminorm_of_psi(const HomogeneousProfile& psi, double theta, std::size_t pairs,
                              std::uint64_t seed);

/// Extremes of ||omega||_beta^gamma phi(omega) over the continuous sphere,
/// i.e. of ||x||_beta^gamma Psi(x).
struct BetaSphereRange {
  double min = 0.0;
  double max = 0.0;
};
BetaSphereRange beta_sphere_range(const HomogeneousProfile& psi);

}  // namespace aniso
