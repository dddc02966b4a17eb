#pragma once

#include <memory>
#include <span>
#include <vector>

#include "aniso/field.hpp"
#include "aniso/geometry.hpp"
#include "aniso/sphere_grid.hpp"

namespace aniso {

enum class TailMode { analytic_homogeneous, truncate };

struct QuadratureConfig {
  double near_radius = 0.5;
  double far_cutoff = 1048576.0;  // 2^20
  double rel_tol = 1e-8;
  int max_subdivisions = 40;
  TailMode tail_mode = TailMode::analytic_homogeneous;
  int angular_resolution = 0;  // 0: 512 nodes for n = 2, 16 edge divisions for n = 3
  int radial_order = 10;       // Gauss-Legendre points per radial panel

  void validate() const;
};

struct OperatorResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double near_part = 0.0;
  double far_part = 0.0;
  double tail_part = 0.0;
  bool flagged = false;  // subdivision limit hit; error_estimate is then kErrorSentinel
};

inline constexpr double kErrorSentinel = 1e300;

/// 2 / b_max - alpha
double normalization_constant(const Anisotropy& a, double alpha);

/// Precomputed angular data for one (A, alpha, cfg); reusable across points and fields.
class KernelQuadrature {
 public:
  KernelQuadrature(const Anisotropy& a, double alpha, const QuadratureConfig& cfg);

  OperatorResult apply(const Field& u, std::span<const double> x) const;

  const SphereGrid& grid() const { return *grid_; }
  const Anisotropy& anisotropy() const { return a_; }
  double alpha() const { return alpha_; }
  const QuadratureConfig& config() const { return cfg_; }
  /// sum_q dm_q ||eta_q||_beta^{-c-2 alpha}: angular mass of the kernel.
  double kernel_mass() const { return mass_; }
  /// kernel weights per node (dm_q times the kernel's angular factor)
  const std::vector<double>& kernel_weights() const { return kw_; }
  /// int_0^inf (1 - chi(t)) t^{-1-2 alpha} dt for the unit cutoff chi = cutoff(t, 1/2, 1)
  double unit_far_integral() const { return jfar_; }

 private:
  double near_field(const Field& u, std::span<const double> x, double rho, double* err,
                    bool* flagged) const;
  double far_bounded(const Field& u, std::span<const double> x, double rho) const;
  double far_anchored(const Field& u, std::span<const double> x, double rho) const;
  double far_homogeneous(const Field& u, std::span<const double> x, double rho,
                         std::span<const double> uq) const;

  Anisotropy a_;
  double alpha_;
  QuadratureConfig cfg_;
  std::shared_ptr<const SphereGrid> grid_;
  std::vector<double> kw_;
  std::vector<double> moments_;  // sum_q kw_q eta_i eta_j, row-major
  double mass_ = 0.0;
  double jfar_ = 0.0;
};

OperatorResult eval_operator(const Field& u, std::span<const double> x, const Anisotropy& a,
                             double alpha, const QuadratureConfig& cfg = {});

struct HomogeneityCheck {
  double relative_error = 0.0;
  bool inconclusive = false;  // Delta u(x) below the noise floor
};

HomogeneityCheck homogeneity_identity_check(const Field& u, std::span<const double> x, double r,
                                            const Anisotropy& a, double alpha,
                                            const QuadratureConfig& cfg = {});

struct IntegrabilityReport {
  double near = 0.0;  // int over ||y||_{mu beta} < r of |y|^2 K(y)
  double far = 0.0;   // int over the complement of K(y)
};

IntegrabilityReport kernel_integrability_report(const Anisotropy& a, double alpha, double r,
                                                int resolution = 0);

/// Kernel ||z||_beta^{-c-2 alpha} (without the normalization constant).
double kernel_value(std::span<const double> z, const Anisotropy& a, double alpha);

/// Default angular resolution for dimension n.
int default_angular_resolution(std::size_t n);

}  // namespace aniso
