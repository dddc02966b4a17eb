#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "aniso/field.hpp"
#include "aniso/geometry.hpp"

namespace aniso {

/// Grid samples on the box [-L, L)^n, N points per axis, row-major with the
/// last coordinate fastest. Point j has coordinates -L + j_i * 2L / N.
struct PeriodicSample {
  std::size_t n = 0;
  std::size_t N = 0;
  double L = 0.0;
  std::vector<double> values;

  double spacing() const { return 2.0 * L / static_cast<double>(N); }
  Point point(std::size_t flat) const;
  /// Throws ParameterError for a bad N, DomainError when the boundary shell
  /// exceeds 1e-6 * max |values|.
  void validate() const;
  /// Header "n N L", then one value per line.
  void write(std::ostream& os) const;
  static PeriodicSample read(std::istream& is);
  static PeriodicSample from_field(const Field& u, std::size_t n, std::size_t N, double L);
};

/// Multilinear interpolant of the sample, zero outside the box.
Field sample_field(const PeriodicSample& s);

enum class AverageMethod { tensor, monte_carlo };

struct AverageOptions {
  AverageMethod method = AverageMethod::tensor;
  std::size_t budget = 1 << 20;  // quadrature points or samples
  std::uint64_t seed = 1;
};

struct AverageEstimate {
  double value = 0.0;
  double error = 0.0;
  std::size_t points = 0;
  bool flagged = false;  // budget ran out before the 1e-6 target
};

/// Mean of f over E_r(x).
AverageEstimate ellipsoid_mean(const ScalarFn& f, std::span<const double> x, double r,
                               const Anisotropy& a, const AverageOptions& opt = {});
AverageEstimate ellipsoid_average(const Field& u, std::span<const double> x, double r,
                                  const Anisotropy& a, const AverageOptions& opt = {});

struct SeminormReport {
  double value = 0.0;
  double saturation = 0.0;  // relative change from half the samples to all of them
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool flagged = false;
};

/// sup over sampled centers in [-box, box]^n and the given radii of
/// r^{-alpha q} int_{E_r} |u - u_{x,r}|^q.
SeminormReport campanato_seminorm(const Field& u, const Anisotropy& a, double q, double alpha,
                                  std::size_t centers, const std::vector<double>& radii,
                                  std::uint64_t seed, double box = 1.0, int threads = 1);

struct DecayRow {
  double R = 0.0;
  double r = 0.0;
  double difference = 0.0;  // |u_{x0,R} - u_{x0,r}|
  double ratio = 0.0;       // difference / ([u] R^theta)
};

struct DecayTable {
  std::vector<DecayRow> rows;
  double theta = 0.0;
  double seminorm = 0.0;  // [u]_{q, alpha q} measured at x0 over the radii
  double slope = 0.0;     // least-squares slope of log difference against log R
};

DecayTable decay_oscillation_check(const Field& u, const Anisotropy& a, double q, double alpha,
                                   std::span<const double> x0, const std::vector<double>& radii);

struct HolderOptions {
  std::size_t pairs = 1 << 14;
  std::uint64_t seed = 1;
  std::optional<double> max_pair_distance;
  double box = 2.0;  // first points within ||x||_beta <= box
  int threads = 1;
};

/// Sampled sup of |u(x) - u(y)| / ||x - y||_beta^theta. Pair k depends only on
/// (seed, k), so doubling the pairs never lowers the value.
SeminormReport holder_seminorm(const Field& u, const Anisotropy& a, double theta,
                               const HolderOptions& opt = {});

struct GagliardoOptions {
  std::size_t budget = 1 << 18;
  std::uint64_t seed = 1;
  double box = 4.0;  // u is taken to vanish outside [-box, box]^n
  int threads = 1;
};

struct GagliardoReport {
  double value = 0.0;         // (||u||_q^q + double integral)^{1/q}
  double seminorm = 0.0;      // double integral^{1/q}
  double double_integral = 0.0;
  double lq_norm = 0.0;
  double relative_error = 0.0;  // standard error of the double integral
  std::size_t samples = 0;
  bool flagged = false;
};

GagliardoReport gagliardo_seminorm(const Field& u, const Anisotropy& a, double q, double alpha,
                                   const GagliardoOptions& opt = {});
GagliardoReport gagliardo_seminorm(const PeriodicSample& s, const Anisotropy& a, double q,
                                   double alpha, const GagliardoOptions& opt = {});

struct BesselNorm {
  double value = 0.0;
  std::optional<double> plancherel;  // q = 2 only
};

/// ||F^{-1}[(1 + r_beta(xi)^2)^{alpha/2} F u]||_q with xi = pi k / L.
BesselNorm bessel_norm(const PeriodicSample& s, const Anisotropy& a, double alpha, double q);

struct EmbeddingReport {
  double ratio = 0.0;
  double sup_norm = 0.0;
  double holder = 0.0;
  double bessel = 0.0;
  double theta = 0.0;
};

/// (||u||_inf + [u]_theta) / ||u||_{H^{alpha,q}}, theta = alpha - c/q. The
/// seminorm is sampled over pairs of grid points.
EmbeddingReport embedding_ratio(const PeriodicSample& s, const Anisotropy& a, double alpha,
                                double q, std::size_t pairs = 1 << 15, std::uint64_t seed = 1);

struct VanishingRow {
  double R = 0.0;
  double max_abs = 0.0;
};

struct VanishingTable {
  std::vector<VanishingRow> rows;
  double slope = 0.0;  // log max_abs against log R, over rows with max_abs > 0
  bool decays = false;  // last < 0.05 * first
};

/// Ten anisotropic Gaussians exp(-|T_{2^k}(x - x_j)|^2 / (2 * 0.35^2)), k in
/// [-1/2, 1/2], centers within 1/2 of the origin. Supported well inside [-4, 4]^n.
std::vector<Field> embedding_family(const Anisotropy& a);

/// max |u| over sampled points of the beta spheres of the given radii.
VanishingTable vanishing_at_infinity_check(const Field& u, const Anisotropy& a,
                                           const std::vector<double>& radii,
                                           std::size_t directions = 512, std::uint64_t seed = 1);

/// Point on the beta sphere ||x||_beta = 1 along the Euclidean direction e.
Point beta_sphere_point(std::span<const double> e, const Anisotropy& a);

}  // namespace aniso
