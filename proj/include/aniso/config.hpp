#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aniso/geometry.hpp"
#include "aniso/operator.hpp"

namespace aniso {

/// Test fields the harness can build from a config.
struct FieldSpec {
  std::string kind = "gaussian";  // constant, gaussian, bump, barrier, power
  double value = 1.0;             // constant
  double gamma = 0.1;             // barrier
  double exponent = 0.4;          // power: ||x||_beta^exponent, tapered beyond radius
  Point center;                   // gaussian, bump
  std::vector<double> sigma;      // gaussian, one per axis or a single value
  double radius = 1.0;            // bump; power taper
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> resolution;
  std::optional<std::string> out;
};

struct RunConfig {
  std::string command;

  std::vector<double> beta;
  std::optional<int> mu;
  std::optional<double> alpha;
  std::uint64_t seed = 1;
  int threads = 1;
  std::optional<int> resolution;
  std::string out = ".";
  QuadratureConfig quadrature;

  // eval
  FieldSpec field;
  std::vector<Point> points;
  std::optional<double> scale;  // homogeneity check T_r

  // barrier-sweep
  std::vector<double> alphas;
  std::vector<double> gammas;

  // gamma-star, fundsol
  std::optional<double> lo;
  std::optional<double> hi;
  double tol = 1e-3;
  std::size_t bound_points = 1000;

  // norms
  double q = 2.0;
  std::optional<double> theta;
  std::size_t centers = 64;
  std::vector<double> radii;
  std::size_t pairs = 1 << 14;
  std::size_t budget = 1 << 18;
  std::size_t grid = 128;
  double box = 4.0;
  std::string sample;  // PeriodicSample file; replaces `field` when set
  Point x0;
  std::vector<double> vanish_radii;

  // embed-check
  std::vector<std::size_t> grids{64, 128};

  // geometry
  std::size_t samples = 10000;

  Anisotropy anisotropy() const;
  int resolution_or(int fallback) const { return resolution.value_or(fallback); }
};

const std::vector<std::string>& subcommands();

/// Parses and validates `text` for `command`. Every syntax error, unknown or
/// duplicate key and violated precondition is collected; a ConfigError listing
/// all of them is thrown if there is at least one.
RunConfig parse_config(const std::string& text, const std::string& command,
                       const Overrides& overrides = {});

}  // namespace aniso
