#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "aniso/geometry.hpp"

namespace aniso {

using ScalarFn = std::function<double(std::span<const double>)>;
using VectorFn = std::function<std::vector<double>(std::span<const double>)>;

enum class DecayKind {
  compact,      // u = 0 outside {R(y - anchor) < radius}
  bounded,      // |u| <= bound, nothing known about decay
  homogeneous,  // u(T_r y) = r^{degree} u(y), singular only at 0
};

struct DecayClass {
  DecayKind kind = DecayKind::bounded;
  Point anchor;        // compact: centre of the support
  double radius = 0;   // compact: support radius in the radial coordinate
  double bound = 1.0;  // bounded: sup |u|
};

struct Field {
  ScalarFn eval;
  std::optional<double> homogeneity;  // degree -gamma
  VectorFn gradient;                  // optional
  VectorFn hessian;                   // optional, row-major n x n
  std::function<bool(std::span<const double>)> smoothness_at;  // optional; C^{1,1} points
  DecayClass decay;

  double operator()(std::span<const double> x) const { return eval(x); }
};

Field constant_field(double value);

/// exp(-sum (x_i - c_i)^2 / (2 s_i^2)); treated as compact beyond the
/// radius where it underflows.
Field gaussian_field(const Anisotropy& a, Point center, std::vector<double> sigma);

/// C-infinity bump exp(1 - 1/(1 - |x - c|^2/r^2)) supported in the Euclidean ball B_r(c).
Field bump_field(const Anisotropy& a, Point center, double radius);

/// |x|^{-g}; homogeneous of degree -2g/b when all b_i = b, otherwise untagged.
Field euclidean_power_field(const Anisotropy& a, double g);

/// x -> u(x - h)
Field translated(const Field& u, Point h);

/// s*u + t*v
Field combine(double s, const Field& u, double t, const Field& v);

/// x -> u(T_{beta,r} x)
Field dilated(const Field& u, const Anisotropy& a, double r);

/// Radial-coordinate radius of a Euclidean ball of radius rho centered at the anchor.
double support_radius(const Anisotropy& a, double rho);

/// Hessian from the field's callback, or central differences of eval.
std::vector<double> field_hessian(const Field& u, std::span<const double> x);

}  // namespace aniso
