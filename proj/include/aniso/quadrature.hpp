#pragma once

#include <cstdint>
#include <vector>

namespace aniso::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order on [-1, 1]; cached per order.
const Rule& gauss_legendre(int order);

/// Gauss-Legendre rule mapped to [a, b].
Rule gauss_legendre(int order, double a, double b);

/// C-infinity step: 1 for t <= a, 0 for t >= b, smooth and monotone between.
double smooth_cutoff(double t, double a, double b);

/// SplitMix64 mixing of (seed, stream) into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace aniso::quad
