#include "aniso/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "aniso/errors.hpp"
#include "aniso/io.hpp"
#include "aniso/parallel.hpp"

namespace aniso {

namespace {

// S = sum |x_i|^{bt_i} and v_i = bt_i |x_i|^{bt_i - 2} x_i
double barrier_parts(const Anisotropy& a, std::span<const double> x, std::vector<double>* v) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double bt = a.smoothed(i);
    const double ax = std::abs(x[i]);
    if (ax == 0.0) {
      if (v) (*v)[i] = 0.0;
      continue;
    }
    const double p = std::pow(ax, bt);
    s += p;
    if (v) (*v)[i] = bt * p / x[i];
  }
  return s;
}

}  // namespace

BarrierField barrier(const Anisotropy& a, double gamma) {
  if (!(gamma > 0.0)) throw ParameterError("barrier: gamma must be positive");
  BarrierField b;
  b.anisotropy = a;
  b.gamma = gamma;
  const double g = gamma / a.mu;
  b.field.eval = [a, g](std::span<const double> x) {
    return std::pow(barrier_parts(a, x, nullptr), -0.5 * g);
  };
  b.field.homogeneity = -gamma;
  b.field.decay.kind = DecayKind::homogeneous;
  b.field.smoothness_at = [a](std::span<const double> x) { return quasi_norm(x, a) > 0.0; };
  const BarrierField copy = b;
  b.field.gradient = [copy](std::span<const double> x) { return barrier_gradient(copy, x); };
  b.field.hessian = [copy](std::span<const double> x) { return barrier_hessian(copy, x); };
  return b;
}

std::vector<double> barrier_gradient(const BarrierField& b, std::span<const double> x) {
  const auto& a = b.anisotropy;
  std::vector<double> v(a.dim());
  const double s = barrier_parts(a, x, &v);
  if (!(s > 0.0)) throw DomainError("barrier gradient at the origin");
  const double g = b.gamma / a.mu;
  const double f = -0.5 * g * std::pow(s, -0.5 * g - 1.0);
  for (double& vi : v) vi *= f;
  return v;
}

std::vector<double> barrier_hessian(const BarrierField& b, std::span<const double> x) {
  const auto& a = b.anisotropy;
  const std::size_t n = a.dim();
  std::vector<double> v(n);
  const double s = barrier_parts(a, x, &v);
  if (!(s > 0.0)) throw DomainError("barrier Hessian at the origin");
  const double g = b.gamma / a.mu;
  // N = S^{1/2}; off-diagonal g(g+2)/4 N^{-g-4} v_i v_j
  const double base = 0.25 * g * std::pow(s, -0.5 * g - 2.0);
  std::vector<double> h(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) {
        h[i * n + j] = base * (g + 2.0) * v[i] * v[j];
      } else {
        const double bt = a.smoothed(i);
        const double ax = std::abs(x[i]);
        const double lower =
            ax == 0.0 ? (bt > 2.0 ? 0.0 : bt == 2.0 ? 1.0 : INFINITY) : std::pow(ax, bt - 2.0);
        h[i * n + i] = base * ((g + 2.0) * v[i] * v[i] - 2.0 * s * bt * (bt - 1.0) * lower);
      }
    }
  }
  return h;
}

ConeSpec make_cone(const Anisotropy& a, std::span<const double> apex, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("cone aperture delta must lie in (0,1)");
  const double r = quasi_norm(apex, a);
  if (!(r > 0.0)) throw DomainError("cone apex must be nonzero");
  ConeSpec c;
  c.apex = scale_map(apex, a, 1.0 / r);
  c.delta = delta;
  c.d = cone_weights(c.apex, a.beta);
  return c;
}

bool cone_membership(const ConeSpec& c, std::span<const double> y) {
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < c.apex.size(); ++i) {
    xy += c.d[i] * c.apex[i] * y[i];
    xx += c.d[i] * c.apex[i] * c.apex[i];
    yy += c.d[i] * y[i] * y[i];
  }
  return std::abs(xy) <= (1.0 - c.delta) * std::sqrt(xx) * std::sqrt(yy);
}

double cone_complement_measure(const Anisotropy& a, double delta, const SphereGrid& grid,
                               std::span<const double> apex) {
  const auto cone = make_cone(a, apex, delta);
  double m = 0.0;
  for (const auto& q : grid.nodes()) {
    if (!cone_membership(cone, q.x)) m += q.weight;
  }
  return m;
}

DeltaThresholdReport cone_delta_threshold(const Anisotropy& a, const SphereGrid& grid,
                                          const std::vector<double>& deltas, double c0) {
  DeltaThresholdReport rep;
  rep.deltas = deltas;
  std::sort(rep.deltas.begin(), rep.deltas.end());
  rep.bound = c0 * grid.total_weight() / (2.0 * static_cast<double>(a.dim()));
  bool holding = true;
  for (double d : rep.deltas) {
    double worst = 0.0;
    for (const auto& q : grid.nodes()) worst = std::max(worst, cone_complement_measure(a, d, grid, q.x));
    rep.worst_measure.push_back(worst);
    if (holding && worst <= rep.bound) rep.delta0 = d; else holding = false;
  }
  rep.delta0_above_half = rep.delta0 && *rep.delta0 > 0.5;
  return rep;
}

double gk_truncation(double t, int k, double gamma, double alpha, const Anisotropy& a) {
  if (!(t > 0.0)) throw ParameterError("gk_truncation: t must be positive");
  if (k < 0) throw ParameterError("gk_truncation: k must be nonnegative");
  const double e = (gamma + 2.0 * alpha) / a.mu;
  const double lo = std::ldexp(1.0, -k), hi = std::ldexp(1.0, k);
  if (t < lo) return std::pow(2.0, e * k);
  if (t < hi) return std::pow(t, -e);
  return 0.0;
}

std::vector<double> default_alpha_grid(const Anisotropy& a) {
  std::vector<double> g(12);
  for (int i = 0; i < 12; ++i) g[i] = (0.5 + 0.48 * i / 11.0) * a.alpha_limit();
  return g;
}

std::vector<double> default_gamma_grid(const Anisotropy& a) {
  const double f = std::min(1.0, a.c / 2.0);
  std::vector<double> g;
  for (double v : {0.05, 0.1, 0.25, 0.5, 1.0, 1.5}) g.push_back(v * f);
  return g;
}

SweepTable barrier_sweep(const Anisotropy& a, const std::vector<double>& alphas,
                         const std::vector<double>& gammas, const SphereGrid& grid,
                         const QuadratureConfig& cfg, int threads) {
  if (alphas.empty() || gammas.empty()) throw ParameterError("barrier_sweep: empty grid");
  for (double al : alphas) normalization_constant(a, al);
  for (double g : gammas) {
    if (!(g > 0.0 && g < a.c)) throw ParameterError("barrier_sweep: gamma must lie in (0, c)");
  }
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& x = grid.nodes()[k].x;
    if (std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0; })) nodes.push_back(k);
  }
  std::vector<KernelQuadrature> kernels;
  for (double al : alphas) kernels.emplace_back(a, al, cfg);
  std::vector<BarrierField> fields;
  for (double g : gammas) fields.push_back(barrier(a, g));

  const std::size_t na = alphas.size(), ng = gammas.size(), nn = nodes.size();
  std::vector<OperatorResult> vals(na * ng * nn);
  parallel_for(vals.size(), threads, [&](std::size_t idx) {
    const std::size_t node = idx % nn, cell = idx / nn;
    const std::size_t ia = cell % na, ig = cell / na;
    vals[idx] = kernels[ia].apply(fields[ig].field, grid.nodes()[nodes[node]].x);
  });

  SweepTable t;
  t.alphas = alphas;
  t.gammas = gammas;
  for (std::size_t ig = 0; ig < ng; ++ig) {
    for (std::size_t ia = 0; ia < na; ++ia) {
      SweepCell c;
      c.alpha = alphas[ia];
      c.gamma = gammas[ig];
      c.min_value = INFINITY;
      for (std::size_t k = 0; k < nn; ++k) {
        const auto& r = vals[(ig * na + ia) * nn + k];
        if (r.value < c.min_value) {
          c.min_value = r.value;
          c.argmin_node = nodes[k];
          c.error_estimate = r.error_estimate;
        }
        c.error_flag = c.error_flag || r.flagged;
      }
      t.cells.push_back(c);
    }
    std::optional<double> a0;
    for (std::size_t ia = 0; ia < na; ++ia) {
      if (t.at(ia, ig).min_value > 0.0) {
        a0 = alphas[ia];
        break;
      }
    }
    t.alpha0.push_back(a0);
    t.end_slope.push_back(na >= 2 ? (t.at(na - 1, ig).min_value - t.at(na - 2, ig).min_value) /
                                        (alphas[na - 1] - alphas[na - 2])
                                  : 0.0);
  }
  return t;
}

void SweepTable::write_csv(std::ostream& os) const {
  os << "alpha,gamma,min_value,argmin_node,error_flag\n";
  for (const auto& c : cells) {
    os << fmt(c.alpha) << ',' << fmt(c.gamma) << ',' << fmt(c.min_value) << ',' << c.argmin_node
       << ',' << (c.error_flag ? 1 : 0) << '\n';
  }
}

}  // namespace aniso
