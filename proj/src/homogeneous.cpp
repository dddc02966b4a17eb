#include "aniso/homogeneous.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "aniso/errors.hpp"
#include "aniso/parallel.hpp"
#include "aniso/quadrature.hpp"

namespace aniso {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double abs_pow(double v, double e) {
  const double x = std::abs(v);
  if (e == 2.0) return x * x;
  if (e == 4.0) return (x * x) * (x * x);
  if (e == 8.0) {
    const double x4 = (x * x) * (x * x);
    return x4 * x4;
  }
  return x == 0.0 ? 0.0 : std::pow(x, e);
}

double power_sum(std::span<const double> d, const Anisotropy& a, double m) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += abs_pow(d[i], m * a.beta[i]);
  return s;
}

// radial coordinate and chart parameter of a point (radial chart, n = 2)
bool polar_of(std::span<const double> y, const SphereGrid& g, double* r, double* s) {
  const auto& a = g.anisotropy();
  const double p = power_sum(y, a, a.mu);
  if (!(p > 0.0)) return false;
  *r = std::pow(p, 0.5 / a.mu);
  const double w0 = y[0] * std::pow(*r, -2.0 / a.beta[0]);
  const double w1 = y[1] * std::pow(*r, -2.0 / a.beta[1]);
  double t = std::atan2(w1, w0);
  if (t < 0.0) t += kTwoPi;
  t = g.parameter_of_angle(t);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  *s = t;
  return true;
}

struct RadialRule {
  std::vector<double> t;
  std::vector<double> w;
};

void append_log_panels(RadialRule& r, double lo, double hi, int pieces, int order) {
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (int p = 0; p < pieces; ++p) {
    const auto g = quad::gauss_legendre(order, l0 + (l1 - l0) * p / pieces,
                                        l0 + (l1 - l0) * (p + 1) / pieces);
    for (int k = 0; k < order; ++k) {
      const double t = std::exp(g.nodes[k]);
      r.t.push_back(t);
      r.w.push_back(g.weights[k] * t);
    }
  }
}

void check_grid(const Anisotropy& a, const SphereGrid& grid) {
  if (a.dim() != 2) throw ParameterError("homogeneous solver supports n = 2 only");
  if (grid.chart() != SphereChart::radial) {
    throw ParameterError("homogeneous solver needs a radial-chart sphere grid");
  }
  const auto& g = grid.anisotropy();
  if (g.beta != a.beta || g.mu != a.mu) {
    throw ParameterError("sphere grid was built for a different anisotropy");
  }
}

Eigen::MatrixXd to_matrix(const ProfileOperator& P) {
  const std::size_t N = P.size();
  Eigen::MatrixXd L(N, N);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) L(i, j) = P.W[i * N + j];
    L(i, i) += P.D[i];
  }
  return L;
}

double beta_norm(std::span<const double> x, const Anisotropy& a) { return quasi_norm(x, a); }

}  // namespace

HomogeneousProfile::HomogeneousProfile(std::shared_ptr<const SphereGrid> grid,
                                       std::vector<double> values, double gamma)
    : grid_(std::move(grid)), values_(std::move(values)), gamma_(gamma), spline_(values_) {
  if (grid_->size() != values_.size()) throw ParameterError("profile size does not match grid");
}

bool HomogeneousProfile::positive() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
}

double HomogeneousProfile::induced(std::span<const double> x) const {
  double r = 0.0, s = 0.0;
  if (!polar_of(x, *grid_, &r, &s)) throw DomainError("profile evaluated at 0");
  return std::pow(r, -gamma_) * spline_(s);
}

void HomogeneousProfile::write_csv(std::ostream& os) const {
  const std::size_t n = grid_->anisotropy().dim();
  os << "node_index";
  for (std::size_t i = 1; i <= n; ++i) os << ",x_" << i;
  os << ",psi_value\n";
  for (std::size_t k = 0; k < values_.size(); ++k) {
    os << k;
    for (double v : grid_->nodes()[k].x) os << ',' << fmt(v);
    os << ',' << fmt(values_[k]) << '\n';
  }
}

std::vector<double> ProfileOperator::apply(std::span<const double> phi) const {
  const std::size_t N = size();
  if (phi.size() != N) throw ParameterError("profile operator: size mismatch");
  std::vector<double> out(N);
  for (std::size_t i = 0; i < N; ++i) {
    double s = D[i] * phi[i];
    for (std::size_t j = 0; j < N; ++j) s += W[i * N + j] * phi[j];
    out[i] = s;
  }
  return out;
}

std::vector<double> ProfileOperator::dense() const {
  const std::size_t N = size();
  std::vector<double> m = W;
  for (std::size_t i = 0; i < N; ++i) m[i * N + i] += D[i];
  return m;
}

ProfileOperator assemble_profile_operator(const Anisotropy& a, double alpha, double gamma,
                                          const SphereGrid& grid, const QuadratureConfig& cfg,
                                          int threads) {
  check_grid(a, grid);
  const double C = normalization_constant(a, alpha);
  cfg.validate();
  if (!(gamma > 0.0 && gamma < a.c)) throw ParameterError("profile operator: gamma must lie in (0, c)");
  const std::size_t N = grid.size(), n = 2;
  const auto& nodes = grid.nodes();
  const auto& polar = grid.polar_weights();

  std::vector<double> kw(N), moments(n * n, 0.0);
  double mass = 0.0;
  for (std::size_t q = 0; q < N; ++q) {
    const auto& eta = nodes[q].x;
    kw[q] = polar[q] * kernel_value(eta, a, alpha);
    mass += kw[q];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) moments[i * n + j] += kw[q] * eta[i] * eta[j];
  }
  double jfar = 1.0 / (2.0 * alpha);
  {
    RadialRule r;
    append_log_panels(r, 0.5, 1.0, 8, 20);
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      jfar += r.w[k] * (1.0 - quad::smooth_cutoff(r.t[k], 0.5, 1.0)) *
              std::pow(r.t[k], -1.0 - 2.0 * alpha);
    }
  }

  const double rho = std::min(cfg.near_radius, 0.5);
  const double rinf = cfg.far_cutoff;
  const double knot = grid.min_spacing();
  // go down until the shells are far inside one spline interval
  int shells = static_cast<int>(std::ceil(std::log2(0.5 * rho / (1e-2 * knot))));
  shells = std::clamp(shells, 4, cfg.max_subdivisions);
  const double inner = 0.5 * rho * std::pow(0.5, shells);
  const int order = cfg.radial_order;
  const int near_order = std::max(4, order - 2);

  // near-field radial samples: (t, weight including t^{-1-2 alpha} and the cutoff)
  RadialRule near;
  {
    RadialRule r;
    append_log_panels(r, 0.5 * rho, rho, 4, near_order);
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      const double w = r.w[k] * std::pow(r.t[k], -1.0 - 2.0 * alpha) *
                       quad::smooth_cutoff(r.t[k], 0.5 * rho, rho);
      if (w == 0.0) continue;
      near.t.push_back(r.t[k]);
      near.w.push_back(w);
    }
    RadialRule d;
    append_log_panels(d, inner, 0.5 * rho, shells, std::max(4, near_order - 2));
    for (std::size_t k = 0; k < d.t.size(); ++k) {
      near.t.push_back(d.t[k]);
      near.w.push_back(d.w[k] * std::pow(d.t[k], -1.0 - 2.0 * alpha));
    }
  }

  // far-field radial rule in s for y = T_s omega, weights carry s^{c-1-gamma}
  RadialRule far;
  {
    const double e = a.c - gamma;
    const double s0 = 0.25;
    const auto g = quad::gauss_legendre(2 * order, 0.0, 1.0);
    for (int k = 0; k < 2 * order; ++k) {
      far.t.push_back(s0 * std::pow(g.nodes[k], 1.0 / e));
      far.w.push_back(g.weights[k] * std::pow(s0, e) / e);
    }
    const std::size_t first = far.t.size();
    append_log_panels(far, s0, 4.0, 48, std::max(4, order - 4));
    for (double s = 4.0; s < rinf; s *= 2.0) {
      append_log_panels(far, s, std::min(2.0 * s, rinf), 1, std::max(4, order / 2));
    }
    for (std::size_t k = first; k < far.t.size(); ++k) far.w[k] *= std::pow(far.t[k], e - 1.0);
  }
  std::vector<std::vector<double>> far_scale(far.t.size(), std::vector<double>(n));
  for (std::size_t k = 0; k < far.t.size(); ++k)
    for (std::size_t i = 0; i < n; ++i) far_scale[k][i] = std::pow(far.t[k], 2.0 / a.beta[i]);

  const auto sinv = PeriodicSpline::interpolation_inverse(N);

  ProfileOperator P;
  P.anisotropy = a;
  P.alpha = alpha;
  P.gamma = gamma;
  P.grid = std::make_shared<const SphereGrid>(grid);
  P.D.assign(N, 0.0);
  P.W.assign(N * N, 0.0);
  P.diagnostics.near_radius = rho;
  P.diagnostics.inner_radius = inner;
  P.diagnostics.far_cutoff = rinf;
  P.diagnostics.shells = shells;
  P.diagnostics.far_nodes = far.t.size();
  std::vector<std::size_t> singular(N, 0);

  parallel_for(N, threads, [&](std::size_t i) {
    const auto& x = nodes[i].x;
    std::vector<double> rowc(N, 0.0), rowp(N, 0.0);
    double yb[2];
    // adds w * u(y) in spline-coefficient space
    auto lin = [&](const double* y, double w) {
      double r = 0.0, s = 0.0;
      if (!polar_of(std::span<const double>(y, 2), grid, &r, &s)) {
        ++singular[i];
        return;
      }
      const auto st = PeriodicSpline::stencil(s, N);
      const double f = w * std::pow(r, -gamma);
      for (int j = 0; j < 4; ++j) rowc[st.index[j]] += f * st.weight[j];
    };

    // near field, symmetric second differences
    for (std::size_t k = 0; k < near.t.size(); ++k) {
      const double t = near.t[k];
      const double s0 = std::pow(t, 2.0 / a.beta[0]), s1 = std::pow(t, 2.0 / a.beta[1]);
      for (std::size_t q = 0; q < N; ++q) {
        const auto& eta = nodes[q].x;
        const double w = near.w[k] * kw[q];
        const double z0 = s0 * eta[0], z1 = s1 * eta[1];
        yb[0] = x[0] + z0;
        yb[1] = x[1] + z1;
        lin(yb, -0.5 * w);
        yb[0] = x[0] - z0;
        yb[1] = x[1] - z1;
        lin(yb, -0.5 * w);
        rowp[i] += w;
      }
    }
    // Hessian model below the innermost shell, Hessian by central differences
    {
      const double h = 1e-3;
      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p; q < n; ++q) {
          const double ex = 2.0 / a.beta[p] + 2.0 / a.beta[q] - 2.0 * alpha;
          double f = -0.5 * moments[p * n + q] * std::pow(inner, ex) / ex;
          if (p != q) f *= 2.0;  // H_pq M_pq + H_qp M_qp
          if (p == q) {
            const double c = f / (h * h);
            yb[0] = x[0]; yb[1] = x[1];
            yb[p] += h;
            lin(yb, c);
            yb[p] -= 2.0 * h;
            lin(yb, c);
            yb[p] += h;
            lin(yb, -2.0 * c);
          } else {
            const double c = f / (4.0 * h * h);
            for (int sp : {1, -1}) {
              for (int sq : {1, -1}) {
                yb[0] = x[0]; yb[1] = x[1];
                yb[p] += sp * h;
                yb[q] += sq * h;
                lin(yb, c * sp * sq);
              }
            }
          }
        }
      }
    }

    // far field in origin-polar coordinates, nodes shared with the profile
    rowp[i] += mass * (jfar * std::pow(rho, -2.0 * alpha) - std::pow(rinf, -2.0 * alpha) / (2.0 * alpha));
    double d[2];
    const double rho_mu = std::pow(rho, 2.0 * a.mu);
    const double kexp = -0.5 * (a.c + 2.0 * alpha);
    for (std::size_t k = 0; k < far.t.size(); ++k) {
      const auto& sc = far_scale[k];
      for (std::size_t q = 0; q < N; ++q) {
        const auto& om = nodes[q].x;
        d[0] = x[0] - sc[0] * om[0];
        d[1] = x[1] - sc[1] * om[1];
        const double p0 = abs_pow(d[0], a.beta[0]), p1 = abs_pow(d[1], a.beta[1]);
        const double pm = std::pow(p0, a.mu) + std::pow(p1, a.mu);
        double cut = 1.0;
        if (pm < rho_mu) {
          const double chi = quad::smooth_cutoff(std::pow(pm, 0.5 / a.mu), 0.5 * rho, rho);
          if (chi == 1.0) continue;
          cut = 1.0 - chi;
        }
        rowp[q] -= far.w[k] * polar[q] * cut * std::pow(p0 + p1, kexp);
      }
    }
    // tail beyond the cutoff, exact for homogeneous fields
    rowp[i] += mass * std::pow(rinf, -2.0 * alpha) / (2.0 * alpha);
    for (std::size_t q = 0; q < N; ++q) {
      rowp[q] -= kw[q] * std::pow(rinf, -gamma - 2.0 * alpha) / (gamma + 2.0 * alpha);
    }

    for (std::size_t j = 0; j < N; ++j) {
      double v = rowp[j];
      for (std::size_t l = 0; l < N; ++l) v += rowc[l] * sinv[l * N + j];
      v *= C;
      if (j == i) P.D[i] = v; else P.W[i * N + j] = v;
    }
  });
  for (auto c : singular) P.diagnostics.singular_samples += c;
  return P;
}

PoissonSolution solve_homogeneous_poisson(const ProfileOperator& P) {
  const std::size_t N = P.size();
  const Eigen::MatrixXd L = to_matrix(P);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(L);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(N));
  Eigen::VectorXd phi = lu.solve(ones);
  PoissonSolution out{HomogeneousProfile(P.grid, std::vector<double>(phi.data(), phi.data() + N),
                                         P.gamma)};
  out.rcond = lu.rcond();
  out.near_critical = !(out.rcond > 1e-12) || !phi.allFinite();
  out.min_value = phi.minCoeff();
  out.max_abs = phi.cwiseAbs().maxCoeff();
  out.residual = (L * phi - ones).cwiseAbs().maxCoeff();
  return out;
}

EigenResult principal_eigenpair(const ProfileOperator& P, double tol, std::uint64_t seed,
                                int max_iterations) {
  const auto N = static_cast<Eigen::Index>(P.size());
  const Eigen::MatrixXd L = to_matrix(P);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(L);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(N);
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (Eigen::Index k = 0; k < N; ++k) v[k] = u(rng);
  }
  v.normalize();
  const double scale = L.cwiseAbs().rowwise().sum().maxCoeff();
  EigenResult out;
  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::VectorXd w = lu.solve(v);
    if (!w.allFinite()) break;
    w.normalize();
    if (w.sum() < 0.0) w = -w;
    v = w;
    const Eigen::VectorXd Lv = L * v;
    out.value = v.dot(Lv);
    out.iterations = it;
    const double res = (Lv - out.value * v).cwiseAbs().maxCoeff();
    out.residual = res / v.cwiseAbs().maxCoeff();
    if (res <= tol * scale * v.cwiseAbs().maxCoeff()) {
      out.converged = true;
      break;
    }
  }
  out.vector.assign(v.data(), v.data() + N);
  return out;
}

KeyValues GammaStarResult::key_values() const {
  return {{"gamma_star", fmt(gamma_star)},
          {"bracket_lo", fmt(bracket_lo)},
          {"bracket_hi", fmt(bracket_hi)},
          {"eigenvalue_at_star", fmt(eigenvalue_at_star)},
          {"eigenvalue_lo", fmt(eigenvalue_lo)},
          {"eigenvalue_hi", fmt(eigenvalue_hi)},
          {"eigen_crossing", eigen_crossing ? "true" : "false"},
          {"threshold_bound", threshold_bound ? "true" : "false"},
          {"steps", std::to_string(steps)},
          {"tol", fmt(tol)}};
}

SphereGrid profile_grid(const Anisotropy& a, int resolution) {
  if (a.dim() != 2) throw ParameterError("homogeneous solver supports n = 2 only");
  if (a.beta[0] == a.beta[1]) return build_sphere_grid(a, resolution);
  const double peak = a.beta[1] > a.beta[0] ? 0.5 * std::numbers::pi : 0.0;
  return build_sphere_grid(a, resolution, SphereChart::radial, 0.8, peak, 4);
}

GammaStarResult gamma_star(const Anisotropy& a, double alpha, const SphereGrid& grid,
                           const QuadratureConfig& cfg, std::optional<double> lo_in,
                           std::optional<double> hi_in, double tol, int threads) {
  check_grid(a, grid);
  normalization_constant(a, alpha);
  double lo = lo_in.value_or(1e-3), hi = hi_in.value_or(a.c - 1e-3);
  if (!(lo > 0.0 && hi < a.c && lo < hi)) {
    throw ParameterError("gamma_star: bracket must satisfy 0 < lo < hi < c");
  }
  if (!(tol > 0.0)) throw ParameterError("gamma_star: tol must be positive");

  GammaStarResult out;
  out.tol = tol;
  const auto first = solve_homogeneous_poisson(assemble_profile_operator(a, alpha, lo, grid, cfg, threads));
  const bool ind_lo = !first.near_critical && first.min_value > 0.0;
  const double threshold = 1e3 * first.max_abs;
  bool by_threshold = false;
  auto indicator = [&](const PoissonSolution& s, bool* thr) {
    if (s.near_critical || !(s.min_value > 0.0)) return false;
    if (!(s.max_abs < threshold)) {
      *thr = true;
      return false;
    }
    return true;
  };
  const auto last = solve_homogeneous_poisson(assemble_profile_operator(a, alpha, hi, grid, cfg, threads));
  bool thr_hi = false;
  const bool ind_hi = indicator(last, &thr_hi);
  if (!ind_lo || ind_hi) {
    std::ostringstream os;
    os << "gamma_star: no sign change of the positivity indicator on [" << lo << ", " << hi
       << "]: indicator(lo) = " << (ind_lo ? "true" : "false")
       << ", indicator(hi) = " << (ind_hi ? "true" : "false");
    throw BracketError(os.str());
  }
  by_threshold = thr_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    bool thr = false;
    const auto s = solve_homogeneous_poisson(assemble_profile_operator(a, alpha, mid, grid, cfg, threads));
    if (indicator(s, &thr)) {
      lo = mid;
    } else {
      hi = mid;
      by_threshold = by_threshold || thr;
    }
    ++out.steps;
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.gamma_star = 0.5 * (lo + hi);
  out.threshold_bound = by_threshold;

  auto eig = [&](double g) {
    return principal_eigenpair(assemble_profile_operator(a, alpha, g, grid, cfg, threads)).value;
  };
  out.eigenvalue_lo = eig(lo);
  out.eigenvalue_hi = eig(hi);
  out.eigenvalue_at_star = eig(out.gamma_star);
  out.eigen_crossing = out.eigenvalue_lo * out.eigenvalue_hi <= 0.0;
  if (!out.eigen_crossing) {
    const double wl = std::max(0.5 * lo, lo - 0.5 * tol);
    const double wh = std::min(0.5 * (hi + a.c), hi + 0.5 * tol);
    out.eigen_crossing = eig(wl) * eig(wh) <= 0.0;
  }
  return out;
}

BetaSphereRange beta_sphere_range(const HomogeneousProfile& psi) {
  const auto& g = psi.grid();
  const auto& a = g.anisotropy();
  const double gamma = psi.gamma();
  auto f = [&](double s) {
    const auto w = g.point_at(s);
    return std::pow(beta_norm(w, a), gamma) * psi.sphere_value(s);
  };
  const std::size_t N = g.size();
  const std::size_t M = 8 * N;
  const double h = kTwoPi / static_cast<double>(M);
  std::vector<double> v(M);
  for (std::size_t k = 0; k < M; ++k) v[k] = f(h * static_cast<double>(k));
  auto refine = [&](std::size_t k, double sign) {
    // golden section on [s_k - h, s_k + h] for the extremum of sign * f
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = h * static_cast<double>(k) - h, hi = lo + 2.0 * h;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = sign * f(x1), f2 = sign * f(x2);
    while (hi - lo > 1e-11) {
      if (f1 > f2) {
        hi = x2; x2 = x1; f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = sign * f(x1);
      } else {
        lo = x1; x1 = x2; f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = sign * f(x2);
      }
    }
    return std::max({sign * v[k], f1, f2}) * sign;
  };
  BetaSphereRange r{INFINITY, -INFINITY};
  // refine every local extremum of the samples
  for (std::size_t k = 0; k < M; ++k) {
    const double p = v[(k + M - 1) % M], c = v[k], nx = v[(k + 1) % M];
    if (c >= p && c >= nx) r.max = std::max(r.max, refine(k, 1.0));
    if (c <= p && c <= nx) r.min = std::min(r.min, refine(k, -1.0));
  }
  return r;
}

KeyValues FundamentalSolution::key_values() const {
  KeyValues kv = search.key_values();
  kv.push_back({"gamma_psi", fmt(gamma)});
  kv.push_back({"eigenvalue_at_gamma_psi", fmt(eigenvalue)});
  kv.push_back({"eigen_residual", fmt(eigen_residual)});
  kv.push_back({"m0", fmt(m0)});
  kv.push_back({"harnack_ratio", fmt(harnack)});
  return kv;
}

FundamentalSolution fundamental_solution(const Anisotropy& a, double alpha,
                                         const SphereGrid& grid, const QuadratureConfig& cfg,
                                         double tol, int threads) {
  const auto gs = gamma_star(a, alpha, grid, cfg, {}, {}, tol, threads);
  // secant on the principal eigenvalue inside the final bracket
  double g0 = gs.bracket_lo, l0 = gs.eigenvalue_lo;
  double g1 = gs.bracket_hi, l1 = gs.eigenvalue_hi;
  const double lo_lim = std::max(0.5 * g0, g0 - tol), hi_lim = std::min(0.5 * (g1 + a.c), g1 + tol);
  for (int it = 0; it < 12 && l1 != l0; ++it) {
    const double g2 = std::clamp(g1 - l1 * (g1 - g0) / (l1 - l0), lo_lim, hi_lim);
    if (std::abs(g2 - g1) < 1e-12) break;
    g0 = g1;
    l0 = l1;
    g1 = g2;
    l1 = principal_eigenpair(assemble_profile_operator(a, alpha, g1, grid, cfg, threads)).value;
  }
  const double gamma = g1;
  const auto P = assemble_profile_operator(a, alpha, gamma, grid, cfg, threads);
  const auto e = principal_eigenpair(P);
  if (!e.converged) throw QuadratureError("fundamental_solution: inverse iteration did not converge");
  if (!std::all_of(e.vector.begin(), e.vector.end(), [](double v) { return v > 0.0; })) {
    throw QuadratureError("fundamental_solution: principal eigenvector is not single-signed");
  }
  HomogeneousProfile raw(P.grid, e.vector, gamma);
  const auto range = beta_sphere_range(raw);
  std::vector<double> vals = e.vector;
  for (double& v : vals) v /= range.max;
  FundamentalSolution out{HomogeneousProfile(P.grid, std::move(vals), gamma), gs};
  out.gamma = gamma;
  out.eigenvalue = e.value;
  out.eigen_residual = e.residual;
  out.m0 = range.min / range.max;
  out.harnack = harnack_ratio(out.psi);
  return out;
}

BoundsCheck two_sided_bounds_check(const FundamentalSolution& fs, std::size_t points,
                                   std::uint64_t seed, double slack) {
  const auto& a = fs.psi.grid().anisotropy();
  const double g = fs.psi.gamma();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  BoundsCheck out;
  out.points = points;
  out.worst_upper = -INFINITY;
  out.worst_lower = -INFINITY;
  Point e(a.dim());
  for (std::size_t k = 0; k < points; ++k) {
    for (double& v : e) v = nd(rng);
    const double t = std::pow(10.0, uni(rng));
    const Point x = scale_map(scale_map(e, a, 1.0 / quasi_norm(e, a)), a, t);
    const double w = std::pow(quasi_norm(x, a), g) * fs.psi.induced(x);
    out.worst_upper = std::max(out.worst_upper, w - 1.0);
    out.worst_lower = std::max(out.worst_lower, fs.m0 - w);
    if (w > 1.0 + slack || w < fs.m0 * (1.0 - slack)) ++out.violations;
  }
  return out;
}

double harnack_ratio(const HomogeneousProfile& psi) {
  const auto& v = psi.values();
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  if (!(*mn > 0.0)) throw DomainError("harnack_ratio: profile is not positive");
  return *mx / *mn;
}

double holder_seminorm_of_psi(const HomogeneousProfile& psi, double theta, std::size_t pairs,
                              std::uint64_t seed) {
  const auto& a = psi.grid().anisotropy();
  if (!(theta > 0.0 && theta <= a.alpha_limit() + 1e-15)) {
    throw ParameterError("holder_seminorm_of_psi: theta must lie in (0, 2/b_max]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi), rad(0.5, 2.0), lt(std::log(1e-4), 0.0);
  // point with ||x||_beta = r in the Euclidean direction at angle s
  auto at = [&](double s, double r) {
    const Point e{std::cos(s), std::sin(s)};
    return scale_map(e, a, r / beta_norm(e, a));
  };
  double best = 0.0;
  std::size_t done = 0;
  while (done < pairs) {
    const Point x = at(ang(rng), rad(rng));
    const Point z = at(ang(rng), std::exp(lt(rng)));
    const Point y{x[0] + z[0], x[1] + z[1]};
    const double ny = beta_norm(y, a);
    if (ny < 0.5 || ny > 2.0) continue;
    const double d = beta_norm(z, a);
    if (d > 1.0 || d == 0.0) continue;
    ++done;
    best = std::max(best, std::abs(psi.induced(x) - psi.induced(y)) / std::pow(d, theta));
  }
  return best;
}

}  // namespace aniso
