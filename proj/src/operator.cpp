#include "aniso/operator.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "aniso/errors.hpp"
#include "aniso/quadrature.hpp"

namespace aniso {

namespace {

std::shared_ptr<const SphereGrid> cached_grid(const Anisotropy& a, int resolution) {
  using Key = std::tuple<std::vector<double>, int, int>;
  static std::map<Key, std::shared_ptr<const SphereGrid>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  Key key{a.beta, a.mu, resolution};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto g = std::make_shared<const SphereGrid>(build_sphere_grid(a, resolution));
  cache.emplace(key, g);
  return g;
}

// sum_i |d_i|^{p_i} with p_i = m * b_i
double power_sum(std::span<const double> d, const Anisotropy& a, double m) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (d[i] != 0.0) s += std::pow(std::abs(d[i]), m * a.beta[i]);
  }
  return s;
}

// panel of a radial rule: nodes and weights already include the measure
struct RadialRule {
  std::vector<double> t;
  std::vector<double> w;
};

// GL in log t on [lo, hi] split into `pieces`; weight includes dt (so w = t * dtau)
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

}  // namespace

int default_angular_resolution(std::size_t n) {
  if (n == 2) return 512;
  if (n == 3) return 16;
  return 8;
}

void QuadratureConfig::validate() const {
  std::ostringstream os;
  if (!(near_radius > 0.0)) os << "near_radius must be positive; ";
  if (!(far_cutoff > near_radius)) os << "far_cutoff must exceed near_radius; ";
  if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) os << "rel_tol must lie in (0, 1e-2]; ";
  if (max_subdivisions < 1) os << "max_subdivisions must be positive; ";
  if (angular_resolution != 0 && angular_resolution < 8) os << "angular_resolution must be >= 8; ";
  if (radial_order < 2 || radial_order > 64) os << "radial_order must lie in [2, 64]; ";
  if (!os.str().empty()) throw ParameterError("quadrature config: " + os.str());
}

double normalization_constant(const Anisotropy& a, double alpha) {
  if (!(alpha > 0.0) || !(alpha < a.alpha_limit())) {
    std::ostringstream os;
    os << "alpha = " << alpha << " outside (0, 2/b_max) = (0, " << a.alpha_limit() << ")";
    throw ParameterError(os.str());
  }
  return a.alpha_limit() - alpha;
}

double kernel_value(std::span<const double> z, const Anisotropy& a, double alpha) {
  return std::pow(power_sum(z, a, 1.0), -0.5 * (a.c + 2.0 * alpha));
}

KernelQuadrature::KernelQuadrature(const Anisotropy& a, double alpha, const QuadratureConfig& cfg)
    : a_(a), alpha_(alpha), cfg_(cfg) {
  normalization_constant(a, alpha);
  cfg.validate();
  const int res = cfg.angular_resolution > 0 ? cfg.angular_resolution
                                             : default_angular_resolution(a.dim());
  grid_ = cached_grid(a, res);
  const std::size_t n = a.dim(), Q = grid_->size();
  kw_.resize(Q);
  moments_.assign(n * n, 0.0);
  for (std::size_t q = 0; q < Q; ++q) {
    const auto& eta = grid_->nodes()[q].x;
    kw_[q] = grid_->polar_weights()[q] * kernel_value(eta, a, alpha);
    mass_ += kw_[q];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) moments_[i * n + j] += kw_[q] * eta[i] * eta[j];
    }
  }
  RadialRule r;
  append_log_panels(r, 0.5, 1.0, 8, 20);
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    jfar_ += r.w[k] * (1.0 - quad::smooth_cutoff(r.t[k], 0.5, 1.0)) *
             std::pow(r.t[k], -1.0 - 2.0 * alpha);
  }
  jfar_ += 1.0 / (2.0 * alpha);
}

double KernelQuadrature::near_field(const Field& u, std::span<const double> x, double rho,
                                    double* err, bool* flagged) const {
  const std::size_t n = a_.dim(), Q = kw_.size();
  const auto H = field_hessian(u, x);
  const double u0 = u.eval(x);
  const int order = std::max(4, cfg_.radial_order - 2);

  // second-order model: delta^2 u ~ z^T H z, integrated exactly in t
  auto model = [&](double lo, double hi) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double p = 2.0 / a_.beta[i] + 2.0 / a_.beta[j] - 2.0 * alpha_;
        s += H[i * n + j] * moments_[i * n + j] * (std::pow(hi, p) - std::pow(lo, p)) / p;
      }
    }
    return -0.5 * s;
  };

  std::vector<double> sc(n), yp(n), ym(n);
  auto shell = [&](double lo, double hi, int pieces, bool cut) {
    RadialRule r;
    append_log_panels(r, lo, hi, pieces, order);
    double s = 0.0;
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      const double t = r.t[k];
      double wt = r.w[k] * std::pow(t, -1.0 - 2.0 * alpha_);
      if (cut) wt *= quad::smooth_cutoff(t, 0.5 * rho, rho);
      if (wt == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) sc[i] = std::pow(t, 2.0 / a_.beta[i]);
      double acc = 0.0;
      for (std::size_t q = 0; q < Q; ++q) {
        const auto& eta = grid_->nodes()[q].x;
        for (std::size_t i = 0; i < n; ++i) {
          const double z = sc[i] * eta[i];
          yp[i] = x[i] + z;
          ym[i] = x[i] - z;
        }
        acc += kw_[q] * (u.eval(yp) + u.eval(ym) - 2.0 * u0);
      }
      s += wt * acc;
    }
    return -0.5 * s;
  };

  double total = shell(0.5 * rho, rho, 4, true);
  double scale = std::abs(total);
  int passes = 0;
  double lo = 0.5 * rho;
  for (int k = 1; k < cfg_.max_subdivisions; ++k) {
    const double hi = lo;
    lo = 0.5 * hi;
    const double s = shell(lo, hi, 1, false);
    const double m = model(lo, hi);
    total += s;
    scale += std::abs(s);
    const double rem = model(0.0, lo);
    const double d = std::abs(s - m);
    // rounding in u(x+z) + u(x-z) - 2u(x) eventually dominates the shell
    const double noise = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(u0) * mass_ *
                         (std::pow(lo, -2.0 * alpha_) - std::pow(hi, -2.0 * alpha_)) / (2.0 * alpha_);
    if (d <= std::max(cfg_.rel_tol * (scale + std::abs(rem)), 8.0 * noise)) {
      if (++passes == 2) {
        *err = 2.0 * std::max(d, noise);
        return total + rem;
      }
    } else {
      passes = 0;
    }
  }
  *flagged = true;
  *err = kErrorSentinel;
  return total + model(0.0, lo);
}

double KernelQuadrature::far_bounded(const Field& u, std::span<const double> x, double rho) const {
  const std::size_t n = a_.dim(), Q = kw_.size();
  const double u0 = u.eval(x);
  RadialRule r;
  append_log_panels(r, 0.5 * rho, rho, 4, cfg_.radial_order);
  for (double t = rho; t < cfg_.far_cutoff; t *= 2.0) {
    append_log_panels(r, t, std::min(2.0 * t, cfg_.far_cutoff), 1, cfg_.radial_order);
  }
  std::vector<double> sc(n), y(n);
  double s = 0.0;
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    const double t = r.t[k];
    const double wt = r.w[k] * (1.0 - quad::smooth_cutoff(t, 0.5 * rho, rho)) *
                      std::pow(t, -1.0 - 2.0 * alpha_);
    if (wt == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) sc[i] = std::pow(t, 2.0 / a_.beta[i]);
    double acc = 0.0;
    for (std::size_t q = 0; q < Q; ++q) {
      const auto& eta = grid_->nodes()[q].x;
      for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + sc[i] * eta[i];
      acc += kw_[q] * (u0 - u.eval(y));
    }
    s += wt * acc;
  }
  return s;
}

double KernelQuadrature::far_anchored(const Field& u, std::span<const double> x,
                                      double rho) const {
  const std::size_t n = a_.dim(), Q = kw_.size();
  const auto& anchor = u.decay.anchor;
  const double smax = u.decay.radius;
  std::vector<double> xa(n);
  for (std::size_t i = 0; i < n; ++i) xa[i] = x[i] - anchor[i];
  const double rxa = radial_coordinate(xa, a_);
  const int order = cfg_.radial_order;

  // s-rule for int_0^smax s^{c-1} f(s) ds; weights carry s^{c-1} ds
  RadialRule r;
  const double s0 = std::min(smax, std::max(rxa, rho) / 8.0);
  {
    const auto g = quad::gauss_legendre(2 * order, 0.0, 1.0);
    const double e = a_.c;
    for (int k = 0; k < 2 * order; ++k) {
      r.t.push_back(s0 * std::pow(g.nodes[k], 1.0 / e));
      r.w.push_back(g.weights[k] * std::pow(s0, e) / e);
    }
  }
  const double ratio = std::pow(2.0, 0.25);
  for (double s = s0; s < smax; s *= ratio) {
    const std::size_t first = r.t.size();
    append_log_panels(r, s, std::min(s * ratio, smax), 1, order);
    for (std::size_t k = first; k < r.t.size(); ++k) r.w[k] *= std::pow(r.t[k], a_.c - 1.0);
  }

  std::vector<double> sc(n), y(n), d(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    const double s = r.t[k];
    for (std::size_t i = 0; i < n; ++i) sc[i] = std::pow(s, 2.0 / a_.beta[i]);
    double part = 0.0;
    for (std::size_t q = 0; q < Q; ++q) {
      const auto& om = grid_->nodes()[q].x;
      for (std::size_t i = 0; i < n; ++i) {
        const double z = sc[i] * om[i];
        y[i] = anchor[i] + z;
        d[i] = xa[i] - z;
      }
      const double rd = std::pow(power_sum(d, a_, a_.mu), 0.5 / a_.mu);
      const double chi = quad::smooth_cutoff(rd, 0.5 * rho, rho);
      if (chi == 1.0) continue;
      const double uy = u.eval(y);
      if (uy == 0.0) continue;
      part += grid_->polar_weights()[q] * uy * (1.0 - chi) * kernel_value(d, a_, alpha_);
    }
    acc += r.w[k] * part;
  }
  return u.eval(x) * mass_ * jfar_ * std::pow(rho, -2.0 * alpha_) - acc;
}

double KernelQuadrature::far_homogeneous(const Field& u, std::span<const double> x, double rho,
                                         std::span<const double> uq) const {
  const std::size_t n = a_.dim(), Q = kw_.size();
  const double gamma = -*u.homogeneity;
  const double rx = radial_coordinate(x, a_);
  const double rinf = cfg_.far_cutoff;
  const int order = cfg_.radial_order;
  const double e = a_.c - gamma;

  // s-rule for int_0^rinf s^{c-1-gamma} f(s) ds
  RadialRule r;
  const double s0 = rx / 4.0;
  {
    const auto g = quad::gauss_legendre(2 * order, 0.0, 1.0);
    for (int k = 0; k < 2 * order; ++k) {
      r.t.push_back(s0 * std::pow(g.nodes[k], 1.0 / e));
      r.w.push_back(g.weights[k] * std::pow(s0, e) / e);
    }
  }
  const std::size_t first = r.t.size();
  append_log_panels(r, s0, 4.0 * rx, 48, order);
  for (double s = 4.0 * rx; s < rinf; s *= 2.0) {
    append_log_panels(r, s, std::min(2.0 * s, rinf), 1, order);
  }
  for (std::size_t k = first; k < r.t.size(); ++k) r.w[k] *= std::pow(r.t[k], e - 1.0);

  std::vector<double> sc(n), d(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    const double s = r.t[k];
    for (std::size_t i = 0; i < n; ++i) sc[i] = std::pow(s, 2.0 / a_.beta[i]);
    double part = 0.0;
    for (std::size_t q = 0; q < Q; ++q) {
      const auto& om = grid_->nodes()[q].x;
      for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - sc[i] * om[i];
      const double rd = std::pow(power_sum(d, a_, a_.mu), 0.5 / a_.mu);
      const double chi = quad::smooth_cutoff(rd, 0.5 * rho, rho);
      if (chi == 1.0) continue;
      part += grid_->polar_weights()[q] * uq[q] * (1.0 - chi) * kernel_value(d, a_, alpha_);
    }
    acc += r.w[k] * part;
  }
  const double u0 = u.eval(x);
  return u0 * mass_ * (jfar_ * std::pow(rho, -2.0 * alpha_) - std::pow(rinf, -2.0 * alpha_) / (2.0 * alpha_)) -
         acc;
}

OperatorResult KernelQuadrature::apply(const Field& u, std::span<const double> x) const {
  if (x.size() != a_.dim()) throw ParameterError("eval_operator: point dimension mismatch");
  if (u.smoothness_at && !u.smoothness_at(x)) {
    throw DomainError("eval_operator: field is not C^{1,1} at the evaluation point");
  }
  const double C = normalization_constant(a_, alpha_);
  const double rinf = cfg_.far_cutoff;
  double rho = cfg_.near_radius;
  const double u0 = u.eval(x);
  OperatorResult res;
  double near_err = 0.0, tail_err = 0.0;
  double near = 0.0, far = 0.0, tail = 0.0;

  switch (u.decay.kind) {
    case DecayKind::homogeneous: {
      if (!u.homogeneity) throw ParameterError("homogeneous field without a homogeneity degree");
      const double gamma = -*u.homogeneity;
      if (!(gamma < a_.c)) throw ParameterError("homogeneous field must have degree > -c");
      const double rx = radial_coordinate(x, a_);
      if (!(rx > 0.0)) throw DomainError("eval_operator: homogeneous field evaluated at 0");
      // scale the split with the orbit of x so that the rule commutes with T_r
      rho = std::min(rho, 0.5) * rx;
      std::vector<double> uq(kw_.size());
      for (std::size_t q = 0; q < uq.size(); ++q) uq[q] = u.eval(grid_->nodes()[q].x);
      near = near_field(u, x, rho, &near_err, &res.flagged);
      far = far_homogeneous(u, x, rho, uq);
      double wu = 0.0;
      for (std::size_t q = 0; q < uq.size(); ++q) wu += kw_[q] * uq[q];
      const double t = u0 * mass_ * std::pow(rinf, -2.0 * alpha_) / (2.0 * alpha_) -
                       wu * std::pow(rinf, -gamma - 2.0 * alpha_) / (gamma + 2.0 * alpha_);
      if (cfg_.tail_mode == TailMode::analytic_homogeneous) tail = t; else tail_err = std::abs(t);
      break;
    }
    case DecayKind::compact: {
      near = near_field(u, x, rho, &near_err, &res.flagged);
      const double t = u0 * mass_ * std::pow(rinf, -2.0 * alpha_) / (2.0 * alpha_);
      far = far_anchored(u, x, rho) - t;
      if (cfg_.tail_mode == TailMode::analytic_homogeneous) tail = t; else tail_err = std::abs(t);
      break;
    }
    case DecayKind::bounded: {
      near = near_field(u, x, rho, &near_err, &res.flagged);
      far = far_bounded(u, x, rho);
      tail_err = (std::abs(u0) + u.decay.bound) * mass_ * std::pow(rinf, -2.0 * alpha_) / (2.0 * alpha_);
      break;
    }
  }
  res.near_part = C * near;
  res.far_part = C * far;
  res.tail_part = C * tail;
  res.value = res.near_part + res.far_part + res.tail_part;
  if (res.flagged) {
    res.error_estimate = kErrorSentinel;
  } else {
    res.error_estimate = C * (near_err + tail_err) +
                         cfg_.rel_tol * (std::abs(res.near_part) + std::abs(res.far_part) +
                                         std::abs(res.tail_part));
    if (!std::isfinite(res.error_estimate)) res.error_estimate = kErrorSentinel;
  }
  return res;
}

OperatorResult eval_operator(const Field& u, std::span<const double> x, const Anisotropy& a,
                             double alpha, const QuadratureConfig& cfg) {
  return KernelQuadrature(a, alpha, cfg).apply(u, x);
}

HomogeneityCheck homogeneity_identity_check(const Field& u, std::span<const double> x, double r,
                                            const Anisotropy& a, double alpha,
                                            const QuadratureConfig& cfg) {
  if (!u.homogeneity) throw ParameterError("homogeneity_identity_check needs a homogeneous field");
  if (!(r > 0.0)) throw ParameterError("homogeneity_identity_check: r must be positive");
  if (quasi_norm(x, a) == 0.0) throw DomainError("homogeneity_identity_check: x must be nonzero");
  const double gamma = -*u.homogeneity;
  KernelQuadrature kq(a, alpha, cfg);
  const auto base = kq.apply(u, x);
  const auto xs = scale_map(x, a, r);
  const auto scaled = kq.apply(u, xs);
  const double expect = std::pow(r, -(gamma + 2.0 * alpha)) * base.value;
  HomogeneityCheck out;
  out.inconclusive = base.flagged || std::abs(base.value) <= 10.0 * base.error_estimate ||
                     std::abs(base.value) < 1e-14;
  out.relative_error = expect != 0.0 ? std::abs(scaled.value - expect) / std::abs(expect) : 0.0;
  return out;
}

IntegrabilityReport kernel_integrability_report(const Anisotropy& a, double alpha, double r,
                                                int resolution) {
  normalization_constant(a, alpha);
  if (!(r > 0.0)) throw ParameterError("kernel_integrability_report: r must be positive");
  const int res = resolution > 0 ? resolution : default_angular_resolution(a.dim());
  const auto grid = cached_grid(a, res);
  const double t = std::pow(r, 1.0 / a.mu);  // radial-coordinate radius of the mu*beta ball
  IntegrabilityReport out;
  double mass = 0.0;
  for (std::size_t q = 0; q < grid->size(); ++q) {
    const auto& eta = grid->nodes()[q].x;
    const double w = grid->polar_weights()[q] * kernel_value(eta, a, alpha);
    mass += w;
    for (std::size_t i = 0; i < a.dim(); ++i) {
      const double p = 4.0 / a.beta[i] - 2.0 * alpha;
      out.near += w * eta[i] * eta[i] * std::pow(t, p) / p;
    }
  }
  out.far = mass * std::pow(t, -2.0 * alpha) / (2.0 * alpha);
  return out;
}

}  // namespace aniso
