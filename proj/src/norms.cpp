#include "aniso/norms.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <memory>
#include <random>
#include <sstream>

#include "aniso/errors.hpp"
#include "aniso/io.hpp"
#include "aniso/parallel.hpp"
#include "aniso/quadrature.hpp"
#include "aniso/sphere_grid.hpp"

namespace aniso {

namespace {

constexpr double kPi = std::numbers::pi;

bool power_of_two(std::size_t v) { return v >= 2 && (v & (v - 1)) == 0; }

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

Point random_direction(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> nd;
  Point e(n);
  double s = 0.0;
  while (s == 0.0) {
    s = 0.0;
    for (double& v : e) {
      v = nd(rng);
      s += v * v;
    }
  }
  s = std::sqrt(s);
  for (double& v : e) v /= s;
  return e;
}

// mean over the unit ball with a product rule of radial order m
struct BallRule {
  std::vector<Point> y;
  std::vector<double> w;
};

BallRule ball_rule(std::size_t n, int m) {
  BallRule b;
  if (n == 1) {
    const auto& g = quad::gauss_legendre(m);
    for (int k = 0; k < m; ++k) {
      b.y.push_back({g.nodes[k]});
      b.w.push_back(0.5 * g.weights[k]);
    }
    return b;
  }
  const auto g = quad::gauss_legendre(m, 0.0, 1.0);
  if (n == 2) {
    const int na = 2 * m;
    for (int k = 0; k < m; ++k) {
      const double rho = g.nodes[k];
      for (int j = 0; j < na; ++j) {
        const double t = (j + 0.5) * 2.0 * kPi / na;
        b.y.push_back({rho * std::cos(t), rho * std::sin(t)});
        b.w.push_back(g.weights[k] * rho * 2.0 / na);  // rho drho dtheta / pi
      }
    }
    return b;
  }
  // n = 3: radius x cos(polar) x azimuth
  const auto& gc = quad::gauss_legendre(m);
  const int na = 2 * m;
  for (int k = 0; k < m; ++k) {
    const double rho = g.nodes[k];
    for (int i = 0; i < m; ++i) {
      const double ct = gc.nodes[i], st = std::sqrt(1.0 - ct * ct);
      for (int j = 0; j < na; ++j) {
        const double p = (j + 0.5) * 2.0 * kPi / na;
        b.y.push_back({rho * st * std::cos(p), rho * st * std::sin(p), rho * ct});
        // (4/3 pi)^{-1} rho^2 drho dcos dphi
        b.w.push_back(g.weights[k] * rho * rho * gc.weights[i] * (2.0 * kPi / na) /
                      (4.0 * kPi / 3.0));
      }
    }
  }
  return b;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
}

}  // namespace

Point beta_sphere_point(std::span<const double> e, const Anisotropy& a) {
  const double nb = quasi_norm(e, a);
  if (!(nb > 0.0)) throw DomainError("beta_sphere_point: zero direction");
  return scale_map(e, a, 1.0 / nb);
}

Point PeriodicSample::point(std::size_t flat) const {
  Point x(n);
  for (std::size_t i = n; i-- > 0;) {
    x[i] = -L + static_cast<double>(flat % N) * spacing();
    flat /= N;
  }
  return x;
}

void PeriodicSample::validate() const {
  if (n < 1 || n > 3) throw ParameterError("periodic sample: n must be 1, 2 or 3");
  if (!power_of_two(N)) throw ParameterError("periodic sample: N must be a power of two");
  if (!(L > 0.0)) throw ParameterError("periodic sample: L must be positive");
  if (values.size() != ipow(N, n)) throw ParameterError("periodic sample: wrong number of values");
  double mx = 0.0, edge = 0.0;
  for (std::size_t f = 0; f < values.size(); ++f) {
    const double v = std::abs(values[f]);
    if (!std::isfinite(v)) throw DomainError("periodic sample: non-finite value");
    mx = std::max(mx, v);
    std::size_t g = f;
    bool boundary = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = g % N;
      g /= N;
      boundary = boundary || j == 0 || j == N - 1;
    }
    if (boundary) edge = std::max(edge, v);
  }
  if (edge > 1e-6 * mx) {
    std::ostringstream os;
    os << "periodic sample: boundary shell reaches " << edge / mx
       << " of the maximum; enlarge L so the support stays inside the box";
    throw DomainError(os.str());
  }
}

void PeriodicSample::write(std::ostream& os) const {
  os << n << ' ' << N << ' ' << fmt(L) << '\n';
  for (double v : values) os << fmt(v) << '\n';
}

PeriodicSample PeriodicSample::read(std::istream& is) {
  PeriodicSample s;
  long long n = 0, N = 0;
  if (!(is >> n >> N >> s.L) || n < 1 || N < 1) throw IoError("periodic sample: bad header, expected \"n N L\"");
  s.n = static_cast<std::size_t>(n);
  s.N = static_cast<std::size_t>(N);
  if (s.n > 3 || s.N > (1u << 14)) throw ParameterError("periodic sample: unsupported size");
  const std::size_t count = ipow(s.N, s.n);
  s.values.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (!(is >> s.values[k])) throw IoError("periodic sample: expected " + std::to_string(count) + " values");
  }
  return s;
}

PeriodicSample PeriodicSample::from_field(const Field& u, std::size_t n, std::size_t N, double L) {
  PeriodicSample s;
  s.n = n;
  s.N = N;
  s.L = L;
  if (!power_of_two(N)) throw ParameterError("periodic sample: N must be a power of two");
  s.values.resize(ipow(N, n));
  for (std::size_t f = 0; f < s.values.size(); ++f) s.values[f] = u.eval(s.point(f));
  return s;
}

AverageEstimate ellipsoid_mean(const ScalarFn& f, std::span<const double> x, double r,
                               const Anisotropy& a, const AverageOptions& opt) {
  if (!(r > 0.0)) throw ParameterError("ellipsoid average: r must be positive");
  const std::size_t n = a.dim();
  if (x.size() != n) throw ParameterError("ellipsoid average: dimension mismatch");
  std::vector<double> sc(n);
  for (std::size_t i = 0; i < n; ++i) sc[i] = std::pow(r, 2.0 / a.beta[i]);
  Point y(n);
  auto at = [&](const Point& b) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + sc[i] * b[i];
    return f(y);
  };
  AverageEstimate out;
  if (opt.method == AverageMethod::tensor && n <= 3) {
    double prev = 0.0;
    bool have = false;
    for (int m = 8;; m *= 2) {
      const auto rule = ball_rule(n, m);
      if (out.points + rule.y.size() > opt.budget) {
        out.flagged = true;
        break;
      }
      double s = 0.0, scale = 0.0;
      for (std::size_t k = 0; k < rule.y.size(); ++k) {
        const double v = at(rule.y[k]);
        s += rule.w[k] * v;
        scale += rule.w[k] * std::abs(v);
      }
      out.points += rule.y.size();
      out.value = s;
      if (have) {
        out.error = std::abs(s - prev);
        if (out.error <= 1e-7 * scale + 1e-300) return out;
      }
      prev = s;
      have = true;
    }
    if (!have) out.error = INFINITY;
    return out;
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double s = 0.0, s2 = 0.0;
  const std::size_t count = std::max<std::size_t>(opt.budget, 2);
  for (std::size_t k = 0; k < count; ++k) {
    Point b = random_direction(rng, n);
    const double rho = std::pow(uni(rng), 1.0 / static_cast<double>(n));
    for (double& v : b) v *= rho;
    const double v = at(b);
    s += v;
    s2 += v * v;
  }
  const double m = s / static_cast<double>(count);
  out.value = m;
  out.points = count;
  out.error = std::sqrt(std::max(0.0, s2 / count - m * m) / static_cast<double>(count));
  out.flagged = out.error > 1e-6 * std::abs(m) && out.error > 1e-14;
  return out;
}

AverageEstimate ellipsoid_average(const Field& u, std::span<const double> x, double r,
                                  const Anisotropy& a, const AverageOptions& opt) {
  return ellipsoid_mean(u.eval, x, r, a, opt);
}

namespace {

// r^{-alpha q} int_{E_r(x)} |u - u_{x,r}|^q
double campanato_term(const Field& u, const Anisotropy& a, double q, double alpha,
                       std::span<const double> x, double r, bool* flagged) {
  // shifted by u(x) so that constant fields give exact zeros
  const double u0 = u.eval(x);
  const auto avg = ellipsoid_mean([&](std::span<const double> y) { return u.eval(y) - u0; }, x, r, a);
  const double m = avg.value;
  const auto osc = ellipsoid_mean(
      [&](std::span<const double> y) { return std::pow(std::abs((u.eval(y) - u0) - m), q); }, x, r,
      a);
  *flagged = *flagged || avg.flagged || osc.flagged;
  return std::pow(r, -alpha * q) * osc.value * ellipsoid_volume(r, a);
}

}  // namespace

SeminormReport campanato_seminorm(const Field& u, const Anisotropy& a, double q, double alpha,
                                  std::size_t centers, const std::vector<double>& radii,
                                  std::uint64_t seed, double box, int threads) {
  if (!(q >= 1.0)) throw ParameterError("campanato: q must be >= 1");
  if (!(alpha > 0.0)) throw ParameterError("campanato: alpha must be positive");
  if (centers == 0 || radii.empty()) throw ParameterError("campanato: need centers and radii");
  const std::size_t n = a.dim();
  std::vector<double> best(centers, 0.0);
  std::vector<char> flags(centers, 0);
  parallel_for(centers, threads, [&](std::size_t k) {
    std::mt19937_64 rng(quad::derive_seed(seed, k));
    std::uniform_real_distribution<double> uni(-box, box);
    Point x(n);
    for (double& v : x) v = uni(rng);
    bool fl = false;
    double b = 0.0;
    for (double r : radii) b = std::max(b, campanato_term(u, a, q, alpha, x, r, &fl));
    best[k] = b;
    flags[k] = fl;
  });
  SeminormReport rep;
  rep.seed = seed;
  rep.samples = centers * radii.size();
  double half = 0.0;
  for (std::size_t k = 0; k < centers; ++k) {
    rep.value = std::max(rep.value, best[k]);
    if (k < (centers + 1) / 2) half = std::max(half, best[k]);
    rep.flagged = rep.flagged || flags[k];
  }
  rep.saturation = rep.value > 0.0 ? (rep.value - half) / rep.value : 0.0;
  return rep;
}

DecayTable decay_oscillation_check(const Field& u, const Anisotropy& a, double q, double alpha,
                                   std::span<const double> x0, const std::vector<double>& radii) {
  if (radii.size() < 2) throw ParameterError("decay check: need at least two radii");
  for (std::size_t k = 1; k < radii.size(); ++k) {
    if (!(radii[k] < radii[k - 1])) throw ParameterError("decay check: radii must decrease");
  }
  DecayTable t;
  t.theta = alpha - a.c / q;
  if (!(t.theta > 0.0)) throw ParameterError("decay check: need theta = alpha - c/q > 0");
  std::vector<double> avg(radii.size());
  bool fl = false;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    avg[k] = ellipsoid_average(u, x0, radii[k], a).value;
    t.seminorm = std::max(t.seminorm, campanato_term(u, a, q, alpha, x0, radii[k], &fl));
  }
  t.seminorm = std::pow(t.seminorm, 1.0 / q);
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    DecayRow row;
    row.R = radii[k];
    row.r = radii[k + 1];
    row.difference = std::abs(avg[k] - avg[k + 1]);
    row.ratio = t.seminorm > 0.0 ? row.difference / (t.seminorm * std::pow(row.R, t.theta)) : 0.0;
    t.rows.push_back(row);
    if (row.difference > 0.0) {
      lx.push_back(std::log(row.R));
      ly.push_back(std::log(row.difference));
    }
  }
  t.slope = fit_slope(lx, ly);
  return t;
}

SeminormReport holder_seminorm(const Field& u, const Anisotropy& a, double theta,
                               const HolderOptions& opt) {
  if (!(theta > 0.0 && theta <= 1.0)) throw ParameterError("holder: theta must lie in (0, 1]");
  if (opt.pairs == 0) throw ParameterError("holder: need at least one pair");
  const std::size_t n = a.dim();
  const double dmax = opt.max_pair_distance.value_or(2.0 * opt.box);
  if (!(dmax > 0.0)) throw ParameterError("holder: max_pair_distance must be positive");
  const std::size_t blocks = (opt.pairs + 255) / 256;
  std::vector<double> best(blocks, 0.0);
  parallel_for(blocks, opt.threads, [&](std::size_t b) {
    double m = 0.0;
    const std::size_t end = std::min(opt.pairs, (b + 1) * 256);
    for (std::size_t k = b * 256; k < end; ++k) {
      std::mt19937_64 rng(quad::derive_seed(opt.seed, k));
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      // half the first points log-distributed towards 0, half uniform in the ball
      const double t1 = (k % 2 == 0) ? opt.box * std::pow(1e-4, uni(rng))
                                     : opt.box * std::pow(uni(rng), 1.0 / a.c);
      const Point x = scale_map(beta_sphere_point(random_direction(rng, n), a), a, t1);
      const double t2 = dmax * std::pow(1e-4, uni(rng));
      const Point d = scale_map(beta_sphere_point(random_direction(rng, n), a), a, t2);
      Point y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + d[i];
      m = std::max(m, std::abs(u.eval(x) - u.eval(y)) / std::pow(t2, theta));
    }
    best[b] = m;
  });
  SeminormReport rep;
  rep.seed = opt.seed;
  rep.samples = opt.pairs;
  double half = 0.0;
  const std::size_t half_pairs = (opt.pairs + 1) / 2;
  for (std::size_t b = 0; b < blocks; ++b) {
    rep.value = std::max(rep.value, best[b]);
    if ((b + 1) * 256 <= half_pairs) half = std::max(half, best[b]);
  }
  rep.saturation = rep.value > 0.0 ? (rep.value - half) / rep.value : 0.0;
  return rep;
}

GagliardoReport gagliardo_seminorm(const Field& u, const Anisotropy& a, double q, double alpha,
                                   const GagliardoOptions& opt) {
  if (!(q >= 1.0)) throw ParameterError("gagliardo: q must be >= 1");
  if (!(alpha > 0.0 && alpha < a.alpha_limit())) {
    throw ParameterError("gagliardo: alpha must lie in (0, 2/b_max)");
  }
  if (!(opt.box > 0.0) || opt.budget < 64) throw ParameterError("gagliardo: bad box or budget");
  const std::size_t n = a.dim();
  const double B = opt.box;
  const double aq = alpha * q;
  GagliardoReport rep;

  // ||u||_q^q on a midpoint grid of the box
  {
    const std::size_t M = n == 1 ? 4096 : (n == 2 ? 256 : 64);
    const double h = 2.0 * B / static_cast<double>(M);
    const std::size_t total = ipow(M, n);
    double s = 0.0;
    Point z(n);
    for (std::size_t f = 0; f < total; ++f) {
      std::size_t g = f;
      for (std::size_t i = 0; i < n; ++i) {
        z[i] = -B + (static_cast<double>(g % M) + 0.5) * h;
        g /= M;
      }
      s += std::pow(std::abs(u.eval(z)), q);
    }
    rep.lq_norm = std::pow(s * std::pow(h, static_cast<double>(n)), 1.0 / q);
  }
  const double uq = std::pow(rep.lq_norm, q);

  // d = T_R omega, omega on the mu*beta sphere; K(d) = R^{-c-aq} ||omega||_beta^{-c-aq}
  const auto grid = build_sphere_grid(a, n == 3 ? 16 : 256);
  const std::size_t Q = grid.size();
  std::vector<double> wq(Q), rfar(Q), cum(Q);
  double W = 0.0, tail = 0.0;
  for (std::size_t k = 0; k < Q; ++k) {
    const auto& om = grid.nodes()[k].x;
    wq[k] = grid.polar_weights()[k] * std::pow(quasi_norm(om, a), -a.c - aq);
    // beyond R_far some |d_i| >= 2B and the supports separate
    double rf = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      if (om[i] != 0.0) rf = std::min(rf, std::pow(2.0 * B / std::abs(om[i]), a.beta[i] / 2.0));
    }
    rfar[k] = rf;
    W += wq[k];
    cum[k] = W;
    tail += wq[k] * 2.0 * uq * std::pow(rf, -aq) / aq;
  }

  const int bins = 40;
  const double lmin = std::log(1e-8);
  const double dl = -lmin / bins;
  const std::size_t per_bin = std::max<std::size_t>(opt.budget / bins, 16);
  std::vector<double> sum(bins, 0.0), sum2(bins, 0.0);
  parallel_for(static_cast<std::size_t>(bins), opt.threads, [&](std::size_t j) {
    double s = 0.0, s2 = 0.0;
    Point z(n), zd(n);
    for (std::size_t k = 0; k < per_bin; ++k) {
      std::mt19937_64 rng(quad::derive_seed(opt.seed, j * per_bin + k));
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      const double rho = std::exp(lmin + dl * (static_cast<double>(j) + uni(rng)));
      const double pick = uni(rng) * W;
      const std::size_t node =
          std::min<std::size_t>(Q - 1, std::upper_bound(cum.begin(), cum.end(), pick) - cum.begin());
      const double R = rho * rfar[node];
      const auto& om = grid.nodes()[node].x;
      double V = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = std::pow(R, 2.0 / a.beta[i]) * om[i];
        const double lo = std::min(-B, -B - d), hi = std::max(B, B - d);
        z[i] = lo + (hi - lo) * uni(rng);
        zd[i] = z[i] + d;
        V *= hi - lo;
      }
      const double v = W * dl * std::pow(R, -aq) * V * std::pow(std::abs(u.eval(z) - u.eval(zd)), q);
      s += v;
      s2 += v * v;
    }
    sum[j] = s;
    sum2[j] = s2;
  });
  double total = tail, var = 0.0;
  for (int j = 0; j < bins; ++j) {
    const double m = sum[j] / static_cast<double>(per_bin);
    total += m;
    var += std::max(0.0, sum2[j] / per_bin - m * m) / static_cast<double>(per_bin);
  }
  // below the innermost bin the integrand follows R^{2q/b_max - aq - 1}
  {
    const double m0 = sum[0] / static_cast<double>(per_bin);
    const double p = 2.0 * q / a.b_max - aq;
    if (p > 0.0) total += m0 / (dl * p);
  }
  rep.double_integral = total;
  rep.samples = per_bin * bins;
  rep.relative_error = total > 0.0 ? std::sqrt(var) / total : 0.0;
  rep.flagged = rep.relative_error > 0.05;
  rep.seminorm = std::pow(total, 1.0 / q);
  rep.value = std::pow(uq + total, 1.0 / q);
  return rep;
}

Field sample_field(const PeriodicSample& sample) {
  auto s = std::make_shared<const PeriodicSample>(sample);
  Field u;
  u.eval = [s](std::span<const double> x) {
    // multilinear interpolation, zero outside the box
    const double h = s->spacing();
    std::size_t base = 0;
    std::array<std::size_t, 3> idx{};
    std::array<double, 3> fr{};
    for (std::size_t i = 0; i < s->n; ++i) {
      const double p = (x[i] + s->L) / h;
      if (!(p >= 0.0) || p >= static_cast<double>(s->N - 1)) return 0.0;
      idx[i] = static_cast<std::size_t>(p);
      fr[i] = p - static_cast<double>(idx[i]);
    }
    double v = 0.0;
    for (std::size_t corner = 0; corner < (1u << s->n); ++corner) {
      double w = 1.0;
      base = 0;
      for (std::size_t i = 0; i < s->n; ++i) {
        const bool up = (corner >> i) & 1u;
        w *= up ? fr[i] : 1.0 - fr[i];
        base = base * s->N + idx[i] + (up ? 1 : 0);
      }
      v += w * s->values[base];
    }
    return v;
  };
  return u;
}

GagliardoReport gagliardo_seminorm(const PeriodicSample& s, const Anisotropy& a, double q,
                                   double alpha, const GagliardoOptions& opt) {
  s.validate();
  if (s.n != a.dim()) throw ParameterError("gagliardo: sample dimension mismatch");
  const Field u = sample_field(s);
  GagliardoOptions o = opt;
  o.box = s.L;
  return gagliardo_seminorm(u, a, q, alpha, o);
}

BesselNorm bessel_norm(const PeriodicSample& s, const Anisotropy& a, double alpha, double q) {
  s.validate();
  if (s.n != a.dim()) throw ParameterError("bessel_norm: sample dimension mismatch");
  if (!(std::abs(a.c - static_cast<double>(a.dim())) < 1e-9)) {
    throw RegimeError("bessel_norm: needs c = n (got c = " + fmt(a.c) + ")");
  }
  if (!(q >= 2.0)) throw ParameterError("bessel_norm: q must be >= 2");
  if (!(alpha >= 0.0)) throw ParameterError("bessel_norm: alpha must be nonnegative");
  const std::size_t n = s.n, N = s.N, total = s.values.size();
  const double h = s.spacing();
  const double cell = std::pow(h, static_cast<double>(n));

  static std::mutex plan_mutex;  // planner calls are not thread-safe
  std::vector<int> dims(n, static_cast<int>(N));
  fftw_complex* buf = fftw_alloc_complex(total);
  fftw_plan fwd, inv;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fwd = fftw_plan_dft(static_cast<int>(n), dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    inv = fftw_plan_dft(static_cast<int>(n), dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (std::size_t f = 0; f < total; ++f) {
    buf[f][0] = s.values[f];
    buf[f][1] = 0.0;
  }
  fftw_execute(fwd);
  double parseval = 0.0;
  Point xi(n);
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t g = f;
    for (std::size_t i = n; i-- > 0;) {
      long k = static_cast<long>(g % N);
      g /= N;
      if (k >= static_cast<long>(N / 2)) k -= static_cast<long>(N);
      xi[i] = kPi * static_cast<double>(k) / s.L;
    }
    const double r = cbl_distance(xi, a);
    const double m = std::pow(1.0 + r * r, 0.5 * alpha);
    buf[f][0] *= m;
    buf[f][1] *= m;
    parseval += buf[f][0] * buf[f][0] + buf[f][1] * buf[f][1];
  }
  fftw_execute(inv);
  double acc = 0.0;
  for (std::size_t f = 0; f < total; ++f) {
    acc += std::pow(std::abs(buf[f][0] / static_cast<double>(total)), q);
  }
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  fftw_free(buf);
  BesselNorm out;
  out.value = std::pow(acc * cell, 1.0 / q);
  if (q == 2.0) out.plancherel = std::sqrt(parseval * cell / static_cast<double>(total));
  return out;
}

EmbeddingReport embedding_ratio(const PeriodicSample& s, const Anisotropy& a, double alpha,
                                double q, std::size_t pairs, std::uint64_t seed) {
  if (!(std::abs(a.c - static_cast<double>(a.dim())) < 1e-9)) {
    throw ParameterError("embedding_ratio: needs c = n");
  }
  if (!(q >= 2.0)) throw ParameterError("embedding_ratio: q must be >= 2");
  if (!(alpha > 0.0)) throw ParameterError("embedding_ratio: alpha must be positive");
  if (!(alpha * q > a.c)) throw ParameterError("embedding_ratio: needs alpha q > c");
  s.validate();
  EmbeddingReport rep;
  rep.theta = alpha - a.c / q;
  rep.bessel = bessel_norm(s, a, alpha, q).value;
  for (double v : s.values) rep.sup_norm = std::max(rep.sup_norm, std::abs(v));

  // Hoelder quotient over pairs of grid points
  const std::size_t n = s.n, N = s.N;
  const double h = s.spacing();
  std::vector<long> idx(n), off(n);
  Point d(n);
  for (std::size_t k = 0; k < pairs; ++k) {
    std::mt19937_64 rng(quad::derive_seed(seed, k));
    std::uniform_int_distribution<std::size_t> pick(0, s.values.size() - 1);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const std::size_t f = pick(rng);
    std::size_t g = f;
    for (std::size_t i = n; i-- > 0;) {
      idx[i] = static_cast<long>(g % N);
      g /= N;
    }
    const double t = 2.0 * s.L * std::pow(1e-3, uni(rng));
    const Point e = scale_map(beta_sphere_point(random_direction(rng, n), a), a, t);
    bool zero = true, inside = true;
    std::size_t f2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      off[i] = std::lround(e[i] / h);
      zero = zero && off[i] == 0;
      const long j = idx[i] + off[i];
      inside = inside && j >= 0 && j < static_cast<long>(N);
      f2 = f2 * N + static_cast<std::size_t>(std::max(0L, j));
      d[i] = static_cast<double>(off[i]) * h;
    }
    if (zero || !inside) continue;
    const double dist = quasi_norm(d, a);
    rep.holder = std::max(rep.holder, std::abs(s.values[f] - s.values[f2]) / std::pow(dist, rep.theta));
  }
  rep.ratio = (rep.sup_norm + rep.holder) / rep.bessel;
  return rep;
}

std::vector<Field> embedding_family(const Anisotropy& a) {
  const std::size_t n = a.dim();
  std::vector<Field> out;
  for (int j = 0; j < 10; ++j) {
    const double k = -0.5 + j / 9.0;
    Point c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = 0.5 * std::sin(2.0 * kPi * j / 10.0 + 1.7 * i);
    std::vector<double> sc(n);
    for (std::size_t i = 0; i < n; ++i) sc[i] = std::pow(2.0, k * 2.0 / a.beta[i]);
    Field u;
    u.eval = [c, sc](std::span<const double> x) {
      double s = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        const double y = sc[i] * (x[i] - c[i]) / 0.35;
        s += y * y;
      }
      return std::exp(-0.5 * s);
    };
    u.decay.kind = DecayKind::bounded;
    out.push_back(std::move(u));
  }
  return out;
}

VanishingTable vanishing_at_infinity_check(const Field& u, const Anisotropy& a,
                                           const std::vector<double>& radii,
                                           std::size_t directions, std::uint64_t seed) {
  if (radii.empty()) throw ParameterError("vanishing check: need radii");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1]))) {
      throw ParameterError("vanishing check: radii must be positive and increasing");
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<Point> dirs;
  for (std::size_t k = 0; k < directions; ++k) {
    dirs.push_back(beta_sphere_point(random_direction(rng, a.dim()), a));
  }
  VanishingTable t;
  std::vector<double> lx, ly;
  for (double R : radii) {
    double m = 0.0;
    for (const auto& w : dirs) m = std::max(m, std::abs(u.eval(scale_map(w, a, R))));
    t.rows.push_back({R, m});
    if (m > 0.0) {
      lx.push_back(std::log(R));
      ly.push_back(std::log(m));
    }
  }
  t.slope = fit_slope(lx, ly);
  t.decays = t.rows.back().max_abs < 0.05 * t.rows.front().max_abs ||
             (t.rows.back().max_abs == 0.0 && t.rows.front().max_abs == 0.0);
  return t;
}

}  // namespace aniso
