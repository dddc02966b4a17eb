#include "aniso/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "aniso/barrier.hpp"
#include "aniso/errors.hpp"
#include "aniso/homogeneous.hpp"
#include "aniso/io.hpp"
#include "aniso/norms.hpp"
#include "aniso/operator.hpp"
#include "aniso/parallel.hpp"
#include "aniso/quadrature.hpp"
#include "aniso/sphere_grid.hpp"

namespace aniso {

namespace {

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  }

  // Files are built in memory and written in one go.
  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    os << content;
    os.close();
    if (!os) throw IoError("write to '" + path.string() + "' failed");
    files_.push_back(path.string());
  }

  std::vector<std::string> files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

std::string key_value_csv(const KeyValues& kv) {
  std::string s = "quantity,value\n";
  for (const auto& [k, v] : kv) s += k + "," + v + "\n";
  return s;
}

// summary lines only; CSVs keep the round-trip form
std::string sfmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

Point or_origin(const Point& p, std::size_t n) { return p.empty() ? Point(n, 0.0) : p; }

QuadratureConfig quadrature_for(const RunConfig& cfg) {
  QuadratureConfig q = cfg.quadrature;
  if (cfg.resolution) q.angular_resolution = *cfg.resolution;
  return q;
}

RunSummary run_eval(const RunConfig& cfg, Output& out) {
  const auto a = cfg.anisotropy();
  const auto u = build_field(cfg.field, a);
  const auto q = quadrature_for(cfg);
  const double alpha = *cfg.alpha;
  std::vector<OperatorResult> res(cfg.points.size());
  std::vector<HomogeneityCheck> hom(cfg.points.size());
  parallel_for(cfg.points.size(), cfg.threads, [&](std::size_t k) {
    res[k] = eval_operator(u, cfg.points[k], a, alpha, q);
    if (cfg.scale) hom[k] = homogeneity_identity_check(u, cfg.points[k], *cfg.scale, a, alpha, q);
  });
  std::ostringstream os;
  for (std::size_t i = 0; i < a.dim(); ++i) os << "x_" << i + 1 << ",";
  os << "value,error_estimate,near_part,far_part,tail_part,flagged";
  if (cfg.scale) os << ",homogeneity_error,homogeneity_inconclusive";
  os << "\n";
  for (std::size_t k = 0; k < res.size(); ++k) {
    for (double x : cfg.points[k]) os << fmt(x) << ",";
    const auto& r = res[k];
    os << fmt(r.value) << "," << fmt(r.error_estimate) << "," << fmt(r.near_part) << ","
       << fmt(r.far_part) << "," << fmt(r.tail_part) << "," << (r.flagged ? 1 : 0);
    if (cfg.scale) os << "," << fmt(hom[k].relative_error) << "," << (hom[k].inconclusive ? 1 : 0);
    os << "\n";
  }
  out.write("eval.csv", os.str());
  std::ostringstream line;
  line << "eval: value=" << sfmt(res[0].value) << " error_estimate=" << sfmt(res[0].error_estimate);
  if (res.size() > 1) line << " points=" << res.size();
  if (cfg.scale) line << " homogeneity_error=" << sfmt(hom[0].relative_error);
  if (res[0].flagged) line << " flagged";
  return {line.str(), {}};
}

RunSummary run_sweep(const RunConfig& cfg, Output& out) {
  const auto a = cfg.anisotropy();
  const auto grid = build_sphere_grid(a, cfg.resolution_or(a.dim() == 2 ? 128 : 8));
  const auto alphas = cfg.alphas.empty() ? default_alpha_grid(a) : cfg.alphas;
  const auto gammas = cfg.gammas.empty() ? default_gamma_grid(a) : cfg.gammas;
  const auto t = barrier_sweep(a, alphas, gammas, grid, cfg.quadrature, cfg.threads);
  std::ostringstream os;
  t.write_csv(os);
  out.write("barrier_sweep.csv", os.str());
  double worst = INFINITY, err = 0.0;
  for (const auto& c : t.cells) {
    if (c.min_value < worst) {
      worst = c.min_value;
      err = c.error_estimate;
    }
  }
  std::ostringstream line;
  line << "barrier-sweep: cells=" << t.cells.size() << " min_value=" << sfmt(worst) << " error_estimate=" << sfmt(err);
  for (std::size_t g = 0; g < t.gammas.size(); ++g) {
    line << " alpha0(" << sfmt(t.gammas[g]) << ")=" << (t.alpha0[g] ? sfmt(*t.alpha0[g]) : "none");
  }
  return {line.str(), {}};
}

RunSummary run_gamma_star(const RunConfig& cfg, Output& out) {
  const auto a = cfg.anisotropy();
  const auto grid = profile_grid(a, cfg.resolution_or(128));
  const auto r = gamma_star(a, *cfg.alpha, grid, cfg.quadrature, cfg.lo, cfg.hi, cfg.tol, cfg.threads);
  out.write("gamma_star.csv", key_value_csv(r.key_values()));
  std::ostringstream line;
  line << "gamma-star: gamma_star=" << sfmt(r.gamma_star) << " bracket=[" << sfmt(r.bracket_lo) << ","
       << sfmt(r.bracket_hi) << "] error_estimate=" << sfmt(0.5 * (r.bracket_hi - r.bracket_lo));
  return {line.str(), {}};
}

RunSummary run_fundsol(const RunConfig& cfg, Output& out) {
  const auto a = cfg.anisotropy();
  const auto grid = profile_grid(a, cfg.resolution_or(128));
  const auto fs = fundamental_solution(a, *cfg.alpha, grid, cfg.quadrature, cfg.tol, cfg.threads);
  const auto b = two_sided_bounds_check(fs, cfg.bound_points, cfg.seed);
  auto kv = fs.key_values();
  kv.emplace_back("bound_points", std::to_string(b.points));
  kv.emplace_back("bound_violations", std::to_string(b.violations));
  kv.emplace_back("bound_worst_upper", fmt(b.worst_upper));
  kv.emplace_back("bound_worst_lower", fmt(b.worst_lower));
  out.write("fundsol.csv", key_value_csv(kv));
  std::ostringstream os;
  fs.psi.write_csv(os);
  out.write("psi_profile.csv", os.str());
  std::ostringstream line;
  line << "fundsol: gamma=" << sfmt(fs.gamma) << " harnack=" << sfmt(fs.harnack) << " m0=" << sfmt(fs.m0)
       << " eigen_residual=" << sfmt(fs.eigen_residual) << " bound_violations=" << b.violations;
  return {line.str(), {}};
}

RunSummary run_norms(const RunConfig& cfg, Output& out) {
  const auto a = cfg.anisotropy();
  const std::size_t n = a.dim();
  const double alpha = *cfg.alpha, q = cfg.q;
  std::optional<PeriodicSample> sample;
  Field u;
  if (!cfg.sample.empty()) {
    std::ifstream is(cfg.sample);
    if (!is) throw IoError("cannot open sample file '" + cfg.sample + "'");
    sample = PeriodicSample::read(is);
    sample->validate();
    if (sample->n != n) throw ParameterError("sample dimension does not match beta");
    u = sample_field(*sample);
  } else {
    u = build_field(cfg.field, a);
  }
  const std::vector<double> radii = cfg.radii.empty() ? std::vector<double>{0.5, 0.25, 0.125, 0.0625} : cfg.radii;
  const double decay_theta = alpha - a.c / q;
  const double theta = cfg.theta.value_or(decay_theta > 0.0 && decay_theta <= 1.0 ? decay_theta : std::min(alpha, 1.0));

  std::ostringstream os;
  os << "quantity,value,error,samples,seed,flagged\n";
  auto row = [&](const std::string& k, double v, double e, std::size_t s, bool f) {
    os << k << "," << fmt(v) << "," << fmt(e) << "," << s << "," << cfg.seed << "," << (f ? 1 : 0) << "\n";
  };
  std::ostringstream line;
  line << "norms:";

  const auto camp = campanato_seminorm(u, a, q, alpha, cfg.centers, radii, cfg.seed, 1.0, cfg.threads);
  row("campanato", std::pow(camp.value, 1.0 / q), camp.saturation, camp.samples, camp.flagged);
  line << " campanato=" << sfmt(std::pow(camp.value, 1.0 / q)) << " (saturation " << sfmt(camp.saturation) << ")";

  HolderOptions ho;
  ho.pairs = cfg.pairs;
  ho.seed = cfg.seed;
  ho.threads = cfg.threads;
  ho.box = sample ? sample->L : 2.0;
  const auto hol = holder_seminorm(u, a, theta, ho);
  row("holder_theta_" + fmt(theta), hol.value, hol.saturation, hol.samples, hol.flagged);

  if (alpha < a.alpha_limit()) {
    GagliardoOptions go;
    go.budget = cfg.budget;
    go.seed = cfg.seed;
    go.threads = cfg.threads;
    go.box = cfg.box;
    const auto gag = sample ? gagliardo_seminorm(*sample, a, q, alpha, go) : gagliardo_seminorm(u, a, q, alpha, go);
    row("gagliardo", gag.value, gag.relative_error, gag.samples, gag.flagged);
    row("gagliardo_seminorm", gag.seminorm, gag.relative_error, gag.samples, gag.flagged);
    row("lq_norm", gag.lq_norm, 0.0, 0, false);
    line << " gagliardo=" << sfmt(gag.value) << " (rel_error " << sfmt(gag.relative_error) << ")";
  }

  if (std::abs(a.c - static_cast<double>(n)) < 1e-9 && q >= 2.0) {
    const auto s = sample ? *sample : PeriodicSample::from_field(u, n, cfg.grid, cfg.box);
    const auto b = bessel_norm(s, a, alpha, q);
    double cross = 0.0;
    if (b.plancherel) cross = std::abs(b.value - *b.plancherel) / b.value;
    row("bessel", b.value, cross, s.values.size(), false);
    line << " bessel=" << sfmt(b.value);
  }
  out.write("norms.csv", os.str());

  if (decay_theta > 0.0 && radii.size() >= 2) {
    const Point x0 = or_origin(cfg.x0, n);
    const auto t = decay_oscillation_check(u, a, q, alpha, x0, radii);
    std::ostringstream d;
    d << "R,r,difference,ratio\n";
    for (const auto& r : t.rows) d << fmt(r.R) << "," << fmt(r.r) << "," << fmt(r.difference) << "," << fmt(r.ratio) << "\n";
    d << "# theta=" << fmt(t.theta) << " seminorm=" << fmt(t.seminorm) << " slope=" << fmt(t.slope) << "\n";
    out.write("decay.csv", d.str());
    line << " decay_slope=" << sfmt(t.slope) << " theta=" << sfmt(t.theta);
  }
  if (!cfg.vanish_radii.empty()) {
    const auto t = vanishing_at_infinity_check(u, a, cfg.vanish_radii, 512, cfg.seed);
    std::ostringstream v;
    v << "R,max_abs\n";
    for (const auto& r : t.rows) v << fmt(r.R) << "," << fmt(r.max_abs) << "\n";
    v << "# slope=" << fmt(t.slope) << " decays=" << (t.decays ? 1 : 0) << "\n";
    out.write("vanishing.csv", v.str());
    line << " vanishing_slope=" << sfmt(t.slope);
  }
  return {line.str(), {}};
}

RunSummary run_embed(const RunConfig& cfg, Output& out) {
  const auto a = cfg.anisotropy();
  const std::size_t n = a.dim();
  if (!(std::abs(a.c - static_cast<double>(n)) < 1e-9)) {
    throw RegimeError("embed-check needs c = n (got c = " + fmt(a.c) + ", n = " + std::to_string(n) + ")");
  }
  const double alpha = *cfg.alpha, q = cfg.q;
  const auto fam = embedding_family(a);
  const double L = 4.0;
  std::vector<std::vector<EmbeddingReport>> reps(cfg.grids.size(), std::vector<EmbeddingReport>(fam.size()));
  std::vector<double> planch(fam.size() * cfg.grids.size(), 0.0);
  parallel_for(fam.size() * cfg.grids.size(), cfg.threads, [&](std::size_t job) {
    const std::size_t g = job / fam.size(), f = job % fam.size();
    const auto s = PeriodicSample::from_field(fam[f], n, cfg.grids[g], L);
    reps[g][f] = embedding_ratio(s, a, alpha, q, cfg.pairs, cfg.seed);
    const auto b2 = bessel_norm(s, a, alpha, 2.0);
    planch[job] = std::abs(b2.value - *b2.plancherel) / b2.value;
  });
  std::ostringstream os;
  os << "function,N,sup_norm,holder,bessel,ratio\n";
  for (std::size_t g = 0; g < cfg.grids.size(); ++g) {
    for (std::size_t f = 0; f < fam.size(); ++f) {
      const auto& r = reps[g][f];
      os << f << "," << cfg.grids[g] << "," << fmt(r.sup_norm) << "," << fmt(r.holder) << "," << fmt(r.bessel)
         << "," << fmt(r.ratio) << "\n";
    }
  }
  out.write("embed_check.csv", os.str());
  KeyValues kv;
  kv.emplace_back("theta", fmt(alpha - a.c / q));
  double spread = 0.0;
  for (std::size_t g = 0; g < cfg.grids.size(); ++g) {
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : reps[g]) {
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
    kv.emplace_back("max_over_min_N" + std::to_string(cfg.grids[g]), fmt(hi / lo));
    spread = std::max(spread, hi / lo);
  }
  double drift = 0.0;
  if (cfg.grids.size() >= 2) {
    const auto& c = reps[cfg.grids.size() - 2];
    const auto& f = reps.back();
    for (std::size_t k = 0; k < fam.size(); ++k) drift = std::max(drift, std::abs(f[k].ratio / c[k].ratio - 1.0));
    kv.emplace_back("refinement_drift", fmt(drift));
  }
  const double pl = *std::max_element(planch.begin(), planch.end());
  kv.emplace_back("plancherel_max_relative_difference", fmt(pl));
  out.write("embed_check_summary.csv", key_value_csv(kv));
  std::ostringstream line;
  line << "embed-check: max_over_min=" << sfmt(spread) << " refinement_drift=" << sfmt(drift)
       << " plancherel_error=" << sfmt(pl);
  return {line.str(), {}};
}

RunSummary run_geometry(const RunConfig& cfg, Output& out) {
  const auto a = cfg.anisotropy();
  const std::size_t n = a.dim();
  const auto inc = set_inclusion_check(a, cfg.samples, cfg.seed);
  const auto tri = quasi_triangle_constant(a, cfg.samples, cfg.seed);
  const auto grid = build_sphere_grid(a, cfg.resolution_or(default_angular_resolution(n)));
  double polar = 0.0, surface = 0.0;
  for (double w : grid.polar_weights()) polar += w;
  for (const auto& node : grid.nodes()) surface += node.weight;
  // c |{sum |x_i|^{mu b_i} < 1}| from the Gamma-function volume
  double vol = 1.0, inv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = a.smoothed(i);
    vol *= 2.0 * std::tgamma(1.0 + 1.0 / p);
    inv += 1.0 / p;
  }
  vol /= std::tgamma(1.0 + inv);
  KeyValues kv{{"n", std::to_string(n)},
               {"c", fmt(a.c)},
               {"mu", std::to_string(a.mu)},
               {"alpha_limit", fmt(a.alpha_limit())},
               {"inclusion_samples", std::to_string(inc.samples)},
               {"inclusion_violations", std::to_string(inc.violations)},
               {"inclusion_constant", fmt(ellipsoid_inclusion_constant(a))},
               {"volume_ratio_error", fmt(inc.volume_ratio_error)},
               {"triangle_constant_estimate", fmt(tri.estimate)},
               {"triangle_constant_bound", fmt(tri.analytic_bound)},
               {"grid_nodes", std::to_string(grid.size())},
               {"sphere_surface", fmt(surface)},
               {"polar_mass", fmt(polar)},
               {"polar_mass_exact", fmt(a.c * vol)}};
  out.write("geometry.csv", key_value_csv(kv));

  std::vector<Point> pts = cfg.points;
  if (pts.empty()) {
    for (int k = 0; k < 8; ++k) {
      Point p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = std::cos(0.7 * k + 1.3 * i) * std::pow(2.0, k % 4 - 1.5);
      pts.push_back(p);
    }
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < n; ++i) os << "x_" << i + 1 << ",";
  os << "cbl_distance,residual,scaling_exponent\n";
  double worst = 0.0;
  for (const auto& p : pts) {
    const double r = cbl_distance(p, a);
    const double res = r > 0.0 ? cbl_residual(p, a, r) : 0.0;
    const double kappa = 3.0;
    const double r3 = cbl_distance(scale_map(p, a, kappa), a);
    const double expo = r > 0.0 ? std::log(r3 / r) / std::log(kappa) : 0.0;
    worst = std::max(worst, std::abs(res));
    for (double x : p) os << fmt(x) << ",";
    os << fmt(r) << "," << fmt(res) << "," << fmt(expo) << "\n";
  }
  out.write("cbl.csv", os.str());
  std::ostringstream line;
  line << "geometry: c=" << sfmt(a.c) << " inclusion_violations=" << inc.violations
       << " volume_ratio_error=" << sfmt(inc.volume_ratio_error) << " cbl_residual_max=" << sfmt(worst)
       << " polar_mass_error=" << sfmt(std::abs(polar / (a.c * vol) - 1.0));
  return {line.str(), {}};
}

}  // namespace

Field build_field(const FieldSpec& spec, const Anisotropy& a) {
  const std::size_t n = a.dim();
  const Point center = or_origin(spec.center, n);
  if (spec.kind == "constant") return constant_field(spec.value);
  if (spec.kind == "gaussian") {
    std::vector<double> sigma = spec.sigma;
    if (sigma.empty()) sigma.assign(n, 1.0);
    if (sigma.size() == 1) sigma.assign(n, sigma[0]);
    return gaussian_field(a, center, sigma);
  }
  if (spec.kind == "bump") return bump_field(a, center, spec.radius);
  if (spec.kind == "barrier") return barrier(a, spec.gamma).field;
  if (spec.kind == "power") {
    // ||x - center||_beta^e, smoothly switched off between radius and 2 radius
    const double e = spec.exponent, rad = spec.radius;
    Field u;
    u.eval = [a, center, e, rad](std::span<const double> x) {
      Point d(x.begin(), x.end());
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= center[i];
      const double t = quasi_norm(d, a);
      return std::pow(t, e) * quad::smooth_cutoff(t, rad, 2.0 * rad);
    };
    u.decay.kind = DecayKind::bounded;
    u.decay.bound = std::pow(2.0 * rad, e);
    return u;
  }
  throw ParameterError("unknown field kind '" + spec.kind + "'");
}

RunSummary run_subcommand(const RunConfig& cfg) {
  Output out(cfg.out);
  RunSummary s;
  if (cfg.command == "eval") s = run_eval(cfg, out);
  else if (cfg.command == "barrier-sweep") s = run_sweep(cfg, out);
  else if (cfg.command == "gamma-star") s = run_gamma_star(cfg, out);
  else if (cfg.command == "fundsol") s = run_fundsol(cfg, out);
  else if (cfg.command == "norms") s = run_norms(cfg, out);
  else if (cfg.command == "embed-check") s = run_embed(cfg, out);
  else if (cfg.command == "geometry") s = run_geometry(cfg, out);
  else throw ConfigError("unknown subcommand '" + cfg.command + "'");
  s.files = out.files();
  return s;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::parameter: return 3;
    case ErrorKind::domain: return 4;
    case ErrorKind::quadrature: return 5;
    case ErrorKind::bracket: return 6;
    case ErrorKind::regime: return 7;
    case ErrorKind::io: return 8;
    case ErrorKind::internal: return 1;
  }
  return 1;
}

}  // namespace aniso
