#include "aniso/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "aniso/errors.hpp"

namespace aniso {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

// plain decimal or a fraction p/q
bool parse_number(const std::string& text, double* out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    double p = 0, q = 0;
    if (!parse_number(s.substr(0, slash), &p) || !parse_number(s.substr(slash + 1), &q) || q == 0.0) {
      return false;
    }
    *out = p / q;
    return true;
  }
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || end != s.c_str() + s.size() || !std::isfinite(v)) return false;
  *out = v;
  return true;
}

bool parse_list(std::string s, std::vector<double>* out) {
  s = trim(s);
  if (s.size() >= 2 && ((s.front() == '(' && s.back() == ')') || (s.front() == '[' && s.back() == ']'))) {
    s = s.substr(1, s.size() - 2);
  }
  out->clear();
  if (trim(s).empty()) return false;
  for (const auto& item : split(s, ',')) {
    double v = 0;
    if (!parse_number(item, &v)) return false;
    out->push_back(v);
  }
  return true;
}

bool parse_unsigned(const std::string& s, std::uint64_t* out) {
  const std::string t = trim(s);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) return false;
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (errno != 0) return false;
  *out = v;
  return true;
}

bool parse_int(const std::string& s, int* out) {
  std::uint64_t v = 0;
  if (!parse_unsigned(s, &v) || v > 1u << 30) return false;
  *out = static_cast<int>(v);
  return true;
}

bool parse_size(const std::string& s, std::size_t* out) {
  std::uint64_t v = 0;
  if (!parse_unsigned(s, &v)) return false;
  *out = static_cast<std::size_t>(v);
  return true;
}

using Setter = std::function<std::string(RunConfig&, const std::string&)>;

// A setter returns an empty string on success, otherwise what was expected.
Setter number(double RunConfig::*m) {
  return [m](RunConfig& c, const std::string& v) -> std::string {
    return parse_number(v, &(c.*m)) ? "" : "expected a number";
  };
}
Setter opt_number(std::optional<double> RunConfig::*m) {
  return [m](RunConfig& c, const std::string& v) -> std::string {
    double x = 0;
    if (!parse_number(v, &x)) return "expected a number";
    c.*m = x;
    return "";
  };
}
Setter size(std::size_t RunConfig::*m) {
  return [m](RunConfig& c, const std::string& v) -> std::string {
    return parse_size(v, &(c.*m)) ? "" : "expected a nonnegative integer";
  };
}
Setter list(std::vector<double> RunConfig::*m) {
  return [m](RunConfig& c, const std::string& v) -> std::string {
    return parse_list(v, &(c.*m)) ? "" : "expected a comma-separated list of numbers";
  };
}
Setter point(Point RunConfig::*m) { return list(m); }

Setter quad_number(double QuadratureConfig::*m) {
  return [m](RunConfig& c, const std::string& v) -> std::string {
    return parse_number(v, &(c.quadrature.*m)) ? "" : "expected a number";
  };
}
Setter quad_int(int QuadratureConfig::*m) {
  return [m](RunConfig& c, const std::string& v) -> std::string {
    return parse_int(v, &(c.quadrature.*m)) ? "" : "expected a nonnegative integer";
  };
}
Setter field_number(double FieldSpec::*m) {
  return [m](RunConfig& c, const std::string& v) -> std::string {
    return parse_number(v, &(c.field.*m)) ? "" : "expected a number";
  };
}
Setter field_list(std::vector<double> FieldSpec::*m) {
  return [m](RunConfig& c, const std::string& v) -> std::string {
    return parse_list(v, &(c.field.*m)) ? "" : "expected a comma-separated list of numbers";
  };
}
Setter points_list(std::vector<Point> RunConfig::*m) {
  return [m](RunConfig& c, const std::string& v) -> std::string {
    (c.*m).clear();
    for (const auto& item : split(v, ';')) {
      Point p;
      if (!parse_list(item, &p)) return "expected points separated by ';', coordinates by ','";
      (c.*m).push_back(p);
    }
    return (c.*m).empty() ? "expected at least one point" : "";
  };
}

using Table = std::map<std::string, std::map<std::string, Setter>>;

const Table& table() {
  static const Table t = [] {
    Table t;
    auto& g = t[""];
    g["beta"] = list(&RunConfig::beta);
    g["mu"] = [](RunConfig& c, const std::string& v) -> std::string {
      int m = 0;
      if (!parse_int(v, &m)) return "expected a positive integer";
      c.mu = m;
      return "";
    };
    g["alpha"] = opt_number(&RunConfig::alpha);
    g["seed"] = [](RunConfig& c, const std::string& v) -> std::string {
      return parse_unsigned(v, &c.seed) ? "" : "expected an unsigned 64-bit integer";
    };
    g["threads"] = [](RunConfig& c, const std::string& v) -> std::string {
      return parse_int(v, &c.threads) ? "" : "expected a positive integer";
    };
    g["resolution"] = [](RunConfig& c, const std::string& v) -> std::string {
      int r = 0;
      if (!parse_int(v, &r)) return "expected a positive integer";
      c.resolution = r;
      return "";
    };
    g["out"] = [](RunConfig& c, const std::string& v) -> std::string {
      c.out = trim(v);
      return c.out.empty() ? "expected a directory" : "";
    };

    auto& q = t["quadrature"];
    q["near_radius"] = quad_number(&QuadratureConfig::near_radius);
    q["far_cutoff"] = quad_number(&QuadratureConfig::far_cutoff);
    q["rel_tol"] = quad_number(&QuadratureConfig::rel_tol);
    q["max_subdivisions"] = quad_int(&QuadratureConfig::max_subdivisions);
    q["angular_resolution"] = quad_int(&QuadratureConfig::angular_resolution);
    q["radial_order"] = quad_int(&QuadratureConfig::radial_order);

    auto& f = t["field"];
    f["kind"] = [](RunConfig& c, const std::string& v) -> std::string {
      c.field.kind = trim(v);
      return "";
    };
    f["value"] = field_number(&FieldSpec::value);
    f["gamma"] = field_number(&FieldSpec::gamma);
    f["exponent"] = field_number(&FieldSpec::exponent);
    f["center"] = field_list(&FieldSpec::center);
    f["sigma"] = field_list(&FieldSpec::sigma);
    f["radius"] = field_number(&FieldSpec::radius);

    auto& e = t["eval"];
    e["points"] = points_list(&RunConfig::points);
    e["scale"] = opt_number(&RunConfig::scale);

    auto& b = t["barrier-sweep"];
    b["alphas"] = list(&RunConfig::alphas);
    b["gammas"] = list(&RunConfig::gammas);

    auto& gs = t["gamma-star"];
    gs["lo"] = opt_number(&RunConfig::lo);
    gs["hi"] = opt_number(&RunConfig::hi);
    gs["tol"] = number(&RunConfig::tol);

    auto& fs = t["fundsol"];
    fs["tol"] = number(&RunConfig::tol);
    fs["bound_points"] = size(&RunConfig::bound_points);

    auto& n = t["norms"];
    n["q"] = number(&RunConfig::q);
    n["theta"] = opt_number(&RunConfig::theta);
    n["centers"] = size(&RunConfig::centers);
    n["radii"] = list(&RunConfig::radii);
    n["pairs"] = size(&RunConfig::pairs);
    n["budget"] = size(&RunConfig::budget);
    n["grid"] = size(&RunConfig::grid);
    n["box"] = number(&RunConfig::box);
    n["sample"] = [](RunConfig& c, const std::string& v) -> std::string {
      c.sample = trim(v);
      return "";
    };
    n["x0"] = point(&RunConfig::x0);
    n["vanish_radii"] = list(&RunConfig::vanish_radii);

    auto& em = t["embed-check"];
    em["q"] = number(&RunConfig::q);
    em["pairs"] = size(&RunConfig::pairs);
    em["grids"] = [](RunConfig& c, const std::string& v) -> std::string {
      std::vector<double> xs;
      if (!parse_list(v, &xs)) return "expected a comma-separated list of grid sizes";
      c.grids.clear();
      for (double x : xs) {
        if (x < 1 || x != std::floor(x)) return "grid sizes must be positive integers";
        c.grids.push_back(static_cast<std::size_t>(x));
      }
      return "";
    };

    auto& ge = t["geometry"];
    ge["samples"] = size(&RunConfig::samples);
    ge["points"] = points_list(&RunConfig::points);
    return t;
  }();
  return t;
}

// short form for messages
std::string show(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

bool power_of_two(std::size_t v) { return v >= 2 && (v & (v - 1)) == 0; }

void check_alpha(const RunConfig& c, const Anisotropy& a, std::vector<std::string>& errs) {
  if (!c.alpha) {
    errs.push_back("alpha is required for " + c.command);
    return;
  }
  const double al = *c.alpha;
  if (!(al > 0.0 && al < a.alpha_limit())) {
    errs.push_back("alpha = " + show(al) + " violates 0 < alpha < 2/b_max = " + show(a.alpha_limit()));
  }
}

void check_field(const RunConfig& c, const Anisotropy& a, std::vector<std::string>& errs) {
  const auto& f = c.field;
  const std::size_t n = a.dim();
  static const std::vector<std::string> kinds{"constant", "gaussian", "bump", "barrier", "power"};
  if (std::find(kinds.begin(), kinds.end(), f.kind) == kinds.end()) {
    errs.push_back("field.kind = '" + f.kind + "' is not one of constant, gaussian, bump, barrier, power");
    return;
  }
  if (!f.center.empty() && f.center.size() != n) {
    errs.push_back("field.center has " + std::to_string(f.center.size()) + " coordinates, expected " +
                   std::to_string(n));
  }
  if (f.kind == "gaussian") {
    if (!(f.sigma.empty() || f.sigma.size() == 1 || f.sigma.size() == n)) {
      errs.push_back("field.sigma needs 1 or " + std::to_string(n) + " entries");
    }
    for (double s : f.sigma) {
      if (!(s > 0.0)) errs.push_back("field.sigma entries must be positive");
    }
  }
  if ((f.kind == "bump" || f.kind == "power") && !(f.radius > 0.0)) {
    errs.push_back("field.radius must be positive");
  }
  if (f.kind == "barrier" && !(f.gamma > 0.0 && f.gamma < a.c)) {
    errs.push_back("field.gamma = " + show(f.gamma) + " violates 0 < gamma < c = " + show(a.c));
  }
  if (f.kind == "power" && !(f.exponent > 0.0)) errs.push_back("field.exponent must be positive");
}

void check_points(const std::vector<Point>& pts, std::size_t n, const std::string& what,
                  std::vector<std::string>& errs) {
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (pts[k].size() != n) {
      errs.push_back(what + " point " + std::to_string(k + 1) + " has " + std::to_string(pts[k].size()) +
                     " coordinates, expected " + std::to_string(n));
    }
  }
}

void validate(RunConfig& c, std::vector<std::string>& errs) {
  if (c.beta.empty()) {
    errs.push_back("beta is required");
    return;
  }
  Anisotropy a;
  try {
    a = c.anisotropy();
  } catch (const Error& e) {
    errs.push_back(std::string("beta/mu: ") + e.what());
    return;
  }
  const std::size_t n = a.dim();
  if (c.threads < 1) errs.push_back("threads must be at least 1");
  try {
    c.quadrature.validate();
  } catch (const Error& e) {
    errs.push_back(std::string("quadrature: ") + e.what());
  }
  const std::string& cmd = c.command;
  if (cmd == "eval") {
    check_alpha(c, a, errs);
    check_field(c, a, errs);
    if (c.points.empty()) errs.push_back("eval.points is required");
    check_points(c.points, n, "eval.points", errs);
    if (c.scale && !(*c.scale > 0.0)) errs.push_back("eval.scale must be positive");
    if (c.scale && c.field.kind != "barrier") {
      errs.push_back("eval.scale (homogeneity check) needs field.kind = barrier");
    }
  } else if (cmd == "barrier-sweep") {
    if (c.alphas.empty() && c.alpha) c.alphas = {*c.alpha};
    for (double al : c.alphas) {
      if (!(al > 0.0 && al < a.alpha_limit())) {
        errs.push_back("barrier-sweep.alphas entry " + show(al) + " violates 0 < alpha < 2/b_max = " +
                       show(a.alpha_limit()));
      }
    }
    for (double g : c.gammas) {
      if (!(g > 0.0 && g < a.c)) {
        errs.push_back("barrier-sweep.gammas entry " + show(g) + " violates 0 < gamma < c = " + show(a.c));
      }
    }
    if (n > 3) errs.push_back("barrier-sweep supports n = 2 and n = 3");
    if (c.resolution && *c.resolution < 4) errs.push_back("resolution must be at least 4");
  } else if (cmd == "gamma-star" || cmd == "fundsol") {
    check_alpha(c, a, errs);
    if (n != 2) errs.push_back(cmd + " needs n = 2 (got n = " + std::to_string(n) + ")");
    if (c.resolution && *c.resolution < 16) errs.push_back("resolution must be at least 16");
    if (!(c.tol > 0.0)) errs.push_back(cmd + ".tol must be positive");
    const double lo = c.lo.value_or(1e-3), hi = c.hi.value_or(a.c - 1e-3);
    if (!(lo > 0.0 && hi < a.c && lo < hi)) {
      errs.push_back("gamma bracket [" + show(lo) + ", " + show(hi) + "] violates 0 < lo < hi < c = " + show(a.c));
    }
    if (cmd == "fundsol" && c.bound_points < 1) errs.push_back("fundsol.bound_points must be positive");
  } else if (cmd == "norms") {
    check_alpha(c, a, errs);
    if (c.sample.empty()) check_field(c, a, errs);
    if (!(c.q >= 1.0)) errs.push_back("norms.q = " + show(c.q) + " violates q >= 1");
    if (c.theta && !(*c.theta > 0.0 && *c.theta <= 1.0)) {
      errs.push_back("norms.theta = " + show(*c.theta) + " violates 0 < theta <= 1");
    }
    if (c.centers < 1) errs.push_back("norms.centers must be positive");
    if (c.pairs < 1) errs.push_back("norms.pairs must be positive");
    if (c.budget < 64) errs.push_back("norms.budget must be at least 64");
    if (!power_of_two(c.grid)) errs.push_back("norms.grid = " + std::to_string(c.grid) + " is not a power of two");
    if (!(c.box > 0.0)) errs.push_back("norms.box must be positive");
    if (n > 3) errs.push_back("norms supports n <= 3");
    if (!c.x0.empty() && c.x0.size() != n) errs.push_back("norms.x0 has the wrong dimension");
    for (std::size_t k = 0; k < c.radii.size(); ++k) {
      if (!(c.radii[k] > 0.0) || (k > 0 && !(c.radii[k] < c.radii[k - 1]))) {
        errs.push_back("norms.radii must be positive and strictly decreasing");
        break;
      }
    }
    for (std::size_t k = 0; k < c.vanish_radii.size(); ++k) {
      if (!(c.vanish_radii[k] > 0.0) || (k > 0 && !(c.vanish_radii[k] > c.vanish_radii[k - 1]))) {
        errs.push_back("norms.vanish_radii must be positive and strictly increasing");
        break;
      }
    }
  } else if (cmd == "embed-check") {
    if (!c.alpha) {
      errs.push_back("alpha is required for embed-check");
    } else {
      if (!(*c.alpha > 0.0)) errs.push_back("alpha must be positive");
      if (!(*c.alpha * c.q > a.c)) {
        errs.push_back("alpha * q = " + show(*c.alpha * c.q) + " violates alpha q > c = " + show(a.c));
      }
    }
    if (!(c.q >= 2.0)) errs.push_back("embed-check.q = " + show(c.q) + " violates q >= 2");
    if (n > 3) errs.push_back("embed-check supports n <= 3");
    if (c.grids.empty()) errs.push_back("embed-check.grids must not be empty");
    for (std::size_t g : c.grids) {
      if (!power_of_two(g)) errs.push_back("embed-check.grids entry " + std::to_string(g) + " is not a power of two");
    }
    if (c.pairs < 1) errs.push_back("embed-check.pairs must be positive");
  } else if (cmd == "geometry") {
    if (c.samples < 1) errs.push_back("geometry.samples must be positive");
    check_points(c.points, n, "geometry.points", errs);
  }
}

}  // namespace

Anisotropy RunConfig::anisotropy() const { return make_anisotropy(beta, mu); }

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"eval",    "barrier-sweep", "gamma-star", "fundsol",
                                          "norms",   "embed-check",   "geometry"};
  return s;
}

RunConfig parse_config(const std::string& text, const std::string& command, const Overrides& ov) {
  std::vector<std::string> errs;
  RunConfig cfg;
  cfg.command = command;
  const auto& cmds = subcommands();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end()) {
    throw ConfigError("unknown subcommand '" + command + "'");
  }
  const auto& tab = table();
  std::map<std::pair<std::string, std::string>, int> seen;
  std::string section;
  bool section_known = true;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  RunConfig scratch;  // absorbs sections of other subcommands after type checking
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const std::string at = "line " + std::to_string(line) + ": ";
    if (s.front() == '[') {
      if (s.back() != ']') {
        errs.push_back(at + "unterminated section header");
        section_known = false;
        continue;
      }
      section = trim(s.substr(1, s.size() - 2));
      section_known = tab.count(section) > 0 && !section.empty();
      if (!section_known) errs.push_back(at + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      errs.push_back(at + "expected key = value");
      continue;
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (!section_known) continue;
    const std::string where = section.empty() ? key : section + "." + key;
    const auto& keys = tab.at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) {
      errs.push_back(at + "unknown key '" + where + "'");
      continue;
    }
    const auto [pos, fresh] = seen.emplace(std::make_pair(section, key), line);
    if (!fresh) {
      errs.push_back(at + "duplicate key '" + where + "' (lines " + std::to_string(pos->second) + " and " +
                     std::to_string(line) + ")");
      continue;
    }
    const bool own = section.empty() || section == "quadrature" || section == "field" || section == command;
    const std::string err = it->second(own ? cfg : scratch, value);
    if (!err.empty()) errs.push_back(at + where + ": " + err + ", got '" + value + "'");
  }
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.threads) cfg.threads = *ov.threads;
  if (ov.resolution) cfg.resolution = *ov.resolution;
  if (ov.out) cfg.out = *ov.out;
  validate(cfg, errs);
  if (!errs.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

}  // namespace aniso
