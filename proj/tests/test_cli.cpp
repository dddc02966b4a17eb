#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "aniso/config.hpp"
#include "aniso/errors.hpp"
#include "aniso/runner.hpp"

using namespace aniso;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text, const std::string& cmd) {
  try {
    parse_config(text, cmd);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("aniso_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const auto log = scratch() / "stdout.txt";
  const std::string cmd = std::string(ANISO_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int st = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.out = slurp(log);
  return r;
}

bool same_tree(const fs::path& a, const fs::path& b) {
  std::set<std::string> na, nb;
  for (const auto& e : fs::directory_iterator(a)) na.insert(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b)) nb.insert(e.path().filename().string());
  if (na != nb || na.empty()) return false;
  for (const auto& n : na) {
    if (slurp(a / n) != slurp(b / n)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("minimal eval config") {
  const auto c = parse_config("beta = 2, 2\nalpha = 0.9\n[eval]\npoints = 0.5, 0.5\n", "eval");
  CHECK(c.beta == std::vector<double>{2.0, 2.0});
  CHECK(*c.alpha == 0.9);
  REQUIRE(c.points.size() == 1);
  CHECK(c.points[0] == Point{0.5, 0.5});
  CHECK(c.field.kind == "gaussian");
  CHECK(c.seed == 1);
  CHECK(c.threads == 1);
}

TEST_CASE("values, fractions, comments and overrides") {
  const std::string text =
      "# anisotropy\n"
      "beta = (4/3, 4)   # c = 2\n"
      "alpha = 0.45\n"
      "seed = 12345678901234\n"
      "\n"
      "[quadrature]\n"
      "near_radius = 0.25\n"
      "[field]\n"
      "kind = barrier\n"
      "gamma = 0.3\n"
      "[eval]\n"
      "points = 1, 0; 0.3, -0.2\n"
      "scale = 2\n"
      "[gamma-star]\n"
      "tol = 1e-4\n";
  Overrides ov;
  ov.threads = 4;
  ov.resolution = 96;
  ov.out = "somewhere";
  const auto c = parse_config(text, "eval", ov);
  CHECK(c.beta[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(c.seed == 12345678901234ull);
  CHECK(c.quadrature.near_radius == 0.25);
  CHECK(c.field.gamma == 0.3);
  CHECK(c.points.size() == 2);
  CHECK(*c.scale == 2.0);
  CHECK(c.threads == 4);
  CHECK(*c.resolution == 96);
  CHECK(c.out == "somewhere");
  // other subcommands' sections are type-checked but not applied
  CHECK(c.tol == 1e-3);
  CHECK(config_error(text + "[fundsol]\ntol = abc\n", "eval").find("fundsol.tol") != std::string::npos);
}

TEST_CASE("alpha bound is named") {
  const auto e = config_error("beta = 2, 4\nalpha = 0.9\n[eval]\npoints = 1, 1\n", "eval");
  CHECK(e.find("2/b_max = 0.5") != std::string::npos);
}

TEST_CASE("duplicate keys list both lines") {
  const auto e = config_error("beta = 2, 2\nalpha = 0.5\n\nalpha = 0.6\n[eval]\npoints = 1, 1\n", "eval");
  CHECK(e.find("duplicate key 'alpha'") != std::string::npos);
  CHECK(e.find("lines 2 and 4") != std::string::npos);
}

TEST_CASE("all violations are reported") {
  const std::string text =
      "beta = 2, 2\n"
      "alpha = 1.5\n"
      "threads = x\n"
      "colour = blue\n"
      "[eval]\n"
      "points = 1, 2, 3\n"
      "oops\n"
      "[mystery]\n"
      "a = 1\n";
  const auto e = config_error(text, "eval");
  CHECK(e.find("line 3: threads") != std::string::npos);
  CHECK(e.find("line 4: unknown key 'colour'") != std::string::npos);
  CHECK(e.find("line 7: expected key = value") != std::string::npos);
  CHECK(e.find("line 8: unknown section [mystery]") != std::string::npos);
  CHECK(e.find("alpha = 1.5") != std::string::npos);
  CHECK(e.find("3 coordinates, expected 2") != std::string::npos);
}

TEST_CASE("per-subcommand preconditions") {
  CHECK(config_error("alpha = 0.5\n", "geometry").find("beta is required") != std::string::npos);
  CHECK(config_error("beta = 2, 2\n", "gamma-star").find("alpha is required") != std::string::npos);
  CHECK(config_error("beta = 2, 2, 2\nalpha = 0.5\n", "fundsol").find("needs n = 2") != std::string::npos);
  CHECK(config_error("beta = 2, 2\nalpha = 0.5\n[gamma-star]\nlo = 1.5\nhi = 1.0\n", "gamma-star")
            .find("violates 0 < lo < hi < c") != std::string::npos);
  CHECK(config_error("beta = 4/3, 4\nalpha = 0.8\n[embed-check]\nq = 2\n", "embed-check")
            .find("alpha q > c") != std::string::npos);
  CHECK(config_error("beta = 4/3, 4\nalpha = 0.8\n[embed-check]\nq = 4\n", "embed-check").empty());
  CHECK(config_error("beta = 2, 2\nalpha = 0.5\n[norms]\ngrid = 100\n", "norms").find("power of two") !=
        std::string::npos);
  CHECK(config_error("beta = 2, 2\nalpha = 0.5\n[norms]\nradii = 0.1, 0.2\n", "norms").find("decreasing") !=
        std::string::npos);
  CHECK(config_error("beta = 2, 2\nalpha = 0.5\n[barrier-sweep]\ngammas = 0.1, 2.5\n", "barrier-sweep")
            .find("gamma < c") != std::string::npos);
  CHECK(config_error("beta = 2, -1\n", "geometry").find("beta") != std::string::npos);
  CHECK(config_error("beta = 2, 2\nalpha = 0.5\n[field]\nkind = wave\n[eval]\npoints = 1, 1\n", "eval")
            .find("field.kind") != std::string::npos);
  CHECK_THROWS_AS(parse_config("beta = 2, 2\n", "frobnicate"), ConfigError);
}

TEST_CASE("exit codes are distinct") {
  std::set<int> codes;
  for (auto k : {ErrorKind::parameter, ErrorKind::domain, ErrorKind::quadrature, ErrorKind::bracket,
                 ErrorKind::regime, ErrorKind::config, ErrorKind::io, ErrorKind::internal}) {
    const int c = exit_code(k);
    CHECK(c > 0);
    codes.insert(c);
  }
  CHECK(codes.size() == 8);
  CHECK(exit_code(ErrorKind::config) == 2);
  CHECK(exit_code(ErrorKind::io) == 8);
}

TEST_CASE("eval on a constant field") {
  const auto cfg = write_file("const.cfg", "beta = 4/3, 4\nalpha = 0.4\n[field]\nkind = constant\nvalue = 5\n"
                                           "[eval]\npoints = 0.3, 0.7\n");
  const auto r = cli("eval --config " + cfg.string() + " --out " + (scratch() / "const").string());
  CHECK(r.code == 0);
  CHECK(r.out.rfind("eval: value=0 ", 0) == 0);
  const auto csv = slurp(scratch() / "const" / "eval.csv");
  CHECK(csv.rfind("x_1,x_2,value,error_estimate,", 0) == 0);
}

TEST_CASE("gamma-star from the command line") {
  const auto cfg = write_file("gs.cfg", "beta = 2, 2\nalpha = 0.9\n");
  const auto r = cli("gamma-star --config " + cfg.string() + " --resolution 64 --out " +
                     (scratch() / "gs").string());
  REQUIRE(r.code == 0);
  const auto pos = r.out.find("gamma_star=");
  REQUIRE(pos != std::string::npos);
  const double g = std::stod(r.out.substr(pos + 11));
  CHECK(g > 0.18);
  CHECK(g < 0.22);
  const auto csv = slurp(scratch() / "gs" / "gamma_star.csv");
  CHECK(csv.rfind("quantity,value\n", 0) == 0);
}

TEST_CASE("error categories reach the exit status") {
  const auto bad = write_file("bad.cfg", "beta = 2, 4\nalpha = 0.9\n");
  CHECK(cli("eval --config " + bad.string()).code == 2);
  CHECK(cli("eval").code == 2);
  CHECK(cli("eval --config " + (scratch() / "missing.cfg").string()).code == 8);

  const auto bracket = write_file("bracket.cfg", "beta = 2, 2\nalpha = 0.9\nresolution = 32\n"
                                                 "[gamma-star]\nlo = 0.4\nhi = 1.0\n");
  const auto rb = cli("gamma-star --config " + bracket.string() + " --out " + (scratch() / "b").string());
  CHECK(rb.code == 6);
  CHECK(rb.out.find("error:") != std::string::npos);

  const auto regime = write_file("regime.cfg", "beta = 1, 2\nalpha = 0.8\n[embed-check]\nq = 8\ngrids = 32\n");
  CHECK(cli("embed-check --config " + regime.string() + " --out " + (scratch() / "r").string()).code == 7);

  // a sample whose support reaches the box edge
  std::string wide = "2 4 1\n";
  for (int k = 0; k < 16; ++k) wide += "1\n";
  write_file("wide.txt", wide);
  const auto dom = write_file("dom.cfg", "beta = 2, 2\nalpha = 0.5\n[norms]\nsample = " +
                                             (scratch() / "wide.txt").string() + "\n");
  CHECK(cli("norms --config " + dom.string() + " --out " + (scratch() / "d").string()).code == 4);

  std::string one = "1 8 4\n";
  for (int k = 0; k < 8; ++k) one += (k == 4 ? "1\n" : "0\n");
  write_file("one.txt", one);
  const auto par = write_file("par.cfg", "beta = 2, 2\nalpha = 0.5\n[norms]\nsample = " +
                                             (scratch() / "one.txt").string() + "\n");
  CHECK(cli("norms --config " + par.string() + " --out " + (scratch() / "p").string()).code == 3);

  const auto nofile = write_file("nofile.cfg", "beta = 2, 2\nalpha = 0.5\n[norms]\nsample = /nonexistent/u.txt\n");
  CHECK(cli("norms --config " + nofile.string() + " --out " + (scratch() / "n").string()).code == 8);
}

TEST_CASE("identical outputs across thread counts and reruns") {
  const auto cfg = write_file("det.cfg",
                              "beta = 4/3, 4\nalpha = 0.45\n[field]\nkind = gaussian\nsigma = 0.4\n"
                              "[norms]\nq = 2\ncenters = 8\npairs = 2048\nbudget = 16384\ngrid = 32\n"
                              "vanish_radii = 1, 2, 4\n");
  const auto d1 = scratch() / "det1", d4 = scratch() / "det4", d1b = scratch() / "det1b", ds = scratch() / "dets";
  REQUIRE(cli("norms --config " + cfg.string() + " --threads 1 --out " + d1.string()).code == 0);
  REQUIRE(cli("norms --config " + cfg.string() + " --threads 4 --out " + d4.string()).code == 0);
  REQUIRE(cli("norms --config " + cfg.string() + " --threads 1 --out " + d1b.string()).code == 0);
  REQUIRE(cli("norms --config " + cfg.string() + " --seed 7 --out " + ds.string()).code == 0);
  CHECK(same_tree(d1, d4));
  CHECK(same_tree(d1, d1b));
  CHECK_FALSE(same_tree(d1, ds));

  const auto geo = write_file("geo.cfg", "beta = 1, 2, 4\n[geometry]\nsamples = 2000\n");
  REQUIRE(cli("geometry --config " + geo.string() + " --threads 1 --out " + (scratch() / "g1").string()).code == 0);
  REQUIRE(cli("geometry --config " + geo.string() + " --threads 4 --out " + (scratch() / "g4").string()).code == 0);
  CHECK(same_tree(scratch() / "g1", scratch() / "g4"));
  CHECK(slurp(scratch() / "g1" / "geometry.csv").find("inclusion_violations,0\n") != std::string::npos);
}
