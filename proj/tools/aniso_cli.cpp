#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "aniso/config.hpp"
#include "aniso/errors.hpp"
#include "aniso/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic fractional Laplacian toolkit"};
  app.require_subcommand(1, 1);
  std::string config_path, out;
  std::uint64_t seed = 0;
  int threads = 0, resolution = 0;
  for (const auto& name : aniso::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value configuration file")->required();
    sub->add_option("--out", out, "output directory (default: config 'out' or .)");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--resolution", resolution, "angular resolution, overrides the config")
        ->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : aniso::exit_code(aniso::ErrorKind::config);
  }
  auto* sub = app.get_subcommands().front();
  try {
    std::ifstream is(config_path);
    if (!is) throw aniso::IoError("cannot read config file '" + config_path + "'");
    std::stringstream text;
    text << is.rdbuf();
    aniso::Overrides ov;
    if (sub->count("--seed")) ov.seed = seed;
    if (sub->count("--threads")) ov.threads = threads;
    if (sub->count("--resolution")) ov.resolution = resolution;
    if (sub->count("--out")) ov.out = out;
    const auto cfg = aniso::parse_config(text.str(), sub->get_name(), ov);
    const auto summary = aniso::run_subcommand(cfg);
    std::cout << summary.line << "\n";
    return 0;
  } catch (const aniso::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return aniso::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return aniso::exit_code(aniso::ErrorKind::internal);
  }
}
