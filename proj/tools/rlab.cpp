#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "rlab/cli/dispatch.hpp"

int main(int argc, char** argv) {
  using namespace rlab;
  CLI::App app{"rlab: numerical laboratory for deterministic continuous-time renewal theory"};
  app.set_help_flag("--help", "print this help and exit");
  app.fallthrough();
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<std::string> sets;
  app.add_option("-c,--config", config_path, "key = value file, or a JSON report to re-run");
  app.add_option("--set", sets, "key=value override (repeatable)");

  // one flag per config key, e.g. --gamma1 2.5 or --roof constant:1.5
  std::map<std::string, std::string> flags;
  for (const auto& [key, dflt] : config_entries(ExperimentConfig{}))
    app.add_option("--" + key, flags[key], "default: " + dflt);

  const std::map<std::string, std::string> about{
      {"srt", "strong renewal theorem: window ratios along a t-ladder, rectangle-mixing cross-check"},
      {"wre", "weak rational ergodicity: cumulative and occupation ratios, sigma-route Karamata check"},
      {"llt", "local limit theorem: fixed-n windows against the stable density"},
      {"liminf", "beta <= 1/2 regime: window percentiles, exceptional-set densities, Cesaro ratio"},
      {"spectral", "Ulam operator: gap, aperiodicity, eigenvalue and resolvent asymptotics"},
      {"xval", "Laplace transform of U: Monte Carlo against the resolvent or closed form"},
      {"iid", "i.i.d. renewal baseline with exact tail"},
      {"constants", "renewal constants d_beta, D_beta, c_beta"},
      {"density", "one-sided stable density: normalization, identity, sampler KS distance"}};
  for (const auto& [name, fn] : commands()) app.add_subcommand(name, about.count(name) ? about.at(name) : name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_config;
  }

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& [key, value] : flags)
      if (app.count("--" + key)) set_config_value(cfg, key, value);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw config_error(kv, "--set expects key=value");
      set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    validate_config(cfg);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  }
  return dispatch(app.get_subcommands().front()->get_name(), cfg);
}
