#pragma once

#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "rlab/cli/emit.hpp"
#include "rlab/verify/experiments.hpp"

namespace rlab {

enum ExitCode { exit_pass = 0, exit_fail = 1, exit_inconclusive = 2, exit_config = 3, exit_numerical = 4 };

inline const std::map<std::string, std::function<ExperimentReport(const ExperimentConfig&)>>& commands() {
  static const std::map<std::string, std::function<ExperimentReport(const ExperimentConfig&)>> m{
      {"srt", run_srt},           {"wre", run_wre},         {"llt", run_llt},
      {"liminf", run_liminf},     {"spectral", run_spectral}, {"xval", cross_validate},
      {"iid", run_iid_baseline},  {"constants", run_constants}, {"density", run_density},
  };
  return m;
}

inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::pass: return exit_pass;
    case Verdict::fail: return exit_fail;
    default: return exit_inconclusive;
  }
}

inline void print_summary(const ExperimentReport& r, std::ostream& os) {
  for (const auto& c : r.checks) {
    os << to_string(c.verdict) << "  " << c.criterion << "  value=" << c.value << "  [" << c.tolerance << "]";
    if (!c.note.empty()) os << "  (" << c.note << ")";
    os << '\n';
  }
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';
  os << r.experiment_id << ": " << to_string(r.verdict()) << '\n';
}

/// Runs one command end to end: experiment, artifacts, summary, exit code.
inline int dispatch(const std::string& command, const ExperimentConfig& cfg, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  const auto it = commands().find(command);
  if (it == commands().end()) {
    err << "unknown command: " << command << '\n';
    return exit_config;
  }
  try {
    validate_config(cfg);
    const auto rep = it->second(cfg);
    if (command == "constants")
      for (const auto& [k, v] : rep.system) out << k << " = " << v << '\n';
    for (const auto& p : write_artifacts(rep, cfg)) out << "wrote " << p.string() << '\n';
    print_summary(rep, out);
    return exit_code(rep.verdict());
  } catch (const config_error& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const domain_error& e) {
    err << "refused: " << e.what() << '\n';
    return exit_config;
  } catch (const numerical_error& e) {
    err << "numerical error: " << e.what() << " (achieved " << e.achieved() << ")\n";
    return exit_numerical;
  } catch (const fit_error& e) {
    err << "numerical error: " << e.what() << '\n';
    return exit_numerical;
  } catch (const truncation_error& e) {
    err << "numerical error: " << e.what() << '\n';
    return exit_numerical;
  }
}

}  // namespace rlab
