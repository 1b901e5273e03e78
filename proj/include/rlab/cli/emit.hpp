#pragma once

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rlab/cli/config.hpp"
#include "rlab/verify/report.hpp"

namespace rlab {

inline constexpr int schema_version = 1;

inline nlohmann::ordered_json report_to_json(const ExperimentReport& r, bool with_tables = true) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = schema_version;
  j["experiment_id"] = r.experiment_id;
  j["verdict"] = to_string(r.verdict());
  j["seed"] = r.seed;
  j["config"] = ordered_json::object();
  for (const auto& [k, v] : r.config) j["config"][k] = v;
  j["system"] = ordered_json::object();
  for (const auto& [k, v] : r.system) j["system"][k] = v;
  j["verdicts"] = ordered_json::array();
  for (const auto& c : r.checks)
    j["verdicts"].push_back({{"criterion", c.criterion}, {"verdict", to_string(c.verdict)}, {"value", c.value},
                             {"lo", c.lo}, {"hi", c.hi}, {"tolerance", c.tolerance}, {"note", c.note}});
  if (with_tables) {
    j["tables"] = ordered_json::array();
    for (const auto& t : r.tables) j["tables"].push_back({{"name", t.name}, {"columns", t.columns}, {"rows", t.rows}});
  }
  j["warnings"] = r.warnings;
  j["timings"] = ordered_json::object();  // wall clock; not part of the determinism contract
  for (const auto& [k, v] : r.timings) j["timings"][k] = v;
  return j;
}

inline std::string table_to_csv(const Table& t) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

/// RLAB_OUTPUT_DIR, when set, replaces the configured output directory.
inline std::filesystem::path output_directory(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("RLAB_OUTPUT_DIR"); env && *env) return env;
  return cfg.output_dir;
}

/// Writes <dir>/<id>.json and <dir>/<id>_<table>.csv; returns the files written.
inline std::vector<std::filesystem::path> write_artifacts(const ExperimentReport& r, const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path dir = output_directory(cfg);
  fs::create_directories(dir);
  std::vector<fs::path> out;
  const bool json = cfg.formats.find("json") != std::string::npos, csv = cfg.formats.find("csv") != std::string::npos;
  if (json) {
    const auto p = dir / (r.experiment_id + ".json");
    std::ofstream(p) << report_to_json(r).dump(2) << '\n';
    out.push_back(p);
  }
  if (csv) {
    for (const auto& t : r.tables) {
      const auto p = dir / (r.experiment_id + "_" + t.name + ".csv");
      std::ofstream(p) << table_to_csv(t);
      out.push_back(p);
    }
  }
  return out;
}

/// Reads a config file: either flat key = value text or a JSON report whose
/// "config" block is replayed.
inline ExperimentConfig load_config(const std::string& path, ExperimentConfig c = {}) {
  std::ifstream f(path);
  if (!f) throw config_error("config", "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw config_error("config", std::string("bad JSON: ") + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) throw config_error("config", "JSON report without a config block");
    for (const auto& [k, v] : j["config"].items()) set_config_value(c, k, v.is_string() ? v.get<std::string>() : v.dump());
    return c;
  }
  return parse_config_text(text, c);
}

}  // namespace rlab
