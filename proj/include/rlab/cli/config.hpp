#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rlab/errors.hpp"

namespace rlab {

/// Flat key = value experiment description.  Every key has a default; the
/// empty config is the flagship system (gamma1 = 4/3, c1 = 1, affine roof
/// (1, 0.5), A = B = Y, seed 0).
struct ExperimentConfig {
  // system
  std::string mode = "deterministic";  // deterministic | iid
  double gamma1 = 4.0 / 3.0;
  double c1 = 1.0;
  std::string roof = "affine:1,0.5";  // affine:a0,a1 | constant:c
  double iid_beta = 0.75;
  double iid_c0 = 1.5;
  std::string iid_law = "balanced";  // balanced | pareto
  double beta = NAN;  // constants/density only; NaN = derived from the system

  // sets: "Y", "left", "right" or "lo,hi"
  std::string A = "Y", B = "Y";
  double a1 = 0, a2 = 1, b1 = 0, b2 = 0.5;

  // grids
  double h = 0.5;
  double t_start = 100, t_end = 1e4, t_factor = 2;
  double liminf_t_end = 1e4;
  int liminf_decades = 3;
  double liminf_spacing = 0.02;  // relative spacing of the dense window grid
  std::vector<int> n_list{25, 50, 100, 200};
  int llt_points = 40;
  double llt_h = 0.05;  // window width / d_n
  double llt_lo = 0.2, llt_hi = 5.0;
  double b_lo = 1e-3, b_hi = 1e-1;
  int b_count = 15;
  double aper_lo = 0.05, aper_hi = 20;
  int aper_count = 200;
  double res_b_lo = 1e-6, res_b_hi = 1e-4;
  int res_b_count = 9;
  std::vector<double> sigma{0.05, 0.1, 0.2};
  double karamata_lo = 1e-5, karamata_hi = 1e-3;

  // budgets
  std::uint64_t N = 100000;
  std::uint64_t N_check = 0;  // cross-check passes; 0 = N/4
  int grid_size = 4096;
  bool refine_check = false;  // also build grid_size/2 and report the lambda drift
  int samples_per_cell = 16;
  std::uint64_t max_iter = 1000000000ULL;
  double time_budget = 0;  // seconds, 0 = unlimited
  std::uint64_t seed = 0;
  int shards = 1, threads = 1;
  double ratio_tol = NAN;  // NaN = per-experiment default

  // outputs
  std::string output_dir = "rlab_out";
  std::string formats = "json,csv";

  double derived_beta() const {
    if (!std::isnan(beta)) return beta;
    return mode == "iid" ? iid_beta : 1.0 / gamma1;
  }
  bool iid() const { return mode == "iid"; }
  std::uint64_t n_check() const { return N_check ? N_check : std::max<std::uint64_t>(N / 4, 1000); }
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  // accept p/q so that gamma1 = 4/3 is exact to the last bit
  const auto slash = v.find('/');
  try {
    std::size_t pos = 0;
    if (slash != std::string::npos) {
      const double p = std::stod(v.substr(0, slash), &pos);
      if (pos != slash) throw config_error(key, "not a number: " + v);
      const double q = std::stod(v.substr(slash + 1), &pos);
      if (pos != v.size() - slash - 1) throw config_error(key, "not a number: " + v);
      return p / q;
    }
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw config_error(key, "not a number: " + v);
    return x;
  } catch (const std::logic_error&) {
    throw config_error(key, "not a number: " + v);
  }
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (!(x >= 0 && x < 1.8e19 && std::floor(x) == x)) throw config_error(key, "expected a non-negative integer: " + v);
  if (v.find_first_of(".eE/") == std::string::npos) return std::stoull(v);
  return static_cast<std::uint64_t>(x);
}

inline int to_int(const std::string& key, const std::string& v) {
  const auto x = to_u64(key, v);
  if (x > 1000000000ULL) throw config_error(key, "value too large: " + v);
  return static_cast<int>(x);
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw config_error(key, "expected true/false: " + v);
}

template <class T, class F>
std::vector<T> to_list(const std::string& key, const std::string& v, F conv) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(conv(key, trim(item)));
  if (out.empty()) throw config_error(key, "empty list");
  return out;
}

inline std::string fmt(double x) {
  if (std::isnan(x)) return "auto";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

template <class T>
std::string fmt_list(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>) s += fmt(v[i]);
    else s += std::to_string(v[i]);
  }
  return s;
}

// One table drives parsing, printing and the list of known keys.
template <class Visitor>
void visit_fields(ExperimentConfig& c, Visitor&& v) {
  v("mode", c.mode);
  v("gamma1", c.gamma1);
  v("c1", c.c1);
  v("roof", c.roof);
  v("iid_beta", c.iid_beta);
  v("iid_c0", c.iid_c0);
  v("iid_law", c.iid_law);
  v("beta", c.beta);
  v("A", c.A);
  v("B", c.B);
  v("a1", c.a1);
  v("a2", c.a2);
  v("b1", c.b1);
  v("b2", c.b2);
  v("h", c.h);
  v("t_start", c.t_start);
  v("t_end", c.t_end);
  v("t_factor", c.t_factor);
  v("liminf_t_end", c.liminf_t_end);
  v("liminf_decades", c.liminf_decades);
  v("liminf_spacing", c.liminf_spacing);
  v("n_list", c.n_list);
  v("llt_points", c.llt_points);
  v("llt_h", c.llt_h);
  v("llt_lo", c.llt_lo);
  v("llt_hi", c.llt_hi);
  v("b_lo", c.b_lo);
  v("b_hi", c.b_hi);
  v("b_count", c.b_count);
  v("aper_lo", c.aper_lo);
  v("aper_hi", c.aper_hi);
  v("aper_count", c.aper_count);
  v("res_b_lo", c.res_b_lo);
  v("res_b_hi", c.res_b_hi);
  v("res_b_count", c.res_b_count);
  v("sigma", c.sigma);
  v("karamata_lo", c.karamata_lo);
  v("karamata_hi", c.karamata_hi);
  v("N", c.N);
  v("N_check", c.N_check);
  v("grid_size", c.grid_size);
  v("refine_check", c.refine_check);
  v("samples_per_cell", c.samples_per_cell);
  v("max_iter", c.max_iter);
  v("time_budget", c.time_budget);
  v("seed", c.seed);
  v("shards", c.shards);
  v("threads", c.threads);
  v("ratio_tol", c.ratio_tol);
  v("output_dir", c.output_dir);
  v("formats", c.formats);
}

}  // namespace config_detail

/// Sets one key from its textual value.  Unknown keys are errors.
inline void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  using namespace config_detail;
  bool found = false;
  visit_fields(c, [&](const char* name, auto& field) {
    if (found || key != name) return;
    found = true;
    using T = std::decay_t<decltype(field)>;
    if constexpr (std::is_same_v<T, std::string>) field = value;
    else if constexpr (std::is_same_v<T, double>) field = (value == "auto" ? NAN : to_double(key, value));
    else if constexpr (std::is_same_v<T, bool>) field = to_bool(key, value);
    else if constexpr (std::is_same_v<T, int>) field = to_int(key, value);
    else if constexpr (std::is_same_v<T, std::uint64_t>) field = to_u64(key, value);
    else if constexpr (std::is_same_v<T, std::vector<int>>) field = to_list<int>(key, value, to_int);
    else field = to_list<double>(key, value, to_double);
  });
  if (!found) throw config_error(key, "unknown key");
}

/// Range checks.  Throws config_error naming the first offending key.
inline void validate_config(const ExperimentConfig& c) {
  auto need = [](bool ok, const char* key, const char* what) {
    if (!ok) throw config_error(key, what);
  };
  need(c.mode == "deterministic" || c.mode == "iid", "mode", "must be deterministic or iid");
  need(c.gamma1 >= 1.0 && c.gamma1 <= 10.0, "gamma1", "must lie in [1, 10]");
  need(c.c1 > 0.0 && c.c1 <= 1.0, "c1", "must lie in (0, 1]");
  need(c.roof.rfind("affine:", 0) == 0 || c.roof.rfind("constant:", 0) == 0, "roof", "must be affine:a0,a1 or constant:c");
  need(c.iid_beta > 0 && c.iid_beta <= 1, "iid_beta", "must lie in (0, 1]");
  need(c.iid_c0 > 0, "iid_c0", "must be positive");
  need(c.iid_law == "balanced" || c.iid_law == "pareto", "iid_law", "must be balanced or pareto");
  need(std::isnan(c.beta) || (c.beta >= 0 && c.beta <= 1), "beta", "must lie in [0, 1]");
  need(c.a1 >= 0 && c.a1 < c.a2, "a1", "need 0 <= a1 < a2");
  need(c.b1 >= 0 && c.b1 < c.b2, "b1", "need 0 <= b1 < b2");
  need(c.h > 0, "h", "must be positive");
  need(c.t_start > 0 && c.t_start <= c.t_end, "t_start", "need 0 < t_start <= t_end");
  need(c.t_factor > 1, "t_factor", "must exceed 1");
  need(c.liminf_t_end > 0, "liminf_t_end", "must be positive");
  need(c.liminf_decades >= 2 && c.liminf_decades <= 8, "liminf_decades", "must lie in [2, 8]");
  need(c.liminf_spacing > 0 && c.liminf_spacing < 1, "liminf_spacing", "must lie in (0, 1)");
  for (int n : c.n_list) need(n >= 1, "n_list", "entries must be >= 1");
  need(c.llt_points >= 2, "llt_points", "must be >= 2");
  need(c.llt_h > 0, "llt_h", "must be positive");
  need(c.llt_lo > 0 && c.llt_lo < c.llt_hi, "llt_lo", "need 0 < llt_lo < llt_hi");
  need(c.b_lo > 0 && c.b_lo < c.b_hi, "b_lo", "need 0 < b_lo < b_hi");
  need(c.b_count >= 3, "b_count", "must be >= 3");
  need(c.aper_lo > 0 && c.aper_lo < c.aper_hi, "aper_lo", "need 0 < aper_lo < aper_hi");
  need(c.aper_count >= 1, "aper_count", "must be >= 1");
  need(c.res_b_lo > 0 && c.res_b_lo < c.res_b_hi, "res_b_lo", "need 0 < res_b_lo < res_b_hi");
  need(c.res_b_count >= 2, "res_b_count", "must be >= 2");
  for (double s : c.sigma) need(s > 0, "sigma", "entries must be positive");
  need(c.karamata_lo > 0 && c.karamata_lo < c.karamata_hi, "karamata_lo", "need 0 < karamata_lo < karamata_hi");
  need(c.N >= 1, "N", "must be >= 1");
  need(c.grid_size >= 2, "grid_size", "must be >= 2");
  need(c.samples_per_cell >= 10, "samples_per_cell", "must be >= 10");
  need(c.max_iter >= 1, "max_iter", "must be >= 1");
  need(c.time_budget >= 0, "time_budget", "must be >= 0");
  need(c.shards >= 1 && c.shards <= 4096, "shards", "must lie in [1, 4096]");
  need(c.threads >= 1 && c.threads <= 256, "threads", "must lie in [1, 256]");
  need(std::isnan(c.ratio_tol) || (c.ratio_tol > 0 && c.ratio_tol < 1), "ratio_tol", "must lie in (0, 1)");
  need(!c.output_dir.empty(), "output_dir", "must not be empty");
}

/// Parses "key = value" lines; '#' starts a comment.
inline ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig c = {}) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = config_detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw config_error("line " + std::to_string(lineno), "expected key = value");
    set_config_value(c, config_detail::trim(line.substr(0, eq)), config_detail::trim(line.substr(eq + 1)));
  }
  return c;
}

inline ExperimentConfig parse_config_file(const std::string& path, ExperimentConfig c = {}) {
  std::ifstream f(path);
  if (!f) throw config_error("config", "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), c);
}

/// All keys with their values, in declaration order.
inline std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg) {
  using namespace config_detail;
  std::vector<std::pair<std::string, std::string>> out;
  auto c = cfg;
  visit_fields(c, [&](const char* name, auto& field) {
    using T = std::decay_t<decltype(field)>;
    if constexpr (std::is_same_v<T, std::string>) out.emplace_back(name, field);
    else if constexpr (std::is_same_v<T, double>) out.emplace_back(name, fmt(field));
    else if constexpr (std::is_same_v<T, bool>) out.emplace_back(name, field ? "true" : "false");
    else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) out.emplace_back(name, std::to_string(field));
    else out.emplace_back(name, fmt_list(field));
  });
  return out;
}

inline std::string config_to_text(const ExperimentConfig& c) {
  std::string s;
  for (const auto& [k, v] : config_entries(c)) s += k + " = " + v + "\n";
  return s;
}

inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return config_entries(a) == config_entries(b); }

}  // namespace rlab
