// Acceptance runner: one PASS/FAIL line per criterion.  Artifacts of every run
// land under --out (default ./acceptance_out), one directory per criterion.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rlab/cli/emit.hpp"
#include "rlab/verify/experiments.hpp"

using namespace rlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void expect(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  // A named check of a report must carry the wanted verdict.
  void expect(const ExperimentReport& r, const std::string& name, Verdict want = Verdict::pass) {
    const Check* c = r.find(name);
    if (!c) return expect(false, r.experiment_id + ": missing check " + name);
    std::ostringstream os;
    os << name << " = " << std::setprecision(6) << c->value << " [" << c->tolerance << "] -> " << to_string(c->verdict);
    if (!c->note.empty()) os << " (" << c->note << ")";
    expect(c->verdict == want, os.str());
  }
  void expect_all(const ExperimentReport& r) {
    for (const auto& c : r.checks) expect(r, c.criterion);
  }
};

std::string num(double x, int prec = 6) {
  std::ostringstream os;
  os << std::setprecision(prec) << x;
  return os.str();
}

fs::path out_root = "acceptance_out";
int current = 0;

ExperimentReport keep(ExperimentReport r, const ExperimentConfig& cfg, const std::string& tag) {
  auto c = cfg;
  c.output_dir = (out_root / ("criterion_" + std::to_string(current)) / tag).string();
  write_artifacts(r, c);
  return r;
}

ExperimentConfig iid_config() {
  ExperimentConfig c;
  c.mode = "iid";
  c.iid_beta = 0.75;
  return c;
}

// ---------------------------------------------------------------------------

Outcome constants() {
  Outcome o;
  const double pi = std::numbers::pi;
  auto near = [&](const std::string& what, double got, double want, double tol) {
    o.expect(std::abs(got - want) <= tol, what + " = " + num(got, 17) + " vs " + num(want, 17));
  };
  near("d_{3/4}", renewal_constants(0.75).d_beta, std::sqrt(2.0) / (2 * pi), 1e-12);
  near("D_{1/2}", renewal_constants(0.5).D_beta, 2 / pi, 1e-12);
  near("D_1", renewal_constants(1.0).D_beta, 1.0, 1e-12);
  near("D_0", renewal_constants(0.0).D_beta, 1.0, 1e-12);
  for (double b : {0.4, 0.6, 0.75, 0.9}) {
    const cplx q = c_beta_quadrature(b);
    near("|c_beta| quadrature, beta=" + num(b), std::abs(q), std::tgamma(1 - b), 1e-8 * std::tgamma(1 - b));
    near("arg c_beta quadrature, beta=" + num(b), std::arg(q), pi * b / 2, 1e-8);
    const cplx cf = *renewal_constants(b).c_beta;
    near("|c_beta closed form - quadrature|, beta=" + num(b), std::abs(cf - q), 0, 1e-8 * std::abs(q));
  }
  return o;
}

Outcome density() {
  Outcome o;
  for (double b : {0.6, 0.75, 0.9}) {
    ExperimentConfig c;
    c.beta = b;
    c.N = 1000000;
    const auto r = keep(run_density(c), c, "beta_" + num(b));
    o.expect(std::abs(r.find("density.integral")->value - 1) <= 1e-6, "beta=" + num(b) + " integral = " + num(r.find("density.integral")->value, 12));
    // the identity's right-hand side is d_beta = sin(pi beta)/pi
    const double d = std::sin(std::numbers::pi * b) / std::numbers::pi;
    const double lhs = StableLaw(b).reciprocal_identity();
    o.expect(std::abs(lhs - d) <= 1e-3, "beta=" + num(b) + " reciprocal identity " + num(lhs, 10) + " vs d_beta " + num(d, 10));
    o.expect(r, "density.ks");
  }
  return o;
}

Outcome spectral_asymptotics() {
  Outcome o;
  ExperimentConfig c;
  c.grid_size = 1 << 14;
  c.refine_check = true;
  auto r = verify_detail::start_report("spectral_asymptotics", c);
  const LabSystem S(c);
  r.system = S.describe();
  eigen_asymptotics_check(S, r);
  keep(r, c, "grid_16384");
  o.expect(r, "spectral.eigen_beta");
  o.expect(r, "spectral.eigen_arg");
  o.expect(r, "spectral.refinement_drift");
  return o;
}

Outcome aperiodicity() {
  Outcome o;
  ExperimentConfig c;
  {
    auto r = verify_detail::start_report("aperiodicity_affine", c);
    const LabSystem S(c);
    r.system = S.describe();
    aperiodicity_check(S, r);
    keep(r, c, "affine");
    o.expect(r, "spectral.aperiodicity");
  }
  // lattice control: the constant roof must violate aperiodicity at b = 2 pi / c
  c.roof = "constant:1";
  c.aper_count = 1;
  auto r = verify_detail::start_report("aperiodicity_constant", c);
  const LabSystem S(c);
  r.system = S.describe();
  aperiodicity_check(S, r);
  keep(r, c, "constant");
  o.expect(r, "spectral.aperiodicity", Verdict::fail);
  double radius = NAN, b = NAN;
  for (const auto& [k, v] : r.system) {
    if (k == "lattice_radius") radius = std::stod(v);
    if (k == "lattice_b") b = std::stod(v);
  }
  o.expect(std::abs(radius - 1) <= 1e-8, "constant roof: radius " + num(radius, 17) + " at b = " + num(b, 10) + " within 1e-8 of 1");
  return o;
}

Outcome resolvent() {
  Outcome o;
  ExperimentConfig c;
  auto r = verify_detail::start_report("resolvent", c);
  const LabSystem S(c);
  r.system = S.describe();
  resolvent_slope_check(S, r);
  keep(r, c, "default");
  o.expect(r, "spectral.resolvent_slope");
  return o;
}

Outcome laplace() {
  Outcome o;
  ExperimentConfig c;
  o.expect_all(keep(cross_validate(c), c, "deterministic"));
  const auto ci = iid_config();
  o.expect_all(keep(cross_validate(ci), ci, "iid"));
  return o;
}

Outcome wre() {
  Outcome o;
  auto ci = iid_config();
  ci.t_end = 1e5;
  ci.N = 1000000;
  const auto ri = keep(run_wre(ci), ci, "iid");
  o.expect(ri, "wre.final_ratio");
  o.expect(ri, "wre.discards");
  ExperimentConfig cd;
  const auto rd = keep(run_wre(cd), cd, "gamma1_4_3");
  o.expect(rd, "wre.final_ratio");
  o.expect(rd, "wre.karamata");
  o.expect(rd, "wre.discards");
  ExperimentConfig cl;
  cl.gamma1 = 2.5;
  const auto rl = keep(run_wre(cl), cl, "gamma1_5_2");
  o.expect(rl, "wre.final_ratio");
  o.expect(rl, "wre.discards");
  return o;
}

Outcome srt() {
  Outcome o;
  auto ci = iid_config();
  ci.N = 10000000;
  const auto ri = keep(run_srt(ci), ci, "iid");
  o.expect(ri, "srt.final_ratio");
  o.expect(ri, "srt.discards");
  ExperimentConfig cd;
  cd.t_end = 3000;
  cd.N = 1000000;
  const auto rd = keep(run_srt(cd), cd, "gamma1_4_3");
  o.expect(rd, "srt.final_ratio");
  o.expect(rd, "srt.trend");
  o.expect(rd, "srt.rectangle_vs_window");
  o.expect(rd, "srt.discards");
  return o;
}

Outcome llt() {
  Outcome o;
  auto ci = iid_config();
  ci.N = 10000000;
  const auto ri = keep(run_llt(ci), ci, "iid");
  o.expect(ri, "llt.final_sup");
  o.expect(ri, "llt.trend");
  ExperimentConfig cd;
  cd.N = 10000000;
  const auto rd = keep(run_llt(cd), cd, "gamma1_4_3");
  o.expect(rd, "llt.final_sup");
  o.expect(rd, "llt.trend");
  return o;
}

Outcome liminf() {
  Outcome o;
  ExperimentConfig c;
  c.gamma1 = 2.5;
  o.expect_all(keep(run_liminf(c), c, "gamma1_5_2"));
  return o;
}

nlohmann::ordered_json comparable(const ExperimentReport& r) {
  auto j = report_to_json(r);
  j.erase("timings");
  j.erase("config");  // differs by the shard count only
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  for (const char* mode : {"deterministic", "iid"}) {
    ExperimentConfig c;
    c.mode = mode;
    c.N = 20000;
    c.t_end = 1600;
    const auto one = run_srt(c);
    auto c8 = c;
    c8.shards = 8;
    const auto eight = run_srt(c8);
    o.expect(comparable(one).dump() == comparable(eight).dump(), std::string(mode) + ": 1-shard and 8-shard estimates identical");

    // two runs of the same config: artifacts byte-identical apart from wall-clock timings
    const auto base = out_root / ("criterion_" + std::to_string(current)) / mode;
    bool same = true;
    std::size_t files = 0;
    std::vector<fs::path> written[2];
    for (int k = 0; k < 2; ++k) {
      auto ck = c;
      ck.output_dir = (base / ("run" + std::to_string(k))).string();
      written[k] = write_artifacts(k == 0 ? one : run_srt(c), ck);
    }
    same = written[0].size() == written[1].size();
    for (std::size_t i = 0; same && i < written[0].size(); ++i, ++files) {
      if (written[0][i].extension() == ".json") {
        auto a = nlohmann::json::parse(slurp(written[0][i])), b = nlohmann::json::parse(slurp(written[1][i]));
        a.erase("timings"), b.erase("timings");
        same = a == b;
      } else {
        same = slurp(written[0][i]) == slurp(written[1][i]);
      }
    }
    o.expect(same, std::string(mode) + ": repeated run, " + std::to_string(files) + " artifacts identical");
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "constants", constants},
      {2, "stable density", density},
      {3, "spectral asymptotics", spectral_asymptotics},
      {4, "aperiodicity", aperiodicity},
      {5, "resolvent magnitude", resolvent},
      {6, "Laplace cross-validation", laplace},
      {7, "weak rational ergodicity", wre},
      {8, "strong renewal theorem", srt},
      {9, "local limit theorem", llt},
      {10, "liminf regime", liminf},
      {11, "determinism and sharding", determinism},
  };
  CLI::App app("rlab acceptance runner");
  std::vector<int> only;
  std::string out = out_root.string();
  app.add_option("-k,--criterion", only, "run only these criteria (1-11)")->check(CLI::Range(1, 11));
  app.add_option("-o,--out", out, "artifact directory");
  CLI11_PARSE(app, argc, argv);
  out_root = out;

  bool all_pass = true;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    current = c.id;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.expect(false, std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& l : o.lines) std::cout << "    " << l << '\n';
    std::cout << "criterion " << std::setw(2) << c.id << "  " << (o.pass ? "PASS" : "FAIL") << "  " << c.name << "  ("
              << std::fixed << std::setprecision(1) << secs << " s)" << std::defaultfloat << '\n'
              << std::flush;
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
