#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "rlab/dynamics/periodic.hpp"
#include "rlab/specfun/constants.hpp"
#include "rlab/specfun/stable.hpp"
#include "rlab/transfer/asymptotics.hpp"
#include "rlab/transfer/resolvent.hpp"
#include "rlab/verify/report.hpp"
#include "rlab/verify/system.hpp"

namespace rlab {

namespace verify_detail {

using clock = std::chrono::steady_clock;

inline double seconds_since(clock::time_point t0) { return std::chrono::duration<double>(clock::now() - t0).count(); }

inline double tol_or(const ExperimentConfig& c, double dflt) { return std::isnan(c.ratio_tol) ? dflt : c.ratio_tol; }

/// t_end / factor^k, k = K..0, with every point >= t_start.
inline std::vector<double> geometric_ladder(double t_start, double t_end, double factor) {
  std::vector<double> t;
  for (double x = t_end; x >= t_start * (1 - 1e-12); x /= factor) t.push_back(x);
  std::reverse(t.begin(), t.end());
  return t;
}

inline ExperimentReport start_report(const std::string& id, const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.experiment_id = id;
  r.config = config_entries(cfg);
  r.seed = cfg.seed;
  return r;
}

inline Table& estimate_table(ExperimentReport& rep, const std::string& name, const std::vector<RenewalEstimate>& est) {
  auto& t = rep.table(name, {"t", "h", "raw_mean", "stderr", "normalized", "target", "ratio", "n_samples", "discards"});
  for (const auto& e : est)
    t.rows.push_back({e.t, e.h, e.raw_mean, e.stderr, e.normalized, e.target, e.ratio, static_cast<double>(e.n_samples),
                      static_cast<double>(e.discards)});
  return t;
}

inline double ratio_stderr(const RenewalEstimate& e) { return e.raw_mean != 0 ? e.stderr / e.raw_mean * e.ratio : 0.0; }

/// Truncated excursions are dropped; the bias they can cause is bounded by
/// their fraction, which must stay below 1e-4.
inline Check discard_check(const std::string& name, const PassStats& st) {
  const double total = static_cast<double>(st.samples + st.discards);
  const double frac = total > 0 ? static_cast<double>(st.discards) / total : 0.0;
  Check c;
  c.criterion = name;
  c.value = frac, c.lo = 0, c.hi = 1e-4;
  c.tolerance = "discarded fraction < 1e-4";
  c.verdict = frac < 1e-4 ? Verdict::pass : Verdict::inconclusive;
  return c;
}

inline Check inconclusive(const std::string& name, const std::string& note) {
  Check c;
  c.criterion = name;
  c.verdict = Verdict::inconclusive;
  c.tolerance = "time_budget";
  c.note = note;
  return c;
}

/// Keeps the longest prefix of the ladder that a pilot pass predicts to fit
/// in the time budget.  Cost is modeled as N * t^beta (induced steps per orbit).
template <class Pilot>
std::vector<double> fit_budget(const ExperimentConfig& cfg, double beta, std::vector<double> ladder, Pilot pilot,
                               ExperimentReport& rep, const std::string& name) {
  if (cfg.time_budget <= 0 || ladder.empty()) return ladder;
  const std::uint64_t np = std::max<std::uint64_t>(200, cfg.N / 100);
  const auto t0 = clock::now();
  pilot(np, ladder);
  const double per = seconds_since(t0) / static_cast<double>(np) * static_cast<double>(cfg.N);
  const double tmax = ladder.back();
  const std::size_t full = ladder.size();
  while (!ladder.empty() && per * std::pow(ladder.back() / tmax, beta) > cfg.time_budget) ladder.pop_back();
  if (ladder.size() < full) {
    rep.checks.push_back(inconclusive(name + ".budget", "ladder truncated to " + std::to_string(ladder.size()) + " of " +
                                                            std::to_string(full) + " points by time_budget"));
  }
  return ladder;
}

}  // namespace verify_detail

// ---------------------------------------------------------------------------
// Strong renewal theorem.

inline ExperimentReport run_srt(const ExperimentConfig& cfg) {
  using namespace verify_detail;
  const double beta = cfg.derived_beta();
  if (!(beta > 0.5 && beta <= 1.0))
    throw domain_error("srt: the strong renewal theorem is stated for beta in (1/2, 1]; beta = " + std::to_string(beta) +
                       " is outside it (use liminf or wre)");
  const auto t_all = clock::now();
  auto rep = start_report("srt", cfg);
  const LabSystem S(cfg, false);
  rep.system = S.describe();
  rep.timings.emplace_back("build", S.build_seconds());

  auto ladder = geometric_ladder(cfg.t_start, cfg.t_end, cfg.t_factor);
  auto windows_of = [&](const std::vector<double>& t) {
    std::vector<Window> w;
    for (double x : t) w.push_back({x, cfg.h});
    return w;
  };
  ladder = fit_budget(cfg, beta, ladder,
                      [&](std::uint64_t np, const std::vector<double>& t) {
                        S.with_driver([&](const auto& d) { return estimate_renewal_windows(d, S.context(np, 0), windows_of(t)); });
                      },
                      rep, "srt");
  if (ladder.empty()) return rep;

  PassStats st;
  auto t0 = clock::now();
  const auto est = S.with_driver([&](const auto& d) { return estimate_renewal_windows(d, S.context(cfg.N, 0), windows_of(ladder), &st); });
  rep.timings.emplace_back("windows", seconds_since(t0));
  estimate_table(rep, "srt_windows", est);

  const double tol = tol_or(cfg, S.iid() ? 0.05 : 0.2);
  const auto& last = est.back();
  rep.checks.push_back(band_check("srt.final_ratio", last.ratio, 1 - tol, 1 + tol,
                                  "m(t)(U(t+h)-U(t))/(d_beta mu(A)mu(B)h) in [" + std::to_string(1 - tol) + ", " +
                                      std::to_string(1 + tol) + "] at t=" + config_detail::fmt(last.t)));
  std::vector<double> dist;
  for (const auto& e : est) dist.push_back(std::abs(e.ratio - 1));
  rep.checks.push_back(trend_check("srt.trend", dist));
  rep.checks.push_back(discard_check("srt.discards", st));

  if (!S.iid()) {
    // rectangle mixing at the last ladder point, sampled u versus exact u-average
    t0 = clock::now();
    const double t = ladder.back();
    PassStats s1, s2;
    const auto rect = S.with_driver([&](const auto& d) { return estimate_rectangle_mixing(d, S.context(cfg.n_check(), 1), {t}, false, &s1); });
    const auto wform = S.with_driver([&](const auto& d) { return estimate_rectangle_mixing(d, S.context(cfg.n_check(), 2), {t}, true, &s2); });
    rep.timings.emplace_back("rectangle", seconds_since(t0));
    estimate_table(rep, "srt_rectangle", {rect[0], wform[0]});
    const double diff = std::abs(rect[0].ratio - wform[0].ratio);
    const double se = std::hypot(ratio_stderr(rect[0]), ratio_stderr(wform[0]));
    auto c = band_check("srt.rectangle_vs_window", diff, 0, 2 * se, "|rectangle - window form| <= 2 combined stderr");
    c.note = "rectangle ratio " + std::to_string(rect[0].ratio) + ", window form " + std::to_string(wform[0].ratio);
    rep.checks.push_back(c);
    rep.checks.push_back(discard_check("srt.rectangle_discards", s1));
  }
  rep.timings.emplace_back("total", seconds_since(t_all));
  return rep;
}

// ---------------------------------------------------------------------------
// Weak rational ergodicity, with the Karamata sigma-route.

struct KaramataFit {
  std::vector<double> sigma, laplace;
  double a = 0, d = 0;
  double D_prime_hat = 0, D_prime = 0;
};

/// Fits mu(A)mu(B) / (sigma^beta Lhat(sigma)) = a + d sigma^{1-beta}; the
/// linear term is the drift of the integrable part of tau.  Then
/// D'_beta ~ c0 / a.
inline KaramataFit karamata_fit(const LabSystem& S, const std::vector<double>& sigma) {
  KaramataFit k;
  k.sigma = sigma;
  const double beta = S.beta(), muAB = S.mu_A() * S.mu_B();
  Eigen::MatrixXd M(sigma.size(), 2);
  Eigen::VectorXd y(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const double s = sigma[i];
    double L;
    if (S.iid()) {
      L = 1.0 / (1.0 - S.law().laplace(s));
    } else {
      const auto& sets = S.sets();
      L = laplace_resolvent(S.ulam(), S.measure().masses, s, sets.A.lo, sets.A.hi, sets.B.lo, sets.B.hi).real();
    }
    k.laplace.push_back(L);
    M(i, 0) = 1.0;
    M(i, 1) = std::pow(s, 1 - beta);
    y[i] = muAB / (std::pow(s, beta) * L);
  }
  const Eigen::VectorXd sol = M.colPivHouseholderQr().solve(y);
  k.a = sol[0], k.d = sol[1];
  k.D_prime_hat = S.tail().c0 / k.a;
  k.D_prime = renewal_constants(beta, false).D_beta_prime;
  return k;
}

inline ExperimentReport run_wre(const ExperimentConfig& cfg) {
  using namespace verify_detail;
  const double beta = cfg.derived_beta();
  if (!(beta > 0.0 && beta <= 1.0)) throw domain_error("wre: beta must lie in (0, 1]");
  const auto t_all = clock::now();
  auto rep = start_report("wre", cfg);
  const LabSystem S(cfg, !cfg.iid() && beta < 1.0);
  rep.system = S.describe();
  rep.timings.emplace_back("build", S.build_seconds());

  auto ladder = geometric_ladder(cfg.t_start, cfg.t_end, cfg.t_factor);
  ladder = fit_budget(cfg, beta, ladder,
                      [&](std::uint64_t np, const std::vector<double>& t) {
                        S.with_driver([&](const auto& d) { return estimate_renewal_cumulative(d, S.context(np, 0), t); });
                      },
                      rep, "wre");
  if (ladder.empty()) return rep;
  const double tol = tol_or(cfg, S.iid() ? 0.03 : 0.15);

  PassStats st;
  auto t0 = clock::now();
  const auto cum = S.with_driver([&](const auto& d) { return estimate_renewal_cumulative(d, S.context(cfg.N, 0), ladder, &st); });
  rep.timings.emplace_back("cumulative", seconds_since(t0));
  estimate_table(rep, "wre_cumulative", cum);
  rep.checks.push_back(band_check("wre.final_ratio", cum.back().ratio, 1 - tol, 1 + tol,
                                  "(m(t)/t) U(t) / (D_beta mu(A)mu(B)) in [" + std::to_string(1 - tol) + ", " +
                                      std::to_string(1 + tol) + "] at t=" + config_detail::fmt(cum.back().t)));
  std::vector<double> dist;
  for (const auto& e : cum) dist.push_back(std::abs(e.ratio - 1));
  rep.checks.push_back(trend_check("wre.trend", dist));
  rep.checks.push_back(discard_check("wre.discards", st));

  if (!S.iid()) {
    PassStats so;
    t0 = clock::now();
    const auto occ = S.with_driver([&](const auto& d) { return estimate_occupation_average(d, S.context(cfg.N, 1), ladder, &so); });
    rep.timings.emplace_back("occupation", seconds_since(t0));
    estimate_table(rep, "wre_occupation", occ);
    rep.checks.push_back(band_check("wre.occupation_final_ratio", occ.back().ratio, 1 - tol, 1 + tol,
                                    "(m(t)/t) int_0^t mu^tau(A1 & F_x^-1 B1) dx / (D_beta mu^tau(A1)mu^tau(B1)) in [" +
                                        std::to_string(1 - tol) + ", " + std::to_string(1 + tol) + "]"));
    rep.checks.push_back(discard_check("wre.occupation_discards", so));
  }

  if (beta < 1.0) {
    t0 = clock::now();
    const auto k = karamata_fit(S, log_grid(cfg.karamata_lo, cfg.karamata_hi, 9));
    rep.timings.emplace_back("karamata", seconds_since(t0));
    auto& t = rep.table("wre_karamata", {"sigma", "laplace", "normalized"});
    for (std::size_t i = 0; i < k.sigma.size(); ++i)
      t.rows.push_back({k.sigma[i], k.laplace[i], std::pow(k.sigma[i], beta) * k.laplace[i] * S.tail().c0 / (S.mu_A() * S.mu_B())});
    auto c = band_check("wre.karamata", k.D_prime_hat / k.D_prime, 0.95, 1.05,
                        "D'_beta from the sigma-route within 5% of 1/Gamma(1-beta)");
    c.note = "D'_hat=" + std::to_string(k.D_prime_hat) + " drift coefficient " + std::to_string(k.d);
    rep.checks.push_back(c);
  } else {
    rep.warnings.push_back("Karamata sigma-route skipped at beta = 1 (slowly varying normalization)");
  }
  rep.timings.emplace_back("total", seconds_since(t_all));
  return rep;
}

// ---------------------------------------------------------------------------
// Local limit theorem at fixed n.

inline ExperimentReport run_llt(const ExperimentConfig& cfg) {
  using namespace verify_detail;
  const double beta = cfg.derived_beta();
  if (!(beta > 0.0 && beta < 1.0)) throw domain_error("llt: beta must lie in (0, 1)");
  const auto t_all = clock::now();
  auto rep = start_report("llt", cfg);
  const LabSystem S(cfg, false);
  rep.system = S.describe();
  rep.timings.emplace_back("build", S.build_seconds());
  const StableLaw q(beta);

  std::vector<int> ns = cfg.n_list;
  std::sort(ns.begin(), ns.end());
  std::vector<LltScorer::Block> blocks;
  for (int n : ns) {
    const double dn = llt_scale(S.tail(), n);
    LltScorer::Block b{static_cast<std::uint64_t>(n), {}, cfg.llt_h * dn};
    for (double x : log_grid(cfg.llt_lo, cfg.llt_hi, cfg.llt_points)) b.t.push_back(x * dn);
    b.t.push_back(20 * dn);  // far tail, reported separately
    blocks.push_back(b);
  }
  PassStats st;
  const auto t0 = clock::now();
  const auto rows = S.with_driver([&](const auto& d) { return estimate_llt_windows(d, S.context(cfg.N, 0), q, blocks, &st); });
  rep.timings.emplace_back("windows", seconds_since(t0));

  auto& tr = rep.table("llt_rows", {"n", "t", "x", "h", "d_n", "raw_mean", "stderr", "scaled", "target", "error"});
  auto& ts = rep.table("llt_sup", {"n", "d_n", "sup_error", "sup_error_rel", "argsup_x", "tail_scaled", "tail_target"});
  const double qmax = q.max_q();
  std::vector<double> sups;
  std::size_t i = 0;
  for (const auto& b : blocks) {
    double sup = 0, arg = 0;
    for (std::size_t j = 0; j < b.t.size(); ++j, ++i) {
      const auto& r = rows[i];
      tr.rows.push_back({static_cast<double>(r.n), r.t, r.t / r.d_n, r.h, r.d_n, r.raw_mean, r.stderr, r.scaled, r.target, r.error});
      if (j + 1 < b.t.size() && std::abs(r.error) > sup) sup = std::abs(r.error), arg = r.t / r.d_n;
    }
    const auto& tail = rows[i - 1];
    ts.rows.push_back({static_cast<double>(b.n), tail.d_n, sup, sup / qmax, arg, tail.scaled, tail.target});
    sups.push_back(sup / qmax);
  }
  const double tol = tol_or(cfg, S.iid() ? 0.05 : 0.08);
  rep.checks.push_back(band_check("llt.final_sup", sups.back(), 0, tol,
                                  "sup_t |d_n est/h - q_beta(t/d_n) mu(A)mu(B)| / max q_beta < " + std::to_string(tol) +
                                      " at n=" + std::to_string(ns.back())));
  rep.checks.push_back(trend_check("llt.trend", sups));
  rep.checks.push_back(discard_check("llt.discards", st));
  rep.timings.emplace_back("total", seconds_since(t_all));
  return rep;
}

// ---------------------------------------------------------------------------
// Liminf regime and exceptional sets.

inline ExperimentReport run_liminf(const ExperimentConfig& cfg) {
  using namespace verify_detail;
  const double beta = cfg.derived_beta();
  if (!(beta > 0.0 && beta < 1.0)) throw domain_error("liminf: beta must lie in (0, 1)");
  const auto t_all = clock::now();
  auto rep = start_report("liminf", cfg);
  const LabSystem S(cfg, false);
  rep.system = S.describe();
  rep.timings.emplace_back("build", S.build_seconds());

  const double T = cfg.liminf_t_end;
  const int D = cfg.liminf_decades;
  std::vector<Window> w;
  for (double t = T / std::pow(10.0, D); t <= T * (1 + 1e-12); t *= 1 + cfg.liminf_spacing) w.push_back({t, cfg.h});
  PassStats st;
  auto t0 = clock::now();
  const auto est = S.with_driver([&](const auto& d) { return estimate_renewal_windows(d, S.context(cfg.N, 0), w, &st); });
  rep.timings.emplace_back("windows", seconds_since(t0));
  auto& tw = estimate_table(rep, "liminf_windows", est);
  tw.columns.push_back("tail_infimum");
  double inf = 1e300;
  for (std::size_t k = est.size(); k-- > 0;) {
    inf = std::min(inf, est[k].ratio);
    tw.rows[k].push_back(inf);
  }

  // exceptional sets E_q = {t : ratio > 1 + 1/q}; a point counts when the
  // ratio exceeds the threshold by two standard errors
  const std::vector<int> qs{2, 4, 8};
  auto& te = rep.table("liminf_exceptional", {"decade_start", "decade_end", "q", "density", "density_raw", "points"});
  std::vector<std::vector<double>> dens(qs.size());
  for (int dk = 0; dk < D; ++dk) {
    const double lo = T / std::pow(10.0, D - dk), hi = lo * 10;
    for (std::size_t iq = 0; iq < qs.size(); ++iq) {
      const double thr = 1.0 + 1.0 / qs[iq];
      int pts = 0, sig = 0, raw = 0;
      for (const auto& e : est) {
        if (e.t < lo || e.t >= hi * (1 + 1e-12) || (e.t >= hi && dk + 1 < D)) continue;
        ++pts;
        if (e.ratio > thr) ++raw;
        if (e.ratio - 2 * ratio_stderr(e) > thr) ++sig;
      }
      const double d = pts ? static_cast<double>(sig) / pts : 0.0;
      dens[iq].push_back(d);
      te.rows.push_back({lo, hi, static_cast<double>(qs[iq]), d, pts ? static_cast<double>(raw) / pts : 0.0, static_cast<double>(pts)});
    }
  }

  std::vector<double> last;
  for (const auto& e : est)
    if (e.t >= T / 10 * (1 - 1e-12)) last.push_back(e.ratio);
  std::sort(last.begin(), last.end());
  const double p05 = last[static_cast<std::size_t>(std::floor(0.05 * (last.size() - 1)))];
  const double tol = tol_or(cfg, 0.25);
  rep.checks.push_back(band_check("liminf.p05_final_decade", p05, 1 - tol, 1 + tol,
                                  "5th percentile of window ratios over [T/10, T] in [" + std::to_string(1 - tol) + ", " +
                                      std::to_string(1 + tol) + "]"));
  for (std::size_t iq = 0; iq < qs.size(); ++iq) {
    Check c;
    c.criterion = "liminf.exceptional_density_q" + std::to_string(qs[iq]);
    c.tolerance = "density of E_q non-increasing across decades";
    bool ok = true;
    for (std::size_t k = 1; k < dens[iq].size(); ++k) ok = ok && dens[iq][k] <= dens[iq][k - 1];
    c.value = dens[iq].back();
    c.lo = 0, c.hi = dens[iq].front();
    c.verdict = ok ? Verdict::pass : Verdict::fail;
    std::string s;
    for (double d : dens[iq]) s += std::to_string(d) + " ";
    c.note = "densities by decade: " + s;
    rep.checks.push_back(c);
  }
  if (beta > 0.5) {
    double worst = 0;
    for (const auto& d : dens) worst = std::max(worst, d.back());
    rep.checks.push_back(band_check("liminf.control_final_density", worst, 0, 0.05,
                                    "beta > 1/2: exceptional-set densities in the final decade <= 0.05"));
  }

  // Cesaro check on the same time range
  PassStats sc;
  t0 = clock::now();
  const auto cum = S.with_driver([&](const auto& d) {
    return estimate_renewal_cumulative(d, S.context(cfg.N, 1), geometric_ladder(T / std::pow(10.0, D), T, 10.0), &sc);
  });
  rep.timings.emplace_back("cesaro", seconds_since(t0));
  estimate_table(rep, "liminf_cesaro", cum);
  const double ctol = S.iid() ? 0.03 : 0.15;
  rep.checks.push_back(band_check("liminf.cesaro", cum.back().ratio, 1 - ctol, 1 + ctol,
                                  "Cesaro ratio at T in [" + std::to_string(1 - ctol) + ", " + std::to_string(1 + ctol) + "]"));
  rep.checks.push_back(discard_check("liminf.discards", st));
  rep.timings.emplace_back("total", seconds_since(t_all));
  return rep;
}

// ---------------------------------------------------------------------------
// Spectral checks on the Ulam operator.  Each adds its sub-checks to rep.

inline void spectral_gap_check(const LabSystem& S, ExperimentReport& rep) {
  PowerOptions po;
  po.gap_iter = 200;
  const auto pr = leading_eigenvalue(S.ulam(), 0.0, nullptr, po);
  const double l2 = pr.gap * std::abs(pr.lambda);
  auto& t = rep.table("spectral_gap", {"lambda_re", "lambda_im", "lambda2_modulus"});
  t.rows.push_back({pr.lambda.real(), pr.lambda.imag(), l2});
  rep.checks.push_back(band_check("spectral.gap", l2, 0, 1 - 1e-2, "|lambda_2| <= 1 - 1e-2 at b = 0"));
}

inline void aperiodicity_check(const LabSystem& S, ExperimentReport& rep) {
  const auto& cfg = S.config();
  std::vector<double> b;
  for (int i = 0; i < cfg.aper_count; ++i)
    b.push_back(cfg.aper_count == 1 ? cfg.aper_lo : cfg.aper_lo + (cfg.aper_hi - cfg.aper_lo) * i / (cfg.aper_count - 1));
  const auto& roof = S.induced().roof();
  double lattice_b = 0;
  if (roof.kind == RoofSpec::Kind::constant) {
    // the lattice frequency of the induced roof c*sigma
    lattice_b = 2 * std::numbers::pi / roof.a0;
    b.push_back(lattice_b);
    std::sort(b.begin(), b.end());
  }
  const auto scan = aperiodicity_scan(S.ulam(), b);
  auto& t = rep.table("aperiodicity", {"b", "spectral_radius"});
  for (std::size_t i = 0; i < scan.b.size(); ++i) t.rows.push_back({scan.b[i], scan.radius[i]});
  auto c = band_check("spectral.aperiodicity", scan.sup, 0, 1 - 1e-3, "sup spectral radius over the b grid <= 1 - 1e-3");
  c.note = "sup at b=" + std::to_string(scan.argsup);
  if (lattice_b > 0) {
    const auto it = std::find(scan.b.begin(), scan.b.end(), lattice_b);
    const double r = scan.radius[it - scan.b.begin()];
    std::ostringstream os;
    os << "; constant roof: |1 - radius| at 2pi/c = " << std::abs(1 - r) << " (lattice control)";
    c.note += os.str();
    rep.system.emplace_back("lattice_radius", config_detail::fmt(r));
    rep.system.emplace_back("lattice_b", config_detail::fmt(lattice_b));
  }
  rep.checks.push_back(c);
}

inline void eigen_asymptotics_check(const LabSystem& S, ExperimentReport& rep) {
  const auto& cfg = S.config();
  const auto grid = log_grid(cfg.b_lo, cfg.b_hi, cfg.b_count);
  const auto fit = eigen_asymptotics_fit(S.ulam(), grid, S.tail());
  const double beta = S.beta(), arg0 = std::numbers::pi * beta / 2;
  auto& t = rep.table("eigen_asymptotics", {"b", "one_minus_lambda_re", "one_minus_lambda_im", "gap", "residual"});
  for (std::size_t i = 0; i < grid.size(); ++i)
    t.rows.push_back({grid[i], fit.one_minus[i].real(), fit.one_minus[i].imag(), fit.probes[i].gap, fit.probes[i].residual});
  auto& f = rep.table("eigen_fit", {"naive_slope", "naive_arg", "two_term_beta", "two_term_arg", "two_term_abs_C", "drift_D", "rel_rms"});
  f.rows.push_back({fit.beta_fit, std::arg(fit.c_beta_fit), fit.two_term.beta, std::arg(fit.two_term.C), std::abs(fit.two_term.C),
                    fit.two_term.D, fit.two_term.rel_rms});
  auto cb = band_check("spectral.eigen_beta", fit.two_term.beta, beta - 0.03, beta + 0.03,
                       "exponent of 1 - lambda(b) = C b^beta + i D b within 0.03 of beta");
  cb.note = "naive log-log slope " + std::to_string(fit.beta_fit);
  rep.checks.push_back(cb);
  auto ca = band_check("spectral.eigen_arg", std::arg(fit.two_term.C), arg0 - 0.05, arg0 + 0.05, "arg C within 0.05 of pi beta/2");
  ca.note = "naive arg " + std::to_string(std::arg(fit.c_beta_fit));
  rep.checks.push_back(ca);
  if (fit.poor_fit) rep.warnings.push_back(fit.warning);
  rep.system.emplace_back("eigen_beta", config_detail::fmt(fit.two_term.beta));

  if (cfg.refine_check) {
    auto c2 = cfg;
    c2.grid_size = cfg.grid_size / 2;
    const LabSystem half(c2);
    std::vector<cplx> warm;
    double drift = 0;
    auto& d = rep.table("refinement_drift", {"b", "lambda_fine_re", "lambda_fine_im", "lambda_coarse_re", "lambda_coarse_im"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto pr = leading_eigenvalue(half.ulam(), grid[i], &warm, PowerOptions{5000, 1e-10, 0});
      const cplx fine = 1.0 - fit.one_minus[i];
      drift = std::max(drift, std::abs(fine - pr.lambda));
      d.rows.push_back({grid[i], fine.real(), fine.imag(), pr.lambda.real(), pr.lambda.imag()});
    }
    rep.checks.push_back(band_check("spectral.refinement_drift", drift, 0, 1e-3,
                                    "max_b |lambda_N(b) - lambda_N/2(b)| < 1e-3"));
  }
}

inline void resolvent_slope_check(const LabSystem& S, ExperimentReport& rep) {
  const auto& cfg = S.config();
  const auto grid = log_grid(cfg.res_b_lo, cfg.res_b_hi, cfg.res_b_count);
  const auto& sets = S.sets();
  const auto probe = restrict_masses(S.ulam(), S.measure().masses, sets.A.lo, sets.A.hi);
  auto& t = rep.table("resolvent", {"b", "re_norm_L1", "norm_L1", "residual"});
  std::vector<double> lx, ly;
  try {
    for (double b : grid) {
      const auto r = resolvent_probe(S.ulam(), cplx(0, b), probe);
      t.rows.push_back({b, r.re_norm_L1, r.norm_L1, r.residual});
      lx.push_back(std::log(b));
      ly.push_back(std::log(r.re_norm_L1));
    }
  } catch (const resolvent_error& e) {
    Check c;
    c.criterion = "spectral.resolvent_slope";
    c.verdict = Verdict::fail;
    c.note = e.what();
    rep.checks.push_back(c);
    return;
  }
  const double slope = fit_line(lx, ly).slope;
  rep.checks.push_back(band_check("spectral.resolvent_slope", slope, -S.beta() - 0.05, -S.beta() + 0.05,
                                  "log-log slope of ||Re T(ib) 1_A||_1 within 0.05 of -beta"));
  rep.system.emplace_back("resolvent_beta", config_detail::fmt(-slope));
}

inline void periodic_diagnostics(const LabSystem& S, ExperimentReport& rep) {
  const auto per = periodic_orbit_periods(S.induced(), 3, 3);
  auto& t = rep.table("periodic_ratios", {"i", "j", "period_i", "period_j", "ratio", "p", "q", "distance"});
  double worst = 0;
  for (const auto& r : per.ratios) {
    t.rows.push_back({static_cast<double>(r.i), static_cast<double>(r.j), per.orbits[r.i].period, per.orbits[r.j].period, r.ratio,
                      static_cast<double>(r.p), static_cast<double>(r.q), r.distance});
    worst = std::max(worst, r.distance);
  }
  rep.system.emplace_back("periodic_max_rational_distance", config_detail::fmt(worst));
}

inline void beta_agreement_check(const LabSystem& S, ExperimentReport& rep) {
  const auto tf = tail_fit(S.induced(), S.measure(), std::max<std::uint64_t>(S.config().N, 1000000), S.config().seed);
  auto& t = rep.table("tail_fit", {"t", "survival", "compensated"});
  for (std::size_t i = 0; i < tf.t_grid.size(); ++i) t.rows.push_back({tf.t_grid[i], tf.survival[i], tf.compensated[i]});
  rep.system.emplace_back("tail_fit_beta", config_detail::fmt(tf.beta_hat));
  rep.system.emplace_back("tail_fit_c0", config_detail::fmt(tf.c0_hat));
  std::vector<double> b{tf.beta_hat};
  for (const auto& [k, v] : rep.system)
    if (k == "eigen_beta" || k == "resolvent_beta") b.push_back(std::stod(v));
  double spread = 0;
  for (double x : b)
    for (double y : b) spread = std::max(spread, std::abs(x - y));
  auto c = band_check("spectral.beta_agreement", spread, 0, 0.05, "tail-fit, eigenvalue and resolvent exponents pairwise within 0.05");
  c.note = std::to_string(b.size()) + " estimates";
  rep.checks.push_back(c);
}

inline ExperimentReport run_spectral(const ExperimentConfig& cfg) {
  using namespace verify_detail;
  if (cfg.iid()) throw domain_error("spectral: needs the deterministic system");
  const auto t_all = clock::now();
  auto rep = start_report("spectral", cfg);
  const LabSystem S(cfg);
  rep.system = S.describe();
  rep.timings.emplace_back("build", S.build_seconds());
  auto timed = [&](const char* name, auto f) {
    const auto t0 = clock::now();
    f();
    rep.timings.emplace_back(name, seconds_since(t0));
  };
  timed("gap", [&] { spectral_gap_check(S, rep); });
  timed("aperiodicity", [&] { aperiodicity_check(S, rep); });
  timed("eigen", [&] { eigen_asymptotics_check(S, rep); });
  timed("resolvent", [&] { resolvent_slope_check(S, rep); });
  timed("periodic", [&] { periodic_diagnostics(S, rep); });
  timed("tail_fit", [&] { beta_agreement_check(S, rep); });
  rep.timings.emplace_back("total", seconds_since(t_all));
  return rep;
}

// ---------------------------------------------------------------------------
// Laplace transform of U: Monte Carlo against the resolvent (or closed form).

inline ExperimentReport cross_validate(const ExperimentConfig& cfg) {
  using namespace verify_detail;
  const auto t_all = clock::now();
  auto rep = start_report("xval", cfg);
  const LabSystem S(cfg, !cfg.iid());
  rep.system = S.describe();
  rep.timings.emplace_back("build", S.build_seconds());

  std::vector<double> sig = cfg.sigma;
  sig.push_back(2.0);
  PassStats st;
  auto t0 = clock::now();
  const auto mc = S.with_driver([&](const auto& d) { return estimate_laplace(d, S.context(cfg.N, 3), sig, &st); });
  rep.timings.emplace_back("monte_carlo", seconds_since(t0));
  auto& t = rep.table("xval", {"sigma", "monte_carlo", "stderr", "reference", "rel_diff"});
  const auto& sets = S.sets();
  auto reference = [&](double s) {
    if (S.iid()) return 1.0 / (1.0 - S.law().laplace(s));
    return laplace_resolvent(S.ulam(), S.measure().masses, s, sets.A.lo, sets.A.hi, sets.B.lo, sets.B.hi).real();
  };
  t0 = clock::now();
  for (std::size_t i = 0; i < sig.size(); ++i) {
    const double ref = reference(sig[i]);
    const double rel = std::abs(mc[i].value - ref) / std::abs(ref);
    t.rows.push_back({sig[i], mc[i].value, mc[i].stderr, ref, rel});
    const bool large = i + 1 == sig.size();
    const double tol = S.iid() || large ? 0.005 : 0.02;
    std::ostringstream name;
    name << (large ? "xval.large_sigma_" : "xval.sigma_") << sig[i];
    rep.checks.push_back(band_check(name.str(), rel, 0, tol,
                                    std::string(S.iid() ? "Monte Carlo vs closed form" : "Monte Carlo vs resolvent") +
                                        " relative difference < " + std::to_string(tol)));
  }
  rep.checks.push_back(discard_check("xval.discards", st));
  if (!S.iid()) {
    // how far toward sigma -> 0 the resolvent solve stays usable
    double smallest = NAN;
    for (int e = 2; e <= 12; ++e) {
      const double s = std::pow(10.0, -e);
      try {
        reference(s);
        smallest = s;
      } catch (const numerical_error& e) {
        rep.warnings.push_back("resolvent failed at sigma=" + config_detail::fmt(s) + ": " + e.what());
        break;
      }
    }
    rep.system.emplace_back("smallest_resolvent_sigma", config_detail::fmt(smallest));
  }
  rep.timings.emplace_back("reference", seconds_since(t0));
  rep.timings.emplace_back("total", seconds_since(t_all));
  return rep;
}

// ---------------------------------------------------------------------------
// Specfun passthroughs and the i.i.d. baseline.

inline ExperimentReport run_constants(const ExperimentConfig& cfg) {
  auto rep = verify_detail::start_report("constants", cfg);
  const double beta = cfg.derived_beta();
  const auto rc = renewal_constants(beta, false);
  using config_detail::fmt;
  rep.system = {{"beta", fmt(beta)}, {"d_beta", fmt(rc.d_beta)}, {"D_beta", fmt(rc.D_beta)}, {"D_beta_prime", fmt(rc.D_beta_prime)}};
  auto& t = rep.table("constants", {"beta", "d_beta", "D_beta", "D_beta_prime", "c_beta_re", "c_beta_im", "c_beta_abs", "c_beta_arg"});
  if (rc.c_beta) {
    const cplx c = *rc.c_beta, qd = c_beta_quadrature(beta);
    t.rows.push_back({beta, rc.d_beta, rc.D_beta, rc.D_beta_prime, c.real(), c.imag(), std::abs(c), std::arg(c)});
    rep.system.emplace_back("c_beta", fmt(c.real()) + (c.imag() < 0 ? "" : "+") + fmt(c.imag()) + "i");
    rep.checks.push_back(band_check("constants.c_beta_quadrature", std::abs(qd - c) / std::abs(c), 0, 1e-8,
                                    "closed form c_beta vs direct quadrature, relative < 1e-8"));
  } else {
    t.rows.push_back({beta, rc.d_beta, rc.D_beta, rc.D_beta_prime, NAN, NAN, NAN, NAN});
  }
  return rep;
}

/// Kolmogorov-Smirnov distance between n sampler draws and the density table.
inline double stable_ks_distance(const StableLaw& q, std::uint64_t n, std::uint64_t seed) {
  const StableSampler draw(q.beta());
  std::vector<double> x(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    CounterRng rng(seed, 7, i);
    x[i] = draw(rng);
  }
  std::sort(x.begin(), x.end());
  const double total = q.integral();
  double ks = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double F = q.cdf(x[i]) / total;
    ks = std::max({ks, std::abs(F - static_cast<double>(i) / n), std::abs(F - static_cast<double>(i + 1) / n)});
  }
  return ks;
}

inline ExperimentReport run_density(const ExperimentConfig& cfg) {
  auto rep = verify_detail::start_report("density", cfg);
  const double beta = cfg.derived_beta();
  if (!(beta > 0 && beta < 1)) throw domain_error("density: beta must lie in (0, 1)");
  const StableLaw q(beta);
  auto& t = rep.table("stable_density", {"t", "q_beta"});
  for (std::size_t i = 0; i < q.t().size(); ++i) t.rows.push_back({q.t()[i], q.q()[i]});
  const double d = renewal_constants(beta, false).d_beta;
  rep.system = {{"beta", config_detail::fmt(beta)}, {"max_q", config_detail::fmt(q.max_q())}, {"mode", config_detail::fmt(q.mode())}};
  rep.checks.push_back(band_check("density.integral", q.integral(), 1 - 1e-6, 1 + 1e-6, "int q_beta = 1 +- 1e-6"));
  rep.checks.push_back(band_check("density.reciprocal_identity", q.reciprocal_identity() - d, -1e-3, 1e-3,
                                  "int x^{-1/beta} q_beta(x^{-1/beta}) dx = d_beta +- 1e-3"));
  rep.checks.push_back(band_check("density.ks", stable_ks_distance(q, cfg.N, cfg.seed), 0, 0.005,
                                  "KS distance between sampler draws and the table < 0.005"));
  return rep;
}

inline ExperimentReport run_iid_baseline(ExperimentConfig cfg) {
  using namespace verify_detail;
  cfg.mode = "iid";
  const auto t_all = clock::now();
  auto rep = start_report("iid", cfg);
  const LabSystem S(cfg, false);
  rep.system = S.describe();
  const auto ladder = geometric_ladder(cfg.t_start, cfg.t_end, cfg.t_factor);
  std::vector<Window> w;
  for (double x : ladder) w.push_back({x, cfg.h});
  PassStats st;
  const auto win = S.with_driver([&](const auto& d) { return estimate_renewal_windows(d, S.context(cfg.N, 0), w, &st); });
  const auto cum = S.with_driver([&](const auto& d) { return estimate_renewal_cumulative(d, S.context(cfg.N, 1), ladder); });
  estimate_table(rep, "iid_windows", win);
  estimate_table(rep, "iid_cumulative", cum);
  if (S.beta() > 0.5) {
    const double tol = tol_or(cfg, 0.05);
    rep.checks.push_back(band_check("iid.window_final_ratio", win.back().ratio, 1 - tol, 1 + tol, "Erickson window ratio"));
  }
  rep.checks.push_back(band_check("iid.cumulative_final_ratio", cum.back().ratio, 0.97, 1.03, "cumulative ratio in [0.97, 1.03]"));
  const auto lap = S.with_driver([&](const auto& d) { return estimate_laplace(d, S.context(cfg.N, 3), cfg.sigma); });
  auto& t = rep.table("iid_laplace", {"sigma", "monte_carlo", "stderr", "closed_form", "rel_diff"});
  double worst = 0;
  for (const auto& e : lap) {
    const double ref = 1.0 / (1.0 - S.law().laplace(e.sigma));
    worst = std::max(worst, std::abs(e.value - ref) / ref);
    t.rows.push_back({e.sigma, e.value, e.stderr, ref, std::abs(e.value - ref) / ref});
  }
  rep.checks.push_back(band_check("iid.laplace", worst, 0, 0.005, "Monte Carlo Laplace vs 1/(1 - E e^{-sigma tau}) < 0.5%"));
  rep.checks.push_back(discard_check("iid.discards", st));
  rep.timings.emplace_back("total", seconds_since(t_all));
  return rep;
}

}  // namespace rlab
