#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rlab/dynamics/induced.hpp"
#include "rlab/errors.hpp"
#include "rlab/renewal/sets.hpp"
#include "rlab/rng.hpp"
#include "rlab/transfer/asymptotics.hpp"
#include "rlab/transfer/spectral.hpp"
#include "rlab/transfer/ulam.hpp"

namespace rlab {

enum class MeasureMethod { ulam, birkhoff };

/// Piecewise-constant invariant density of F on Y, as equal-cell masses.
struct InvariantMeasure {
  double lo = 0, hi = 1;
  std::vector<double> masses;

  double cell_width() const { return (hi - lo) / static_cast<double>(masses.size()); }
  std::vector<double> density() const {
    std::vector<double> d(masses);
    for (auto& x : d) x /= cell_width();
    return d;
  }
  MeasureSampler sampler() const { return MeasureSampler(lo, hi, masses); }
  double measure(double a, double b) const { return sampler().measure(a, b); }
  /// Linear extrapolation of the density to the left end of Y.
  double density_at_lo() const { return (1.5 * masses[0] - 0.5 * masses[1]) / cell_width(); }
};

inline double l1_distance(const InvariantMeasure& a, const InvariantMeasure& b) {
  if (a.masses.size() != b.masses.size()) throw domain_error("l1_distance: grid mismatch");
  double d = 0;
  for (std::size_t i = 0; i < a.masses.size(); ++i) d += std::abs(a.masses[i] - b.masses[i]);
  return d;
}

inline InvariantMeasure invariant_measure_from(const UlamOperator& op) {
  return {op.lo(), op.hi(), stationary_masses(op)};
}

struct BirkhoffOptions {
  std::uint64_t length = 10000000;
  std::uint64_t burn_in = 1000;
  std::uint64_t seed = 0;
};

/// Ulam eigenvector or Birkhoff histogram of a long F-orbit.
inline InvariantMeasure invariant_measure_Y(const InducedSystem& sys, int grid_size, MeasureMethod method,
                                            const UlamOptions& uo = {}, const BirkhoffOptions& bo = {}) {
  if (grid_size < 2) throw domain_error("invariant_measure_Y: grid_size must be >= 2");
  if (method == MeasureMethod::ulam) {
    UlamOptions o = uo;
    o.grid_size = grid_size;
    return invariant_measure_from(build_ulam(sys, sys.lo(), sys.hi(), o));
  }
  InvariantMeasure m{sys.lo(), sys.hi(), std::vector<double>(grid_size, 0.0)};
  CounterRng rng(bo.seed, 0x6269726bULL, 0);
  double y = sys.lo() + (sys.hi() - sys.lo()) * rng.uniform();
  const double dx = m.cell_width();
  std::vector<std::uint64_t> count(grid_size, 0);
  for (std::uint64_t i = 0; i < bo.burn_in + bo.length; ++i) {
    y = sys(y).first;
    if (i >= bo.burn_in) ++count[std::clamp(static_cast<int>((y - m.lo) / dx), 0, grid_size - 1)];
  }
  for (int k = 0; k < grid_size; ++k) m.masses[k] = static_cast<double>(count[k]) / static_cast<double>(bo.length);
  return m;
}

/// Largest y with tau(y) > t near the left end of Y: the excursion time is
/// decreasing in y on the first cylinder, so bisection applies.
inline double tail_edge(const InducedSystem& sys, double t, double width) {
  double lo = sys.lo(), hi = std::min(sys.hi(), sys.lo() + width);
  auto tau = [&](double y) { return sys.first_return(y, ~std::uint64_t{0}).tau; };
  while (hi < sys.hi() && tau(hi) > t) lo = hi, hi = std::min(sys.hi(), sys.lo() + 2 * (hi - sys.lo()));
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (tau(mid) > t ? lo : hi) = mid;
  }
  return lo;
}

/// mu(tau > t) t^beta from the density at the left end of Y and the exact
/// edge of the set {tau > t}, which is a short interval [x_star, y_t).
inline double tail_constant(const InducedSystem& sys, const InvariantMeasure& mu, double t) {
  const double beta = sys.spec().beta_predicted();
  const double w = std::max(4 * mu.cell_width(), 1e-3);
  const double yt = tail_edge(sys, t, w);
  return std::pow(t, beta) * mu.density_at_lo() * (yt - sys.lo());
}

struct TailFit {
  double c0_hat = 0;
  double beta_hat = 0;       // least-squares slope of log survival
  double hill_beta = 0;      // Hill estimator over the same upper tail
  double t_lo = 0, t_hi = 0; // fitted range
  std::vector<double> t_grid, survival, compensated;  // mu(tau > t) and mu(tau > t) t^beta_hat / c0_hat
  std::uint64_t sample_size = 0;
};

/// Monte Carlo tail fit from tau(y), y ~ mu.  The fitted range is the
/// decade(s) between t_lo and t_hi, where at least min_tail samples remain.
inline TailFit tail_fit(const InducedSystem& sys, const InvariantMeasure& mu, std::uint64_t sample_size, std::uint64_t seed,
                        double t_lo = 30.0, std::uint64_t min_tail = 1000) {
  if (sample_size < 10000) throw domain_error("tail_fit: sample_size must be >= 1e4");
  const auto sm = mu.sampler();
  std::vector<double> tau(sample_size);
  for (std::uint64_t i = 0; i < sample_size; ++i) {
    CounterRng rng(seed, 0x7461696cULL, i);
    tau[i] = sys.first_return(sm.sample(rng), ~std::uint64_t{0}).tau;
  }
  std::sort(tau.begin(), tau.end());
  const double n = static_cast<double>(sample_size);
  if (sample_size <= min_tail) throw fit_error("tail_fit: sample too small");
  const double t_hi = tau[sample_size - min_tail];
  if (!(t_hi > 2 * t_lo)) throw fit_error("tail_fit: degenerate sample (no tail above the fitting range)");

  TailFit f;
  f.sample_size = sample_size;
  f.t_lo = t_lo, f.t_hi = t_hi;
  std::vector<double> lx, ly;
  for (double t : log_grid(t_lo, t_hi, 25)) {
    const double s = static_cast<double>(tau.end() - std::upper_bound(tau.begin(), tau.end(), t)) / n;
    f.t_grid.push_back(t), f.survival.push_back(s);
    lx.push_back(std::log(t)), ly.push_back(std::log(s));
  }
  const auto lf = fit_line(lx, ly);
  f.beta_hat = -lf.slope;
  // c0 with the fitted exponent: mean of log(S(t) t^beta) over the range
  double acc = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) acc += ly[i] + f.beta_hat * lx[i];
  f.c0_hat = std::exp(acc / static_cast<double>(lx.size()));
  for (std::size_t i = 0; i < lx.size(); ++i) f.compensated.push_back(f.survival[i] * std::pow(f.t_grid[i], f.beta_hat) / f.c0_hat);
  // Hill over the samples above t_lo
  const auto first = std::upper_bound(tau.begin(), tau.end(), t_lo);
  double h = 0;
  for (auto it = first; it != tau.end(); ++it) h += std::log(*it / t_lo);
  const double k = static_cast<double>(tau.end() - first);
  f.hill_beta = k > 0 ? k / h : 0.0;
  return f;
}

}  // namespace rlab
