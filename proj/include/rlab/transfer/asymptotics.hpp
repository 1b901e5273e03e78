#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/specfun/constants.hpp"
#include "rlab/specfun/tail.hpp"
#include "rlab/transfer/spectral.hpp"

namespace rlab {

/// Ordinary least squares y = a + s x; returns {slope, intercept, rms residual}.
struct LineFit {
  double slope = 0, intercept = 0, rms = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) throw fit_error("fit_line: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
  if (sxx == 0) throw fit_error("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double r = 0;
  for (std::size_t i = 0; i < n; ++i) r += std::pow(y[i] - f.intercept - f.slope * x[i], 2);
  f.rms = std::sqrt(r / n);
  return f;
}

/// Two-term small-frequency model 1 - lambda(b) = C b^beta + i D b (C complex,
/// D real).  The linear term is the drift from the integrable part of the
/// roof; without it a log-log slope over a finite window is biased by
/// O(b^{1-beta}).  beta is scanned, C and D solved by weighted least squares.
struct TwoTermFit {
  double beta = 0;
  cplx C = 0;
  double D = 0;
  double rel_rms = 0;
};

inline TwoTermFit fit_two_term(const std::vector<double>& b, const std::vector<cplx>& one_minus, double beta_lo = 0.3,
                               double beta_hi = 1.0, int steps = 2801) {
  const int n = static_cast<int>(b.size());
  if (n < 3) throw fit_error("fit_two_term: need at least three frequencies");
  TwoTermFit best;
  double best_r = 1e300;
  for (int s = 0; s < steps; ++s) {
    const double bt = beta_lo + (beta_hi - beta_lo) * s / (steps - 1);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 3);
    Eigen::VectorXd y(2 * n);
    for (int i = 0; i < n; ++i) {
      const double w = 1.0 / std::abs(one_minus[i]), p = std::pow(b[i], bt);
      A(i, 0) = p * w;
      y[i] = one_minus[i].real() * w;
      A(n + i, 1) = p * w;
      A(n + i, 2) = b[i] * w;
      y[n + i] = one_minus[i].imag() * w;
    }
    const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(y);
    const double r = (A * sol - y).squaredNorm();
    if (r < best_r) {
      best_r = r;
      best.beta = bt;
      best.C = cplx(sol[0], sol[1]);
      best.D = sol[2];
    }
  }
  best.rel_rms = std::sqrt(best_r / (2 * n));
  return best;
}

struct EigenAsymptotics {
  std::vector<double> b;
  std::vector<SpectralProbe> probes;
  std::vector<cplx> one_minus;
  // naive log-log fit of |1 - lambda|
  double beta_fit = 0;
  cplx c_beta_fit = 0;  // mean of (1 - lambda)/(ell(1/b) b^beta_fit)
  double rms = 0;
  // two-term model
  TwoTermFit two_term;
  cplx c_beta_two_term = 0;  // C / c0
  cplx c_beta_theory = 0;
  bool poor_fit = false;
  std::string warning;
};

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, n > 1 ? static_cast<double>(i) / (n - 1) : 0.0);
  return g;
}

inline EigenAsymptotics eigen_asymptotics_fit(const UlamOperator& op, const std::vector<double>& b_grid, const TailModel& tail,
                                              const PowerOptions& opt = {}) {
  EigenAsymptotics r;
  r.b = b_grid;
  std::vector<cplx> warm;
  std::vector<double> lx, ly;
  for (double b : b_grid) {
    const auto pr = leading_eigenvalue(op, b, &warm, opt);
    r.probes.push_back(pr);
    r.one_minus.push_back(1.0 - pr.lambda);
    lx.push_back(std::log(b));
    ly.push_back(std::log(std::abs(1.0 - pr.lambda)));
  }
  const auto f = fit_line(lx, ly);
  r.beta_fit = f.slope;
  r.rms = f.rms;
  cplx acc = 0;
  for (std::size_t i = 0; i < b_grid.size(); ++i)
    acc += r.one_minus[i] / (tail.ell(1.0 / b_grid[i]) * std::pow(b_grid[i], r.beta_fit));
  r.c_beta_fit = acc / static_cast<double>(b_grid.size());
  r.two_term = fit_two_term(b_grid, r.one_minus);
  r.c_beta_two_term = r.two_term.C / tail.c0;
  if (tail.beta < 1.0) r.c_beta_theory = c_beta_closed_form(tail.beta);
  if (f.rms > 0.05) {
    r.poor_fit = true;
    r.warning = "log|1-lambda| is not close to a power law on this grid";
  }
  return r;
}

struct AperiodicityScan {
  std::vector<double> b;
  std::vector<double> radius;
  double sup = 0;
  double argsup = 0;
  double margin = 1e-3;
  bool pass = false;
};

inline AperiodicityScan aperiodicity_scan(const UlamOperator& op, const std::vector<double>& b_grid, double margin = 1e-3,
                                          int iters = 64, int seeds = 4, TwistMode mode = TwistMode::galerkin) {
  AperiodicityScan s;
  s.margin = margin;
  for (double b : b_grid) {
    if (b == 0) throw domain_error("aperiodicity_scan: b grid must avoid 0");
    const double r = spectral_radius(op.twisted(cplx(0, b), mode), iters, seeds);
    s.b.push_back(b);
    s.radius.push_back(r);
    if (r > s.sup) s.sup = r, s.argsup = b;
  }
  s.pass = s.sup <= 1 - margin;
  return s;
}

}  // namespace rlab
