#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <cmath>

#include <complex>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/transfer/spectral.hpp"
#include "rlab/transfer/ulam.hpp"

namespace rlab {

struct ResolventResult {
  std::vector<cplx> x;  // cell masses of T^(s) applied to the probe
  double norm_L1 = 0;   // sum |x_k|
  double re_norm_L1 = 0;  // sum |Re x_k|
  double residual = 0;  // relative residual of the solve
  double condition = 0;  // ||x||_1 / ||probe||_1, a cheap growth proxy
  int iterations = 0;
};

struct ResolventOptions {
  double tol = 1e-12;
  int max_iter = 5000;
  double max_condition = 1e8;
};

namespace detail {

inline double solve_residual(const CsrMatrix& P, const std::vector<cplx>& x, const std::vector<double>& nu) {
  std::vector<cplx> xp;
  P.left_multiply(x, xp);
  double r = 0, nn = 0;
  for (std::size_t i = 0; i < x.size(); ++i) r += std::abs(x[i] - xp[i] - nu[i]), nn += std::abs(nu[i]);
  return r / nn;
}

// x = nu (I - P)^{-1} by splitting off the leading eigenpair (lambda, v, u):
// nu = alpha v + r with r in the complementary invariant subspace, so
// x = alpha v / (1 - lambda) + sum_n r P^n, and the series contracts at |lambda_2|.
inline std::vector<cplx> deflated_neumann(const CsrMatrix& P, const std::vector<double>& nu, int max_iter, double tol,
                                          int* iterations) {
  const int n = P.n;
  std::vector<cplx> v;
  PowerOptions po;
  po.tol = 1e-13;
  po.gap_iter = 0;
  const auto pr = power_iteration(P, v, po);
  const auto u = right_eigenvector(P, pr.lambda);
  const cplx vu = dot(v, u);
  std::vector<cplx> r(nu.begin(), nu.end());
  const cplx alpha = dot(r, u) / vu;
  std::vector<cplx> x(n), nxt;
  for (int i = 0; i < n; ++i) {
    r[i] -= alpha * v[i];
    x[i] = alpha * v[i] / (1.0 - pr.lambda) + r[i];
  }
  double nn = 0;
  for (double z : nu) nn += std::abs(z);
  int it = 0;
  for (; it < max_iter; ++it) {
    P.left_multiply(r, nxt);
    // re-project to suppress drift back into the leading direction
    const cplx c = dot(nxt, u) / vu;
    double tn = 0;
    for (int i = 0; i < n; ++i) {
      nxt[i] -= c * v[i];
      x[i] += nxt[i];
      tn += std::abs(nxt[i]);
    }
    r.swap(nxt);
    if (tn < tol * nn) break;
  }
  if (iterations) *iterations = it + pr.iterations;
  return x;
}

inline std::vector<cplx> bicgstab_solve(const CsrMatrix& P, const std::vector<double>& nu, const ResolventOptions& opt,
                                        int* iterations) {
  const int n = P.n;
  using SpMat = Eigen::SparseMatrix<cplx>;
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(P.val.size() + n);
  for (int j = 0; j < n; ++j) {
    trip.emplace_back(j, j, cplx(1.0));
    for (std::size_t e = P.row_ptr[j]; e < P.row_ptr[j + 1]; ++e) trip.emplace_back(P.col[e], j, -P.val[e]);
  }
  SpMat A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXcd rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = nu[i];
  Eigen::BiCGSTAB<SpMat> solver;
  solver.setTolerance(opt.tol);
  solver.setMaxIterations(opt.max_iter);
  solver.compute(A);
  const Eigen::VectorXcd x = solver.solve(rhs);
  if (iterations) *iterations = static_cast<int>(solver.iterations());
  return std::vector<cplx>(x.data(), x.data() + n);
}

}  // namespace detail

/// Solves x (I - P(s)) = nu for the row vector x, where nu holds the cell
/// masses of the probe measure (e.g. mu restricted to A).  In the measure
/// picture x is T^(s) 1_A dmu, so int_B T^(s) 1_A dmu = sum_{k in B} x_k.
inline ResolventResult resolvent_probe(const UlamOperator& op, cplx s, const std::vector<double>& probe,
                                       const ResolventOptions& opt = {}, TwistMode mode = TwistMode::galerkin) {
  const CsrMatrix P = op.twisted(s, mode);
  ResolventResult r;
  r.x = detail::deflated_neumann(P, probe, opt.max_iter, opt.tol, &r.iterations);
  r.residual = detail::solve_residual(P, r.x, probe);
  if (!(r.residual < 1e-8)) {
    r.x = detail::bicgstab_solve(P, probe, opt, &r.iterations);
    r.residual = detail::solve_residual(P, r.x, probe);
    if (!(r.residual < 1e-8)) throw resolvent_error("resolvent solve failed to converge", r.residual);
  }
  double pn = 0;
  for (double v : probe) pn += std::abs(v);
  for (auto z : r.x) r.norm_L1 += std::abs(z), r.re_norm_L1 += std::abs(z.real());
  r.condition = r.norm_L1 / pn;
  if (r.condition > opt.max_condition) throw resolvent_error("resolvent nearly singular", r.condition);
  return r;
}

/// Cell masses of mu restricted to [a, b] (fractional end cells).
inline std::vector<double> restrict_masses(const UlamOperator& op, const std::vector<double>& masses, double a, double b) {
  std::vector<double> out(masses.size(), 0.0);
  for (int j = 0; j < op.size(); ++j) {
    const double c0 = op.lo() + j * op.cell_width(), c1 = c0 + op.cell_width();
    const double ov = std::max(0.0, std::min(b, c1) - std::max(a, c0));
    out[j] = masses[j] * ov / op.cell_width();
  }
  return out;
}

/// int_B T^(s) 1_A dmu.
inline cplx laplace_resolvent(const UlamOperator& op, const std::vector<double>& masses, double s, double a_lo,
                              double a_hi, double b_lo, double b_hi, const ResolventOptions& opt = {}) {
  const auto r = resolvent_probe(op, cplx(s, 0), restrict_masses(op, masses, a_lo, a_hi), opt);
  const auto w = restrict_masses(op, std::vector<double>(masses.size(), 1.0), b_lo, b_hi);  // fractional indicator
  cplx acc = 0;
  for (int k = 0; k < op.size(); ++k) acc += r.x[k] * w[k];
  return acc;
}

}  // namespace rlab
