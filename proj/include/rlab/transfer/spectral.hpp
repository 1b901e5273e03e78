#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/rng.hpp"
#include "rlab/transfer/ulam.hpp"

namespace rlab {

struct SpectralProbe {
  double b = 0;      // frequency (twist e^{-i b tau}), or
  double sigma = 0;  // real Laplace parameter (twist e^{-sigma tau})
  cplx lambda = 0;
  double gap = 0;    // |lambda_2| / |lambda|
  double residual = 0;
  double spectral_radius = 0;
  int iterations = 0;
};

struct PowerOptions {
  int max_iter = 5000;
  double tol = 1e-10;
  int gap_iter = 60;
};

namespace detail {

inline double norm1(const std::vector<cplx>& v) {
  double s = 0;
  for (auto z : v) s += std::abs(z);
  return s;
}

inline cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline cplx hdot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(b[i]) * a[i];
  return s;
}

}  // namespace detail

/// Leading eigenpair of a row-vector operator v -> vP by power iteration with
/// Rayleigh-quotient eigenvalue estimates.  `start` may carry a warm start.
inline SpectralProbe power_iteration(const CsrMatrix& P, std::vector<cplx>& v, const PowerOptions& opt = {}) {
  const int n = P.n;
  if (v.size() != static_cast<std::size_t>(n)) v.assign(n, cplx(1.0 / n));
  std::vector<cplx> w;
  SpectralProbe pr;
  double nv = detail::norm1(v);
  for (auto& z : v) z /= nv;
  for (int it = 1; it <= opt.max_iter; ++it) {
    P.left_multiply(v, w);
    const cplx lam = detail::hdot(w, v) / detail::hdot(v, v);
    double res = 0;
    for (int i = 0; i < n; ++i) res += std::abs(w[i] - lam * v[i]);
    pr.lambda = lam;
    pr.residual = res;  // v has unit l1 norm
    pr.iterations = it;
    const double nw = detail::norm1(w);
    if (nw == 0) throw spectral_error("power iteration collapsed to zero", 0.0);
    // keep the phase fixed so that warm starts along a b-grid stay continuous
    const cplx ph = lam == cplx(0) ? cplx(1) : lam / std::abs(lam);
    for (int i = 0; i < n; ++i) v[i] = w[i] / (nw * ph);
    if (res < opt.tol) return pr;
  }
  throw spectral_error("power iteration did not converge", pr.residual);
}

/// Right eigenvector (column) for the same eigenvalue, by power iteration on P u.
inline std::vector<cplx> right_eigenvector(const CsrMatrix& P, cplx lam, int iters = 400) {
  std::vector<cplx> u(P.n, cplx(1.0)), w;
  for (int it = 0; it < iters; ++it) {
    P.right_multiply(u, w);
    const double nw = detail::norm1(w) / P.n;
    double diff = 0;
    for (int i = 0; i < P.n; ++i) {
      const cplx nu = w[i] / (nw * (lam / std::abs(lam)));
      diff += std::abs(nu - u[i]);
      u[i] = nu;
    }
    if (diff < 1e-13 * P.n) break;
  }
  return u;
}

/// |lambda_2|: power iteration on the complement of the leading eigenpair
/// (oblique projection w -> w - (w.u)/(v.u) v).
inline double subdominant_modulus(const CsrMatrix& P, const std::vector<cplx>& v, cplx lam, int iters,
                                  std::uint64_t seed = 1) {
  const auto u = right_eigenvector(P, lam);
  const cplx vu = detail::dot(v, u);
  std::vector<cplx> w(P.n), z;
  CounterRng rng(seed, 99, 0);
  for (auto& x : w) x = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
  auto project = [&](std::vector<cplx>& x) {
    const cplx c = detail::dot(x, u) / vu;
    for (int i = 0; i < P.n; ++i) x[i] -= c * v[i];
  };
  project(w);
  double rate = 0, logsum = 0;
  int counted = 0;
  for (int it = 0; it < iters; ++it) {
    const double nw = detail::norm1(w);
    if (nw == 0) return 0.0;
    for (auto& x : w) x /= nw;
    P.left_multiply(w, z);
    project(z);
    const double r = detail::norm1(z);
    if (it >= iters / 2) logsum += std::log(r), ++counted;
    w.swap(z);
    rate = r;
  }
  return counted ? std::exp(logsum / counted) : rate;
}

/// Lower-biased spectral radius estimate: growth rate over `iters` steps from
/// random complex vectors, maximized over `seeds` starts.
inline double spectral_radius(const CsrMatrix& P, int iters = 64, int seeds = 4, std::uint64_t seed = 0) {
  double best = 0;
  std::vector<cplx> v(P.n), w;
  for (int s = 0; s < seeds; ++s) {
    CounterRng rng(seed, 1000 + s, 0);
    for (auto& x : v) x = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    double r = 0;
    for (int it = 0; it < iters; ++it) {
      const double nv = detail::norm1(v);
      for (auto& x : v) x /= nv;
      P.left_multiply(v, w);
      r = detail::norm1(w);
      v.swap(w);
    }
    best = std::max(best, r);
  }
  return best;
}

/// Leading eigenvalue of the twisted operator at frequency b (twist e^{-i b tau}).
inline SpectralProbe leading_eigenvalue(const UlamOperator& op, double b, std::vector<cplx>* warm = nullptr,
                                        const PowerOptions& opt = {}, TwistMode mode = TwistMode::galerkin) {
  const CsrMatrix P = op.twisted(cplx(0, b), mode);
  std::vector<cplx> local;
  std::vector<cplx>& v = warm ? *warm : local;
  SpectralProbe pr = power_iteration(P, v, opt);
  pr.b = b;
  if (opt.gap_iter > 0) pr.gap = subdominant_modulus(P, v, pr.lambda, opt.gap_iter) / std::abs(pr.lambda);
  pr.spectral_radius = std::abs(pr.lambda);
  return pr;
}

/// Same, for the real Laplace family e^{-sigma tau}.
inline SpectralProbe leading_eigenvalue_real(const UlamOperator& op, double sigma, const PowerOptions& opt = {}) {
  const CsrMatrix P = op.twisted(cplx(sigma, 0));
  std::vector<cplx> v;
  SpectralProbe pr = power_iteration(P, v, opt);
  pr.sigma = sigma;
  pr.spectral_radius = std::abs(pr.lambda);
  return pr;
}

/// Invariant measure of the Ulam chain: cell masses (stationary row vector).
inline std::vector<double> stationary_masses(const UlamOperator& op, double tol = 1e-13) {
  std::vector<cplx> v;
  PowerOptions o;
  o.tol = tol;
  o.gap_iter = 0;
  const auto pr = power_iteration(op.untwisted(), v, o);
  if (std::abs(pr.lambda - 1.0) > 1e-10) throw spectral_error("leading eigenvalue of the Ulam matrix is not 1", std::abs(pr.lambda - 1.0));
  std::vector<double> m(v.size());
  double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += (m[i] = v[i].real());
  for (auto& x : m) x /= s;
  return m;
}

}  // namespace rlab
