#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

#include "rlab/errors.hpp"
#include "rlab/specfun/quadrature.hpp"

namespace rlab {

using cplx = std::complex<double>;

struct RenewalConstants {
  double beta = 0;
  double d_beta = 0;        // sin(beta pi)/pi, with d_1 = 1
  double D_beta = 0;        // 1/(Gamma(1-beta)Gamma(1+beta)), D_0 = D_1 = 1
  double D_beta_prime = 0;  // 1/Gamma(1-beta)
  std::optional<cplx> c_beta;  // empty at the endpoints
};

inline cplx c_beta_closed_form(double beta) {
  return std::polar(std::tgamma(1 - beta), std::numbers::pi * beta / 2);
}

/// i * int_0^inf e^{-i s} s^{-beta} ds by direct quadrature: graded panels in
/// the variable u = s^{1-beta} near 0, Gauss-Legendre half-periods on [1, M],
/// and an integration-by-parts expansion of the tail beyond M.
inline cplx c_beta_quadrature(double beta) {
  using std::numbers::pi;
  const double p = 1.0 / (1.0 - beta);
  // int_0^1 e^{-is} s^{-beta} ds = p^{-1}... with s = u^p, ds s^{-beta} = p u^{p-1} u^{-p beta} du = p du
  quad::Rule head;
  head.add_graded(std::ldexp(1.0, -40), 1.0);
  cplx near = head.integrate([&](double u) { return std::exp(cplx(0, -std::pow(u, p))); }) * p;

  const double M = 2000 * pi;
  quad::Rule body;
  body.add_uniform(1.0, M, pi / 2);
  cplx mid = body.integrate([&](double s) { return std::exp(cplx(0, -s)) * std::pow(s, -beta); });

  // J(a) = e^{-iM} M^{-a}/i - (a/i) J(a+1)
  cplx tail = 0, coef = 1;
  const cplx I(0, 1);
  for (int k = 0; k < 12; ++k) {
    tail += coef * std::pow(M, -beta - k) / std::pow(I, k + 1);
    coef *= -(beta + k);
  }
  tail *= std::exp(cplx(0, -M));
  return I * (near + mid + tail);
}

inline RenewalConstants renewal_constants(double beta, bool cross_check = true) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw domain_error("renewal_constants: beta must lie in [0,1]");
  RenewalConstants rc;
  rc.beta = beta;
  if (beta == 1.0) {
    rc.d_beta = 1.0;
    rc.D_beta = 1.0;
    rc.D_beta_prime = 1.0;  // limit of 1/Gamma(1-beta) with the l~ normalization
    return rc;
  }
  rc.d_beta = std::sin(beta * std::numbers::pi) / std::numbers::pi;
  rc.D_beta = 1.0 / (std::tgamma(1 - beta) * std::tgamma(1 + beta));
  rc.D_beta_prime = 1.0 / std::tgamma(1 - beta);
  if (beta > 0.0) {
    rc.c_beta = c_beta_closed_form(beta);
    if (cross_check) {
      const cplx q = c_beta_quadrature(beta);
      const double rel = std::abs(q - *rc.c_beta) / std::abs(*rc.c_beta);
      if (rel > 1e-8) throw numerical_error("c_beta quadrature disagrees with closed form", rel);
    }
  }
  return rc;
}

}  // namespace rlab
