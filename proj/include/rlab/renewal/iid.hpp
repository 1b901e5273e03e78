#pragma once

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>

#include "rlab/errors.hpp"
#include "rlab/rng.hpp"
#include "rlab/specfun/tail.hpp"

namespace rlab {

/// i.i.d. roof law with exact tail P(tau > t) = c0 t^{-beta} for t >= t0.
///  - pareto:   t0 = c0^{1/beta}, no atom.
///  - balanced: t0 = (c0/(1-beta))^{1/beta} with an atom of mass beta at t0,
///              which makes int_0^inf (P(tau > t) - c0 t^{-beta}) dt = 0 and so
///              removes the O(s) term from the Laplace transform at s -> 0.
struct IidLaw {
  enum class Kind { pareto, balanced };
  double beta = 0.75;
  double c0 = 1.0;
  Kind kind = Kind::balanced;

  void validate() const {
    if (!(beta > 0 && beta <= 1)) throw domain_error("iid: beta must lie in (0,1]");
    if (!(c0 > 0)) throw domain_error("iid: c0 must be positive");
    if (kind == Kind::balanced && beta == 1.0) throw domain_error("iid: balanced law needs beta < 1");
    if (!(t0() > 1.0)) throw domain_error("iid: essinf tau must exceed 1");
  }

  double t0() const {
    return kind == Kind::pareto ? std::pow(c0, 1 / beta) : std::pow(c0 / (1 - beta), 1 / beta);
  }

  /// mass of the atom at t0
  double atom() const { return kind == Kind::pareto ? 0.0 : beta; }

  double survival(double t) const {
    const double a = t0();
    if (t < a) return 1.0;
    return c0 * std::pow(t, -beta);
  }

  /// Inverse-CDF sampler with the law's invariants precomputed.
  struct Sampler {
    double t0, tail, c0, inv_beta;
    double operator()(CounterRng& rng) const {
      const double u = rng.uniform_pos();  // P(tau > t) = u
      if (u > tail) return t0;
      return std::pow(c0 / u, inv_beta);
    }
  };

  Sampler sampler() const { return {t0(), c0 * std::pow(t0(), -beta), c0, 1 / beta}; }  // tail = 1 - atom

  double sample(CounterRng& rng) const { return sampler()(rng); }

  /// E e^{-s tau} in closed form.
  double laplace(double s) const {
    const double a = t0();
    const double tail = c0 * std::pow(a, -beta);
    // int_{t0}^inf e^{-st} d(-c0 t^{-beta}) = c0 t0^{-beta} e^{-s t0} - c0 s^beta Gamma(1-beta, s t0)
    double cont;
    if (beta < 1.0) {
      cont = tail * std::exp(-s * a) - c0 * std::pow(s, beta) * boost::math::tgamma(1 - beta, s * a);
    } else {
      cont = tail * std::exp(-s * a) - c0 * s * boost::math::expint(1, s * a);
    }
    return atom() * std::exp(-s * a) + cont;
  }

  TailModel tail() const { return {beta, EllKind::constant, c0, 1.0}; }
};

}  // namespace rlab
