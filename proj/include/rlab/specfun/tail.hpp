#pragma once

#include <cmath>

#include "rlab/errors.hpp"

namespace rlab {

enum class EllKind { constant, logarithmic };

/// mu(tau > t) ~ ell(t) t^{-beta}.  The logarithmic family is
/// ell(t) = c0 (1 + ln(t/t_min)), positive from t_min on.
struct TailModel {
  double beta = 0.75;
  EllKind kind = EllKind::constant;
  double c0 = 1.0;
  double t_min = 1.0;

  void validate() const {
    if (!(beta > 0.0 && beta <= 1.0)) throw domain_error("TailModel: beta must lie in (0,1]");
    if (!(c0 > 0.0)) throw domain_error("TailModel: c0 must be positive");
    if (!(t_min > 0.0)) throw domain_error("TailModel: t_min must be positive");
  }

  double ell(double t) const {
    return kind == EllKind::constant ? c0 : c0 * (1.0 + std::log(t / t_min));
  }

  /// int_{t_min}^t ell(s)/s ds
  double ell_tilde(double t) const {
    const double L = std::log(t / t_min);
    return kind == EllKind::constant ? c0 * L : c0 * (L + 0.5 * L * L);
  }
};

inline double m_of_t(const TailModel& tail, double t) {
  if (!(t >= tail.t_min)) throw domain_error("m_of_t: t below t_min");
  if (tail.beta == 1.0) return tail.ell_tilde(t);
  return tail.ell(t) * std::pow(t, 1.0 - tail.beta);
}

}  // namespace rlab
