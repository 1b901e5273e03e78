#pragma once

#include <cmath>
#include <string>

#include "rlab/errors.hpp"

namespace rlab {

/// x^gamma with fast paths for the exponents used by the experiments.
class PowerFn {
 public:
  explicit PowerFn(double gamma = 1.0) : gamma_(gamma) {
    if (gamma == 1.0) kind_ = Kind::one;
    else if (gamma == 4.0 / 3.0) kind_ = Kind::four_thirds;
    else if (gamma == 2.5) kind_ = Kind::five_halves;
    else if (gamma == 2.0) kind_ = Kind::two;
    else kind_ = Kind::generic;
  }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::one: return x;
      case Kind::four_thirds: return x * std::cbrt(x);
      case Kind::five_halves: return x * x * std::sqrt(x);
      case Kind::two: return x * x;
      default: return std::pow(x, gamma_);
    }
  }

  double exponent() const { return gamma_; }

 private:
  enum class Kind { one, four_thirds, five_halves, two, generic };
  double gamma_;
  Kind kind_;
};

/// g(x) = x(1 + c1 x^gamma1) mod 1, with branch cut x_star and Y = [x_star, 1].
struct IntermittentMapSpec {
  double gamma1 = 4.0 / 3.0;
  double c1 = 1.0;
  double x_star = 0.0;
  PowerFn pw{4.0 / 3.0};

  static IntermittentMapSpec make(double gamma1 = 4.0 / 3.0, double c1 = 1.0) {
    if (!(gamma1 >= 1.0)) throw domain_error("map: gamma1 must be >= 1");
    if (!(c1 > 0.0 && c1 <= 1.0)) throw domain_error("map: c1 must lie in (0,1]");
    IntermittentMapSpec s;
    s.gamma1 = gamma1;
    s.c1 = c1;
    s.pw = PowerFn(gamma1);
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 0; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (mid * (1 + c1 * s.pw(mid)) < 1.0 ? lo : hi) = mid;
    }
    s.x_star = 0.5 * (lo + hi);
    return s;
  }

  double beta_predicted() const { return 1.0 / gamma1; }

  /// Left branch h(x) = x(1 + c1 x^gamma1) on [0, x_star).
  double left(double x) const { return x * (1 + c1 * pw(x)); }

  /// Right branch on [x_star, 1], onto [0, c1].
  double right(double y) const { return y * (1 + c1 * pw(y)) - 1.0; }

  double apply(double x) const { return x < x_star ? left(x) : right(x); }

  double left_derivative(double x) const { return 1 + c1 * (1 + gamma1) * pw(x); }

  /// Inverse of the left branch: h^{-1}(w) for w in [0, 1).
  double left_inverse(double w) const {
    double x = w;  // h(x) >= x, so the preimage lies below w; Newton from above is monotone
    for (int i = 0; i < 100; ++i) {
      const double dx = (left(x) - w) / left_derivative(x);
      x -= dx;
      if (std::abs(dx) <= 1e-16 * x) break;
    }
    return x;
  }

  /// Inverse of the right branch: y in Y with right(y) = w, w in [0, c1].
  double right_inverse(double w) const {
    double lo = x_star, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (right(mid) < w ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

inline double map_apply(const IntermittentMapSpec& spec, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw domain_error("map_apply: x outside [0,1]");
  return spec.apply(x);
}

/// tau0(x) = a0 + a1 x.  The constant roof is the lattice control.
struct RoofSpec {
  enum class Kind { affine, constant };
  Kind kind = Kind::affine;
  double a0 = 1.0;
  double a1 = 0.5;

  static RoofSpec affine(double a0, double a1) {
    RoofSpec r{Kind::affine, a0, a1};
    r.validate();
    return r;
  }
  static RoofSpec constant(double c) {
    RoofSpec r{Kind::constant, c, 0.0};
    r.validate();
    return r;
  }

  void validate() const {
    if (!(a0 >= 1.0)) throw domain_error("roof: tau0 must be >= 1 (a0 >= 1)");
    if (!(a1 >= 0.0)) throw domain_error("roof: a1 must be >= 0");
  }

  double operator()(double x) const { return a0 + a1 * x; }

  std::string describe() const {
    return kind == Kind::constant ? "constant:" + std::to_string(a0)
                                  : "affine:" + std::to_string(a0) + "," + std::to_string(a1);
  }
};

}  // namespace rlab
