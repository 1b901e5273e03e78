#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "rlab/dynamics/map.hpp"
#include "rlab/errors.hpp"

namespace rlab {

namespace detail {
// Generalized binomial coefficient binom(r, m).
inline double binom(double r, int m) {
  double v = 1;
  for (int i = 0; i < m; ++i) v *= (r - i) / (i + 1);
  return v;
}
}  // namespace detail

/// Exact-count acceleration of long excursions near the neutral fixed point.
///
/// For h(x) = x(1 + eps), eps = c x^p, the Fatou coordinate
///   Phi(x) = -1/(p eps) + (p+1)/2 ln x + sum_k D_k eps^k
/// satisfies Phi(h(x)) = Phi(x) + 1, and
///   Psi(x) = x sum_k E_k eps^{k-1}   (p != 1)
///   Psi(x) = -ln(x)/c + (1/c) sum_{k>=1} E_k eps^k   (p == 1)
/// satisfies Psi(x) - Psi(h(x)) = x.  An orbit segment of k steps starting
/// below z_K (the K-th preimage of x_star) is then replaced by
/// x' = Phi^{-1}(Phi(x) + k) and sum_{j<k} x_j = Psi(x) - Psi(x').  The last K
/// steps before re-entering Y are always iterated directly.
class ExcursionAccelerator {
 public:
  static constexpr int terms = 12;

  ExcursionAccelerator() = default;

  ExcursionAccelerator(const IntermittentMapSpec& spec, int k0 = 12)
      : spec_(spec), p_(spec.gamma1), c_(spec.c1), pw_(spec.gamma1) {
    const double p = p_;
    const double a = -1.0 / p, B = 0.5 * (p + 1);
    B_ = B;
    D_.assign(terms + 1, 0.0);
    for (int n = 2; n <= terms + 1; ++n) {
      double s = a * detail::binom(-p, n + 1) + B * ((n + 1) % 2 ? -1.0 : 1.0) / n;
      for (int k = 1; k <= n - 2; ++k) s += D_[k] * detail::binom(k * p, n - k);
      D_[n - 1] = -s / ((n - 1) * p);
    }
    E_.assign(terms + 1, 0.0);
    if (p != 1.0) {
      E_[0] = -1.0 / (1.0 - p);
      for (int n = 1; n <= terms; ++n) {
        double s = 0;
        for (int k = 0; k < n; ++k) s += E_[k] * detail::binom(1 + p * (k - 1), n - k + 1);
        E_[n] = -s / (1 + p * (n - 1));
      }
    } else {
      for (int n = 2; n <= terms + 1; ++n) {
        double s = ((n + 1) % 2 ? -1.0 : 1.0) / n;
        for (int k = 1; k <= n - 2; ++k) s -= E_[k] * detail::binom(k, n - k);
        E_[n - 1] = s / (n - 1);
      }
    }
    double z = spec.x_star;
    for (int i = 0; i < k0; ++i) z = spec.left_inverse(z);
    zK_ = z;
    phiK_ = phi(zK_);
    dphiK_ = phi_prime(zK_);
    // Chebyshev interpolants of Phi^{-1} and Psi o Phi^{-1} on [Phi(z_K), Phi(z_K) + 1]
    inv_.assign(cheb_n, 0.0);
    psi_inv_.assign(cheb_n, 0.0);
    std::vector<double> fx(cheb_n), fp(cheb_n);
    for (int i = 0; i < cheb_n; ++i) {
      const double t = std::cos(std::numbers::pi * (i + 0.5) / cheb_n);
      fx[i] = phi_inverse_near_threshold(phiK_ + 0.5 * (t + 1));
      fp[i] = psi(fx[i]);
    }
    for (int j = 0; j < cheb_n; ++j) {
      double a = 0, b = 0;
      for (int i = 0; i < cheb_n; ++i) {
        const double c = std::cos(std::numbers::pi * j * (i + 0.5) / cheb_n);
        a += fx[i] * c;
        b += fp[i] * c;
      }
      inv_[j] = 2.0 * a / cheb_n;
      psi_inv_[j] = 2.0 * b / cheb_n;
    }
  }

  bool enabled() const { return zK_ > 0; }
  double threshold() const { return zK_; }

  double phi(double x) const {
    const double eps = c_ * pw_(x);
    double s = 0, e = eps;
    for (int k = 1; k <= terms; ++k, e *= eps) s += D_[k] * e;
    return -1.0 / (p_ * eps) + B_ * std::log(x) + s;
  }

  double phi_prime(double x) const {
    const double eps = c_ * pw_(x);
    double s = 0, e = eps;
    for (int k = 1; k <= terms; ++k, e *= eps) s += D_[k] * k * p_ * e;
    return (1.0 / eps + B_ + s) / x;
  }

  double psi(double x) const {
    const double eps = c_ * pw_(x);
    if (p_ != 1.0) {
      double s = E_[0] / eps, e = 1.0;
      for (int k = 1; k <= terms; ++k, e *= eps) s += E_[k] * e;
      return x * s;
    }
    double s = 0, e = eps;
    for (int k = 1; k <= terms; ++k, e *= eps) s += E_[k] * e;
    return (-std::log(x) + s) / c_;
  }

  /// Phi^{-1}(v) for v in [Phi(z_K), Phi(z_K) + 1]: Newton from z_K, where
  /// Phi is smooth and nearly linear on the scale of one step.
  double phi_inverse_near_threshold(double v) const {
    double x = zK_ + (v - phiK_) / dphiK_;
    for (int i = 0; i < 3; ++i) x -= (phi(x) - v) / phi_prime(x);
    return x;
  }

  struct Jump {
    double x;            // landing point, at or just above z_K
    std::uint64_t steps;  // exact number of skipped iterations
    double sum_x;         // sum of the skipped orbit points x_0..x_{k-1}
  };

  /// Requires 0 < x < threshold().
  Jump jump(double x) const {
    const double eps = c_ * pw_(x), lx = std::log(x);
    double sd = 0, se = 0, e = eps;
    for (int k = 1; k <= terms; ++k, e *= eps) sd += D_[k] * e, se += E_[k] * e;
    const double ph = -1.0 / (p_ * eps) + B_ * lx + sd;
    const double ps = p_ != 1.0 ? x * (E_[0] / eps + E_[1] + (se - E_[1] * eps) / eps) : (-lx + se) / c_;
    const double r = phiK_ - ph;
    const double k = std::max(1.0, std::ceil(r));
    if (!(k < 0x1p63)) throw truncation_error("excursion: jump length exceeds 2^63 steps", {0, x, 0, 0});
    // position inside the unit interval of Fatou time above Phi(z_K); once
    // |Phi(x)| passes 2^53 the fraction is below resolution, hence the clamp
    const double t = std::clamp(2.0 * (k - r) - 1.0, -1.0, 1.0);
    return {clenshaw(inv_, t), static_cast<std::uint64_t>(k), ps - clenshaw(psi_inv_, t)};
  }

  const std::vector<double>& D() const { return D_; }
  const std::vector<double>& E() const { return E_; }

 private:
  IntermittentMapSpec spec_;
  double p_ = 1, c_ = 1, B_ = 1;
  std::vector<double> D_, E_;
  static constexpr int cheb_n = 28;

  static double clenshaw(const std::vector<double>& c, double t) {
    double b1 = 0, b2 = 0;
    for (int j = cheb_n - 1; j >= 1; --j) {
      const double b0 = 2 * t * b1 - b2 + c[j];
      b2 = b1;
      b1 = b0;
    }
    return t * b1 - b2 + 0.5 * c[0];
  }

  PowerFn pw_;
  std::vector<double> inv_, psi_inv_;
  double zK_ = 0, phiK_ = 0, dphiK_ = 1;
};

}  // namespace rlab
