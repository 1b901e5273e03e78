#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/rng.hpp"
#include "rlab/specfun/constants.hpp"
#include "rlab/specfun/quadrature.hpp"

namespace rlab {

/// Table layout for q_beta.  The linear block starts at -left*s with
/// s = Gamma(1-beta)^{1/beta} and runs to linear_extent*w, where w is the
/// smaller of s and the mode (for small beta the bulk is much narrower than
/// s).  A logarithmic block follows out to where the right-tail mass drops
/// below tail_mass.
struct StableGridSpec {
  double left = 1.0;              // in units of s
  double linear_extent = 10.0;    // in units of w
  double linear_step = 1e-3;      // in units of w
  int points_per_decade = 2000;   // log block density
  double tail_mass = 1e-8;        // P(X > t_max) ~ t_max^{-beta}
};

/// Pointwise evaluation of the one-sided stable density with Laplace
/// transform exp(-Gamma(1-beta) s^beta), i.e. characteristic function
/// exp(-c_beta b^beta) for b > 0 (conjugate for b < 0).
class StableDensityEvaluator {
 public:
  explicit StableDensityEvaluator(double beta) : beta_(beta) {
    using std::numbers::pi;
    if (!(beta > 0.0 && beta < 1.0)) throw domain_error("stable density: beta must lie in (0,1)");
    kappa_ = std::tgamma(1 - beta);
    c_ = c_beta_closed_form(beta);
    cos_ = std::cos(pi * beta);
    sin_ = std::sin(pi * beta);

    // Rotated contour: the integrand carries exp(-u + kappa |cos pi beta| (u/t)^beta)
    // which stays below e^2 once t >= t_switch.
    if (beta > 0.5) {
      const double a = beta * kappa_ * std::abs(cos_);
      t_switch_ = std::pow(a / std::pow(2 * beta / (1 - beta), 1 - beta), 1 / beta);
    }
    ray_.add_graded(std::ldexp(1.0, -16), 1.0);
    // Run the u-integral until the integrand is below e^{-45} at t = t_switch.
    double u_max = 60.0;
    if (beta > 0.5) {
      const double a = kappa_ * std::abs(cos_) * std::pow(t_switch_, -beta);
      while (u_max - a * std::pow(u_max, beta) < 45.0) u_max *= 1.25;
    }
    ray_.add_uniform(1.0, 8.0, 1.0);
    ray_.add_uniform(8.0, u_max, 4.0);

    // Real axis, needed only for t < t_switch.
    bandwidth_ = std::pow(std::log(1e10) / c_.real(), 1 / beta);
    const double tmax = std::max(t_switch_, scale());
    const double width = std::min(0.5, std::numbers::pi / (tmax + beta * std::abs(c_)));
    line_.add_graded(std::ldexp(width, -30), width);
    line_.add_uniform(width, bandwidth_, width);
  }

  double beta() const { return beta_; }
  double kappa() const { return kappa_; }
  double scale() const { return std::pow(kappa_, 1 / beta_); }
  double t_switch() const { return t_switch_; }
  double bandwidth() const { return bandwidth_; }

  double operator()(double t) const {
    if (t > 0 && t >= t_switch_) return ray(t);
    if (beta_ <= 0.5) return 0.0;  // support is [0, inf); the ray covers t > 0
    return line(t);
  }

  double ray(double t) const {
    const double itb = std::pow(t, -beta_);
    const double sum = ray_.integrate([&](double u) {
      const double v = kappa_ * std::pow(u, beta_) * itb;
      return std::exp(-u - v * cos_) * std::sin(v * sin_);
    });
    return sum / (std::numbers::pi * t);
  }

  double line(double t) const {
    const cplx cc = std::conj(c_);
    const double sum = line_.integrate([&](double b) {
      return std::real(std::exp(cplx(0, -b * t) - cc * std::pow(b, beta_)));
    });
    return sum / std::numbers::pi;
  }

 private:
  double beta_, kappa_, cos_, sin_;
  cplx c_;
  double t_switch_ = 0.0;
  double bandwidth_ = 0.0;
  quad::Rule ray_, line_;
};

class StableLaw {
 public:
  StableLaw(double beta, const StableGridSpec& spec = {}) : eval_(beta) {
    const double s = eval_.scale();
    const double w = std::min(s, mode());
    const double dt = spec.linear_step * w;
    const double t_lo = -spec.left * s;
    const auto nlin = static_cast<long>(std::ceil((spec.linear_extent * w - t_lo) / dt));
    for (long i = 0; i <= nlin; ++i) t_.push_back(t_lo + static_cast<double>(i) * dt);
    const double t_lin = t_.back();
    const double t_max = std::pow(spec.tail_mass, -1 / beta);
    const double r = std::pow(10.0, 1.0 / spec.points_per_decade);
    for (double t = t_lin * r; t < t_max * r; t *= r) t_.push_back(t);
    q_.reserve(t_.size());
    for (double t : t_) q_.push_back(eval_(t));
    cdf_.assign(t_.size(), 0.0);
    for (std::size_t i = 1; i < t_.size(); ++i)
      cdf_[i] = cdf_[i - 1] + 0.5 * (q_[i] + q_[i - 1]) * (t_[i] - t_[i - 1]);
    const double total = cdf_.back();
    if (std::abs(total - 1.0) > 1e-6) throw numerical_error("stable density fails normalization", total);
    const double qmin = *std::min_element(q_.begin(), q_.end());
    if (qmin < -1e-8) throw numerical_error("stable density negative beyond tolerance", qmin);
  }

  /// Location of the maximum, by a log scan then golden-section refinement.
  double mode() const {
    const double s = eval_.scale();
    double best = 0, tb = s;
    for (int i = 0; i <= 200; ++i) {
      const double t = s * std::pow(10.0, -3.0 + 4.0 * i / 200);
      const double v = eval_(t);
      if (v > best) best = v, tb = t;
    }
    double a = tb / 1.05, b = tb * 1.05;
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    for (int it = 0; it < 60; ++it) {
      const double c = b - g * (b - a), d = a + g * (b - a);
      if (eval_(c) > eval_(d)) b = d; else a = c;
    }
    return 0.5 * (a + b);
  }

  double beta() const { return eval_.beta(); }
  cplx c_beta() const { return c_beta_closed_form(beta()); }
  double inversion_bandwidth() const { return eval_.bandwidth(); }
  const StableDensityEvaluator& evaluator() const { return eval_; }
  const std::vector<double>& t() const { return t_; }
  const std::vector<double>& q() const { return q_; }

  double integral() const { return cdf_.back(); }
  double max_q() const { return *std::max_element(q_.begin(), q_.end()); }
  double min_q() const { return *std::min_element(q_.begin(), q_.end()); }

  double negative_mass() const {
    double m = 0;
    for (std::size_t i = 1; i < t_.size() && t_[i] <= 0; ++i)
      m += 0.5 * (std::abs(q_[i]) + std::abs(q_[i - 1])) * (t_[i] - t_[i - 1]);
    return m;
  }

  /// Linear interpolation of the table, clamped at zero; 0 outside the grid.
  double pdf(double t) const {
    if (t <= t_.front() || t >= t_.back()) return 0.0;
    const auto i = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin());
    const double w = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
    return std::max(0.0, (1 - w) * q_[i - 1] + w * q_[i]);
  }

  /// Trapezoid CDF, exact integral of the piecewise-linear interpolant.
  double cdf(double t) const {
    if (t <= t_.front()) return 0.0;
    if (t >= t_.back()) return cdf_.back();
    const auto i = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin());
    const double dt = t - t_[i - 1];
    const double slope = (q_[i] - q_[i - 1]) / (t_[i] - t_[i - 1]);
    return cdf_[i - 1] + dt * (q_[i - 1] + 0.5 * slope * dt);
  }

  /// Mean of q over [a, b].
  double window_mean(double a, double b) const { return (cdf(b) - cdf(a)) / (b - a); }

  /// int_0^inf x^{-1/beta} q(x^{-1/beta}) dx, computed as beta int y^{-beta} q(y) dy.
  double reciprocal_identity() const {
    const double b = beta();
    double acc = 0;
    for (std::size_t i = 1; i < t_.size(); ++i) {
      if (t_[i - 1] <= 0) continue;
      acc += 0.5 * (std::pow(t_[i], -b) * q_[i] + std::pow(t_[i - 1], -b) * q_[i - 1]) * (t_[i] - t_[i - 1]);
    }
    return b * acc;
  }

  void write_csv(std::ostream& os) const {
    os << "t,q_beta\n";
    os.precision(17);
    for (std::size_t i = 0; i < t_.size(); ++i) os << t_[i] << ',' << q_[i] << '\n';
  }

 private:
  StableDensityEvaluator eval_;
  std::vector<double> t_, q_, cdf_;
};

inline StableLaw stable_density(double beta, const StableGridSpec& spec = {}) { return StableLaw(beta, spec); }

/// Kanter / Chambers-Mallows-Stuck draw from the same law as StableLaw.
class StableSampler {
 public:
  explicit StableSampler(double beta) : beta_(beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw domain_error("stable sampler: beta must lie in (0,1)");
    scale_ = std::pow(std::tgamma(1 - beta), 1 / beta);
  }

  double operator()(CounterRng& rng) const {
    const double u = std::numbers::pi * rng.uniform_pos() * (1 - 0x1.0p-53);
    const double e = rng.exponential();
    const double a = std::sin(beta_ * u) / std::pow(std::sin(u), 1 / beta_);
    const double b = std::pow(std::sin((1 - beta_) * u) / e, (1 - beta_) / beta_);
    return scale_ * a * b;
  }

 private:
  double beta_, scale_;
};

}  // namespace rlab
