#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/rng.hpp"

namespace rlab {

struct Interval {
  double lo = 0, hi = 1;
  bool contains(double x) const { return x >= lo && x <= hi; }
  double length() const { return hi - lo; }
};

/// A, B subintervals of Y and the rectangles A1 = A x [a1, a2], B1 = B x [b1, b2].
struct TargetSets {
  Interval A, B;
  double a1 = 0, a2 = 1;
  double b1 = 0, b2 = 0.5;

  void validate(double essinf_A, double essinf_B) const {
    if (!(A.lo < A.hi && B.lo < B.hi)) throw domain_error("sets: empty interval");
    if (!(0 <= a1 && a1 < a2 && a2 <= essinf_A)) throw domain_error("sets: need 0 <= a1 < a2 <= essinf_A tau");
    if (!(0 <= b1 && b1 < b2 && b2 <= essinf_B)) throw domain_error("sets: need 0 <= b1 < b2 <= essinf_B tau");
  }
};

/// Inverse-CDF sampling from a piecewise-constant density on equal cells.
class MeasureSampler {
 public:
  MeasureSampler() = default;

  MeasureSampler(double lo, double hi, const std::vector<double>& masses) : lo_(lo), dx_((hi - lo) / masses.size()) {
    cum_.resize(masses.size() + 1, 0.0);
    for (std::size_t i = 0; i < masses.size(); ++i) cum_[i + 1] = cum_[i] + masses[i];
    for (auto& c : cum_) c /= cum_.back();
    masses_ = masses;
  }

  double sample(CounterRng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cum_.begin()) - 1;
    k = std::min(k, masses_.size() - 1);
    while (masses_[k] == 0 && k + 1 < masses_.size()) ++k;
    const double w = cum_[k + 1] - cum_[k];
    const double frac = w > 0 ? (u - cum_[k]) / w : 0.5;
    return lo_ + (static_cast<double>(k) + std::clamp(frac, 0.0, 1.0)) * dx_;
  }

  /// mu([a, b]) with fractional end cells.
  double measure(double a, double b) const {
    return cdf(b) - cdf(a);
  }

  double cdf(double x) const {
    const double pos = (x - lo_) / dx_;
    if (pos <= 0) return 0.0;
    const auto n = masses_.size();
    if (pos >= static_cast<double>(n)) return 1.0;
    const auto k = static_cast<std::size_t>(pos);
    return cum_[k] + (pos - static_cast<double>(k)) * (cum_[k + 1] - cum_[k]);
  }

  /// Sampler of mu conditioned on [a, b].
  MeasureSampler restricted(double a, double b) const {
    std::vector<double> m(masses_.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double c0 = lo_ + static_cast<double>(j) * dx_, c1 = c0 + dx_;
      m[j] = (cum_[j + 1] - cum_[j]) * std::max(0.0, std::min(b, c1) - std::max(a, c0)) / dx_;
    }
    return MeasureSampler(lo_, lo_ + dx_ * static_cast<double>(m.size()), m);
  }

  double density_at_left() const { return (1.5 * (cum_[1] - cum_[0]) - 0.5 * (cum_[2] - cum_[1])) / dx_; }

 private:
  double lo_ = 0, dx_ = 1;
  std::vector<double> cum_, masses_;
};

}  // namespace rlab
