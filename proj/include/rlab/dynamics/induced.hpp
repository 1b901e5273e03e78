#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "rlab/dynamics/excursion.hpp"
#include "rlab/dynamics/map.hpp"

namespace rlab {

struct InducedStep {
  double y = 0;
  std::uint64_t sigma = 0;  // first-return time
  double F_y = 0;
  double tau = 0;           // induced roof, sum of tau0 along the excursion
  bool censored = false;    // tau exceeded the caller's cap; tau is then a lower bound and F_y invalid
};

/// The induced system (Y, F, tau) of the intermittent map.
class InducedSystem {
 public:
  static constexpr std::uint64_t default_max_iter = 1000000000ULL;

  InducedSystem(IntermittentMapSpec spec = IntermittentMapSpec::make(), RoofSpec roof = {}, bool accelerate = true)
      : spec_(spec), roof_(roof) {
    roof_.validate();
    if (accelerate) accel_ = ExcursionAccelerator(spec_);
  }

  const IntermittentMapSpec& spec() const { return spec_; }
  const RoofSpec& roof() const { return roof_; }
  double lo() const { return spec_.x_star; }
  double hi() const { return 1.0; }
  double essinf_tau() const { return roof_(spec_.x_star); }
  bool in_Y(double x) const { return x >= spec_.x_star; }

  /// First return to Y.  Orbit points below the accelerator threshold are
  /// advanced by exact-count jumps; everything else is iterated directly.
  InducedStep first_return(double y, std::uint64_t max_iter = default_max_iter,
                           double tau_cap = std::numeric_limits<double>::infinity()) const {
    if (!(y >= spec_.x_star && y <= 1.0)) throw domain_error("first_return: y outside Y");
    InducedStep st{y, 1, 0, 0, false};
    double x = spec_.right(y);
    double sum = 0;  // sum of left-branch orbit points
    const double xs = spec_.x_star, zk = accel_.enabled() ? accel_.threshold() : 0.0;
    std::uint64_t n = 1;
    while (x < xs) {
      if (x < zk) {
        if (!(x > 0)) throw truncation_error("first_return: orbit reached the neutral fixed point", {y, x, n, 0});
        const auto j = accel_.jump(x);
        n += j.steps;
        sum += j.sum_x;
        x = j.x;
      } else {
        sum += x;
        x = spec_.left(x);
        ++n;
      }
      if (roof_.a0 * static_cast<double>(n) > tau_cap) {
        st.sigma = n;
        st.tau = roof_.a0 * static_cast<double>(n) + roof_.a1 * (y + sum);
        st.censored = true;
        return st;
      }
      if (n > max_iter) {
        throw truncation_error("first_return: excursion exceeded max_iter",
                               {y, x, n, roof_.a0 * static_cast<double>(n) + roof_.a1 * (y + sum)});
      }
      if (!accel_.enabled() && x == 0) throw truncation_error("first_return: orbit reached 0", {y, x, n, 0});
    }
    st.sigma = n;
    st.F_y = x;
    st.tau = roof_.a0 * static_cast<double>(n) + roof_.a1 * (y + sum);
    return st;
  }

  /// (F(y), tau(y)) for use as a generic induced map.  No iteration cap:
  /// the jumps make arbitrarily long excursions cheap.
  std::pair<double, double> operator()(double y) const {
    const auto s = first_return(y, ~std::uint64_t{0});
    return {s.F_y, s.tau};
  }

 private:
  IntermittentMapSpec spec_;
  RoofSpec roof_;
  ExcursionAccelerator accel_;
};

inline InducedStep first_return(const InducedSystem& sys, double y,
                                std::uint64_t max_iter = InducedSystem::default_max_iter) {
  return sys.first_return(y, max_iter);
}

/// Running sums tau_0 = 0, tau_n = sum_{j<n} tau(F^j y).
inline std::vector<double> birkhoff_tau(const std::vector<InducedStep>& steps) {
  std::vector<double> out(steps.size() + 1, 0.0);
  for (std::size_t i = 0; i < steps.size(); ++i) out[i + 1] = out[i] + steps[i].tau;
  return out;
}

/// n steps of the induced orbit from y.
inline std::vector<InducedStep> induced_orbit(const InducedSystem& sys, double y, std::size_t n) {
  std::vector<InducedStep> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    v.push_back(sys.first_return(y));
    y = v.back().F_y;
  }
  return v;
}

struct SemiflowPoint {
  double y = 0;
  double u = 0;  // height in [0, tau(y))
};

struct Crossing {
  std::uint64_t n;  // index of the new base point F^n y
  double time;      // elapsed flow time at the crossing
};

struct SemiflowResult {
  SemiflowPoint point;
  std::vector<Crossing> crossings;
};

/// F_t(y, u) = (y, u + t) modulo (y, tau(y)) ~ (F y, 0).
template <class System>
SemiflowResult semiflow_evolve(const System& sys, SemiflowPoint p, double t) {
  SemiflowResult r;
  double elapsed = 0;
  std::uint64_t n = 0;
  for (;;) {
    const auto [fy, tau] = sys(p.y);
    if (!(p.u >= 0 && p.u < tau)) throw domain_error("semiflow_evolve: u outside [0, tau(y))");
    const double rest = tau - p.u;
    if (t < rest) {
      p.u += t;
      break;
    }
    t -= rest;
    elapsed += rest;
    p = {fy, 0.0};
    r.crossings.push_back({++n, elapsed});
  }
  r.point = p;
  return r;
}

}  // namespace rlab
