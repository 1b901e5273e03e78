#pragma once

#include <cstdint>
#include <limits>

#include "rlab/dynamics/induced.hpp"
#include "rlab/renewal/iid.hpp"
#include "rlab/renewal/sets.hpp"

namespace rlab {

/// What a driver hands to the estimators for one induced step.
struct DriverStep {
  double y_next;   // F(y)
  double tau;      // tau(y)
  bool censored;   // the step ran past the requested cap; tau is a lower bound
};

/// Deterministic orbits of the induced intermittent map, started from mu.
class DeterministicDriver {
 public:
  DeterministicDriver(InducedSystem sys, MeasureSampler mu, std::uint64_t max_iter = InducedSystem::default_max_iter)
      : sys_(std::move(sys)), mu_(std::move(mu)), max_iter_(max_iter) {}

  double start(CounterRng& rng) const { return mu_.sample(rng); }
  double start_in(const MeasureSampler& restricted, CounterRng& rng) const { return restricted.sample(rng); }

  DriverStep step(double y, CounterRng&, double cap) const {
    const auto s = sys_.first_return(y, max_iter_, cap);
    return {s.F_y, s.tau, s.censored};
  }

  double essinf_tau() const { return sys_.essinf_tau(); }
  const MeasureSampler& measure() const { return mu_; }
  const InducedSystem& system() const { return sys_; }

 private:
  InducedSystem sys_;
  MeasureSampler mu_;
  std::uint64_t max_iter_;
};

/// i.i.d. roofs: the base point carries no information and A = B = everything.
class IidDriver {
 public:
  explicit IidDriver(IidLaw law) : law_(law), draw_((law_.validate(), law_.sampler())) {}

  double start(CounterRng&) const { return 0.5; }
  double start_in(const MeasureSampler&, CounterRng&) const { return 0.5; }

  DriverStep step(double y, CounterRng& rng, double) const { return {y, draw_(rng), false}; }

  double essinf_tau() const { return law_.t0(); }
  const IidLaw& law() const { return law_; }

 private:
  IidLaw law_;
  IidLaw::Sampler draw_;
};

}  // namespace rlab
