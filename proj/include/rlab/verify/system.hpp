#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rlab/cli/config.hpp"
#include "rlab/dynamics/measure.hpp"
#include "rlab/renewal/drivers.hpp"
#include "rlab/renewal/estimators.hpp"
#include "rlab/renewal/iid.hpp"
#include "rlab/transfer/ulam.hpp"

namespace rlab {

inline RoofSpec parse_roof(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw config_error("roof", "expected kind:params");
  const std::string kind = s.substr(0, colon), rest = s.substr(colon + 1);
  try {
    if (kind == "constant") return RoofSpec::constant(config_detail::to_double("roof", rest));
    if (kind == "affine") {
      const auto comma = rest.find(',');
      if (comma == std::string::npos) throw config_error("roof", "affine needs a0,a1");
      return RoofSpec::affine(config_detail::to_double("roof", rest.substr(0, comma)),
                              config_detail::to_double("roof", rest.substr(comma + 1)));
    }
  } catch (const domain_error& e) {
    throw config_error("roof", e.what());
  }
  throw config_error("roof", "unknown roof kind " + kind);
}

inline Interval parse_set(const std::string& key, const std::string& s, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  if (s == "Y") return {lo, hi};
  if (s == "left") return {lo, mid};
  if (s == "right") return {mid, hi};
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw config_error(key, "expected Y, left, right or lo,hi");
  const Interval I{config_detail::to_double(key, s.substr(0, comma)), config_detail::to_double(key, s.substr(comma + 1))};
  if (!(I.lo >= lo && I.hi <= hi && I.lo < I.hi)) throw config_error(key, "interval must be a nonempty subinterval of Y");
  return I;
}

/// Everything an experiment needs about the configured system: the induced
/// map with its Ulam operator and invariant density, or the i.i.d. law.
class LabSystem {
 public:
  explicit LabSystem(const ExperimentConfig& cfg, bool need_operator = true) : cfg_(cfg) {
    validate_config(cfg);
    if (cfg.iid()) {
      law_ = IidLaw{cfg.iid_beta, cfg.iid_c0, cfg.iid_law == "pareto" ? IidLaw::Kind::pareto : IidLaw::Kind::balanced};
      try {
        law_.validate();
      } catch (const domain_error& e) {
        throw config_error("iid_c0", e.what());
      }
      tail_ = law_.tail();
      sets_.A = sets_.B = {0.0, 1.0};
    } else {
      sys_.emplace(IntermittentMapSpec::make(cfg.gamma1, cfg.c1), parse_roof(cfg.roof));
      const auto t0 = std::chrono::steady_clock::now();
      if (need_operator) {
        UlamOptions uo;
        uo.grid_size = cfg.grid_size;
        uo.samples_per_cell = cfg.samples_per_cell;
        uo.seed = cfg.seed;
        op_ = std::make_shared<UlamOperator>(build_ulam(*sys_, sys_->lo(), sys_->hi(), uo));
        mu_ = invariant_measure_from(*op_);
      } else {
        mu_ = invariant_measure_Y(*sys_, cfg.grid_size, MeasureMethod::ulam);
      }
      build_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const double beta = sys_->spec().beta_predicted();
      tail_ = {beta, EllKind::constant, tail_constant(*sys_, mu_, 1e10), 1.0};
      sets_.A = parse_set("A", cfg.A, sys_->lo(), sys_->hi());
      sets_.B = parse_set("B", cfg.B, sys_->lo(), sys_->hi());
    }
    sets_.a1 = cfg.a1, sets_.a2 = cfg.a2, sets_.b1 = cfg.b1, sets_.b2 = cfg.b2;
    const double ess = essinf_tau();
    if (!(cfg.a2 <= ess)) throw config_error("a2", "must not exceed essinf tau = " + std::to_string(ess));
    if (!(cfg.b2 <= ess)) throw config_error("b2", "must not exceed essinf tau = " + std::to_string(ess));
  }

  const ExperimentConfig& config() const { return cfg_; }
  bool iid() const { return cfg_.iid(); }
  double beta() const { return tail_.beta; }
  const TailModel& tail() const { return tail_; }
  const TargetSets& sets() const { return sets_; }
  const InducedSystem& induced() const { return *sys_; }
  const InvariantMeasure& measure() const { return mu_; }
  const UlamOperator& ulam() const {
    if (!op_) throw domain_error("this experiment needs the deterministic system's Ulam operator");
    return *op_;
  }
  bool has_ulam() const { return static_cast<bool>(op_); }
  const IidLaw& law() const { return law_; }
  double build_seconds() const { return build_seconds_; }
  double essinf_tau() const { return iid() ? law_.t0() : sys_->essinf_tau(); }

  double mu_A() const { return iid() ? 1.0 : mu_.measure(sets_.A.lo, sets_.A.hi); }
  double mu_B() const { return iid() ? 1.0 : mu_.measure(sets_.B.lo, sets_.B.hi); }

  /// Estimator context for one Monte Carlo pass; passes that must be
  /// independent get distinct streams.
  RenewalContext context(std::uint64_t N, std::uint64_t stream) const {
    RenewalContext c;
    c.sets = sets_;
    c.mu_A = mu_A(), c.mu_B = mu_B();
    c.tail = tail_;
    c.pass.N = N;
    c.pass.seed = cfg_.seed;
    c.pass.stream = stream;
    c.pass.shards = cfg_.shards;
    c.pass.threads = cfg_.threads;
    c.pass.everywhere = iid();
    return c;
  }

  /// Calls f with the matching orbit driver.
  template <class F>
  decltype(auto) with_driver(F&& f) const {
    if (iid()) return f(IidDriver(law_));
    return f(DeterministicDriver(*sys_, mu_.sampler(), cfg_.max_iter));
  }

  std::vector<std::pair<std::string, std::string>> describe() const {
    using config_detail::fmt;
    std::vector<std::pair<std::string, std::string>> d;
    d.emplace_back("mode", cfg_.mode);
    if (iid()) {
      d.emplace_back("law", cfg_.iid_law);
      d.emplace_back("t0", fmt(law_.t0()));
    } else {
      d.emplace_back("gamma1", fmt(cfg_.gamma1));
      d.emplace_back("c1", fmt(cfg_.c1));
      d.emplace_back("roof", sys_->roof().describe());
      d.emplace_back("x_star", fmt(sys_->lo()));
      d.emplace_back("grid_size", std::to_string(cfg_.grid_size));
    }
    d.emplace_back("beta", fmt(tail_.beta));
    d.emplace_back("c0", fmt(tail_.c0));
    d.emplace_back("A", fmt(sets_.A.lo) + "," + fmt(sets_.A.hi));
    d.emplace_back("B", fmt(sets_.B.lo) + "," + fmt(sets_.B.hi));
    d.emplace_back("mu_A", fmt(mu_A()));
    d.emplace_back("mu_B", fmt(mu_B()));
    d.emplace_back("essinf_tau", fmt(essinf_tau()));
    return d;
  }

 private:
  ExperimentConfig cfg_;
  std::optional<InducedSystem> sys_;
  std::shared_ptr<UlamOperator> op_;
  InvariantMeasure mu_;
  IidLaw law_;
  TailModel tail_;
  TargetSets sets_;
  double build_seconds_ = 0;
};

}  // namespace rlab
