#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "rlab/renewal/engine.hpp"
#include "rlab/specfun/constants.hpp"
#include "rlab/specfun/stable.hpp"
#include "rlab/specfun/tail.hpp"

namespace rlab {

struct Window {
  double t, h;
};

// ---------------------------------------------------------------------------
// Scorers.  Each exposes fresh() (empty copy with the same setup), horizon(),
// begin(rng), visit(n, tau_n, F^n y in B) -> keep going, end(), drop(), merge().

/// Counts visits tau_n in [t_k, t_k + h_k] for a ladder of windows.
class WindowScorer {
 public:
  explicit WindowScorer(std::vector<Window> w) : w_(std::move(w)), order_(w_.size()), acc_(w_.size()), scr_(w_.size()) {
    std::iota(order_.begin(), order_.end(), 0);
    std::sort(order_.begin(), order_.end(), [&](auto a, auto b) { return w_[a].t < w_[b].t; });
    for (auto k : order_) starts_.push_back(w_[k].t);
    for (auto& x : w_) {
      if (!(x.h > 0) || x.t < 0) throw domain_error("window: need t >= 0, h > 0");
      hmax_ = std::max(hmax_, x.h), horizon_ = std::max(horizon_, x.t + x.h);
    }
  }
  WindowScorer fresh() const { return WindowScorer(w_); }
  double horizon() const { return horizon_; }
  void begin(CounterRng&) {}
  bool visit(std::uint64_t, double tau, bool inB) {
    if (inB) {
      auto j = std::upper_bound(starts_.begin(), starts_.end(), tau) - starts_.begin();
      while (j-- > 0 && starts_[j] >= tau - hmax_) {
        const auto k = order_[j];
        if (tau <= w_[k].t + w_[k].h) scr_.add(k, 1.0);
      }
    }
    return true;
  }
  void end() { scr_.flush(acc_); }
  void drop() { scr_.drop(); }
  void merge(const WindowScorer& o) { acc_.merge(o.acc_); }
  const std::vector<Window>& windows() const { return w_; }
  const VecMoments<0>& moments() const { return acc_; }

 private:
  std::vector<Window> w_;
  std::vector<std::size_t> order_;
  std::vector<double> starts_;
  double hmax_ = 0, horizon_ = 0;
  VecMoments<0> acc_;
  Scratch scr_;
};

/// Counts visits with tau_n <= t_k (the renewal function U(t_k)).
class CumulativeScorer {
 public:
  explicit CumulativeScorer(std::vector<double> t) : t_(std::move(t)), acc_(t_.size()), diff_(t_.size() + 1, 0) {
    if (!std::is_sorted(t_.begin(), t_.end())) throw domain_error("cumulative: thresholds must be sorted");
  }
  CumulativeScorer fresh() const { return CumulativeScorer(t_); }
  double horizon() const { return t_.empty() ? 0.0 : t_.back(); }
  void begin(CounterRng&) {}
  bool visit(std::uint64_t, double tau, bool inB) {
    if (inB) ++diff_[std::lower_bound(t_.begin(), t_.end(), tau) - t_.begin()];
    return true;
  }
  void end() {
    long c = 0;
    for (std::size_t k = 0; k < t_.size(); ++k) {
      c += diff_[k];
      if (c) acc_.add(k, static_cast<double>(c));
    }
    std::fill(diff_.begin(), diff_.end(), 0);
    acc_.add_sample();
  }
  void drop() { std::fill(diff_.begin(), diff_.end(), 0); }
  void merge(const CumulativeScorer& o) { acc_.merge(o.acc_); }
  const std::vector<double>& thresholds() const { return t_; }
  const VecMoments<0>& moments() const { return acc_; }

 private:
  std::vector<double> t_;
  VecMoments<0> acc_;
  std::vector<long> diff_;
};

/// Sum over visits of e^{-sigma tau_n}: the Laplace transform of dU.
class LaplaceScorer {
 public:
  explicit LaplaceScorer(std::vector<double> sigma, double cutoff = 40.0)
      : s_(std::move(sigma)), cutoff_(cutoff), acc_(s_.size()), scr_(s_.size()) {
    for (double s : s_)
      if (!(s > 0)) throw domain_error("laplace: sigma must be positive");
  }
  LaplaceScorer fresh() const { return LaplaceScorer(s_, cutoff_); }
  double horizon() const { return s_.empty() ? 0.0 : cutoff_ / *std::min_element(s_.begin(), s_.end()); }
  void begin(CounterRng&) {}
  bool visit(std::uint64_t, double tau, bool inB) {
    if (inB)
      for (std::size_t k = 0; k < s_.size(); ++k) scr_.add(k, std::exp(-s_[k] * tau));
    return true;
  }
  void end() { scr_.flush(acc_); }
  void drop() { scr_.drop(); }
  void merge(const LaplaceScorer& o) { acc_.merge(o.acc_); }
  const std::vector<double>& sigmas() const { return s_; }
  const VecMoments<40>& moments() const { return acc_; }

 private:
  std::vector<double> s_;
  double cutoff_;
  VecMoments<40> acc_;
  Scratch scr_;
};

/// Fixed-n windows: 1{tau_n in [t, t+h], F^n y in B} for each n of a ladder.
class LltScorer {
 public:
  struct Block {
    std::uint64_t n;
    std::vector<double> t;  // sorted window starts
    double h;
  };
  explicit LltScorer(std::vector<Block> blocks) : b_(std::move(blocks)) {
    std::sort(b_.begin(), b_.end(), [](auto& x, auto& y) { return x.n < y.n; });
    std::size_t off = 0;
    for (auto& x : b_) {
      if (!std::is_sorted(x.t.begin(), x.t.end())) throw domain_error("llt: window starts must be sorted");
      offset_.push_back(off), off += x.t.size();
      if (!x.t.empty()) horizon_ = std::max(horizon_, x.t.back() + x.h);
    }
    acc_ = VecMoments<0>(off), scr_ = Scratch(off);
  }
  LltScorer fresh() const { return LltScorer(b_); }
  double horizon() const { return horizon_; }
  void begin(CounterRng&) { next_ = 0; }
  bool visit(std::uint64_t n, double tau, bool inB) {
    if (next_ >= b_.size()) return false;
    if (n == b_[next_].n) {
      const auto& B = b_[next_];
      if (inB) {
        auto j = std::upper_bound(B.t.begin(), B.t.end(), tau) - B.t.begin();
        while (j-- > 0 && B.t[j] >= tau - B.h) scr_.add(offset_[next_] + j, 1.0);
      }
      ++next_;
    }
    return next_ < b_.size();
  }
  void end() { scr_.flush(acc_); }
  void drop() { scr_.drop(); }
  void merge(const LltScorer& o) { acc_.merge(o.acc_); }
  const std::vector<Block>& blocks() const { return b_; }
  std::size_t offset(std::size_t block) const { return offset_[block]; }
  const VecMoments<0>& moments() const { return acc_; }

 private:
  std::vector<Block> b_;
  std::vector<std::size_t> offset_;
  double horizon_ = 0;
  std::size_t next_ = 0;
  VecMoments<0> acc_;
  Scratch scr_;
};

/// Rectangle mixing: draw u ~ U[a1, a2] above y, flow for time t_k and score
/// whether the point lies in B x [b1, b2].  Because b2 <= essinf tau, the
/// condition u + t - tau_n in [b1, b2] already places the point in block n.
/// With integrate_u the indicator is replaced by its exact average over u
/// (the window form of the same quantity; no u is drawn).
class RectangleScorer {
 public:
  RectangleScorer(std::vector<double> t, const TargetSets& sets, bool integrate_u = false)
      : t_(std::move(t)), sets_(sets), integrate_(integrate_u), acc_(t_.size()), scr_(t_.size()) {
    if (!std::is_sorted(t_.begin(), t_.end())) throw domain_error("rectangle: times must be sorted");
  }
  RectangleScorer fresh() const { return RectangleScorer(t_, sets_, integrate_); }
  double horizon() const { return t_.empty() ? 0.0 : t_.back() + sets_.a2 - sets_.b1; }
  void begin(CounterRng& rng) {
    if (!integrate_) u_ = sets_.a1 + (sets_.a2 - sets_.a1) * rng.uniform();
  }
  bool visit(std::uint64_t, double tau, bool inB) {
    if (!inB) return true;
    // Need t_k in [tau + b1 - u, tau + b2 - u]; with integrate_u, u over [a1, a2].
    const double lo = tau + sets_.b1 - (integrate_ ? sets_.a2 : u_);
    const double hi = tau + sets_.b2 - (integrate_ ? sets_.a1 : u_);
    auto j = std::lower_bound(t_.begin(), t_.end(), lo) - t_.begin();
    for (; j < static_cast<long>(t_.size()) && t_[j] <= hi; ++j) {
      if (!integrate_) {
        scr_.add(j, 1.0);
      } else {
        const double ulo = std::max(sets_.a1, tau + sets_.b1 - t_[j]);
        const double uhi = std::min(sets_.a2, tau + sets_.b2 - t_[j]);
        if (uhi > ulo) scr_.add(j, (uhi - ulo) / (sets_.a2 - sets_.a1));
      }
    }
    return true;
  }
  void end() { scr_.flush(acc_); }
  void drop() { scr_.drop(); }
  void merge(const RectangleScorer& o) { acc_.merge(o.acc_); }
  const std::vector<double>& times() const { return t_; }
  const VecMoments<40>& moments() const { return acc_; }

 private:
  std::vector<double> t_;
  TargetSets sets_;
  bool integrate_;
  double u_ = 0;
  VecMoments<40> acc_;
  Scratch scr_;
};

/// Lebesgue time in B x [b1, b2] along [0, t_k], starting from (y, u), u ~ U[a1, a2].
class OccupationScorer {
 public:
  OccupationScorer(std::vector<double> t, const TargetSets& sets)
      : t_(std::move(t)), sets_(sets), acc_(t_.size()), diff_(t_.size() + 1, 0.0) {
    if (!std::is_sorted(t_.begin(), t_.end())) throw domain_error("occupation: times must be sorted");
  }
  OccupationScorer fresh() const { return OccupationScorer(t_, sets_); }
  double horizon() const { return t_.empty() ? 0.0 : t_.back() + sets_.a2; }
  void begin(CounterRng& rng) { u_ = sets_.a1 + (sets_.a2 - sets_.a1) * rng.uniform(); }
  bool visit(std::uint64_t, double tau, bool inB) {
    if (!inB) return true;
    // elapsed-time interval spent in B1 during block n
    const double x0 = std::max(0.0, tau + sets_.b1 - u_), x1 = tau + sets_.b2 - u_;
    if (x1 <= x0) return true;
    // full contribution for t_k >= x1; partial t_k - x0 for t_k in (x0, x1)
    const auto k1 = std::lower_bound(t_.begin(), t_.end(), x1) - t_.begin();
    diff_[k1] += x1 - x0;
    for (auto k = std::upper_bound(t_.begin(), t_.end(), x0) - t_.begin(); k < k1; ++k) partial_.push_back({static_cast<std::size_t>(k), t_[k] - x0});
    return true;
  }
  void end() {
    double c = 0;
    for (std::size_t k = 0; k < t_.size(); ++k) {
      c += diff_[k];
      double v = c;
      for (auto& p : partial_)
        if (p.first == k) v += p.second;
      if (v != 0) acc_.add(k, v);
    }
    std::fill(diff_.begin(), diff_.end(), 0.0);
    partial_.clear();
    acc_.add_sample();
  }
  void drop() {
    std::fill(diff_.begin(), diff_.end(), 0.0);
    partial_.clear();
  }
  void merge(const OccupationScorer& o) { acc_.merge(o.acc_); }
  const std::vector<double>& times() const { return t_; }
  const VecMoments<40>& moments() const { return acc_; }

 private:
  std::vector<double> t_;
  TargetSets sets_;
  double u_ = 0;
  VecMoments<40> acc_;
  std::vector<double> diff_;
  std::vector<std::pair<std::size_t, double>> partial_;
};

// ---------------------------------------------------------------------------
// Estimates.

struct RenewalEstimate {
  double t = 0, h = 0;
  double raw_mean = 0, stderr = 0;
  std::uint64_t n_samples = 0;
  double normalized = 0, target = 0, ratio = 0;
  std::uint64_t discards = 0;
};

/// What the normalizations need to know about the system.
struct RenewalContext {
  TargetSets sets;
  double mu_A = 1, mu_B = 1;
  TailModel tail;
  PassOptions pass;

  double d_beta() const { return renewal_constants(tail.beta, false).d_beta; }
  double D_beta() const { return renewal_constants(tail.beta, false).D_beta; }
  double m(double t) const {
    return t >= tail.t_min ? m_of_t(tail, t) : std::numeric_limits<double>::quiet_NaN();
  }
  double mu_tau_A1() const { return mu_A * (sets.a2 - sets.a1); }
  double mu_tau_B1() const { return mu_B * (sets.b2 - sets.b1); }
};

inline PassOptions with_sets(PassOptions p, const RenewalContext& ctx) {
  p.A = ctx.sets.A, p.B = ctx.sets.B;
  return p;
}

namespace detail {
template <class Acc>
RenewalEstimate raw_estimate(const Acc& acc, std::size_t k, double t, double h, const PassStats& st, double scale = 1.0) {
  RenewalEstimate e;
  e.t = t, e.h = h;
  e.raw_mean = acc.mean(k) * scale;
  e.stderr = acc.stderr_mean(k) * scale;
  e.n_samples = acc.count();
  e.discards = st.discards;
  return e;
}
inline void finish(RenewalEstimate& e, double normalized, double target) {
  e.normalized = normalized, e.target = target;
  e.ratio = target != 0 ? normalized / target : std::numeric_limits<double>::quiet_NaN();
}
}  // namespace detail

/// U(t + h) - U(t) for every window in one pass; normalized by m(t), target d_beta mu(A) mu(B) h.
template <class Driver>
std::vector<RenewalEstimate> estimate_renewal_windows(const Driver& d, const RenewalContext& ctx, const std::vector<Window>& w,
                                                      PassStats* stats = nullptr) {
  WindowScorer sc(w);
  const auto st = run_pass(d, with_sets(ctx.pass, ctx), sc);
  if (stats) *stats = st;
  std::vector<RenewalEstimate> out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    auto e = detail::raw_estimate(sc.moments(), k, w[k].t, w[k].h, st);
    detail::finish(e, ctx.m(w[k].t) * e.raw_mean, ctx.d_beta() * ctx.mu_A * ctx.mu_B * w[k].h);
    out.push_back(e);
  }
  return out;
}

template <class Driver>
RenewalEstimate estimate_renewal_window(const Driver& d, const RenewalContext& ctx, double t, double h) {
  return estimate_renewal_windows(d, ctx, {{t, h}}).front();
}

/// U(t) on a ladder; normalized by m(t)/t, target D_beta mu(A) mu(B).
template <class Driver>
std::vector<RenewalEstimate> estimate_renewal_cumulative(const Driver& d, const RenewalContext& ctx, const std::vector<double>& t,
                                                         PassStats* stats = nullptr) {
  CumulativeScorer sc(t);
  const auto st = run_pass(d, with_sets(ctx.pass, ctx), sc);
  if (stats) *stats = st;
  std::vector<RenewalEstimate> out;
  for (std::size_t k = 0; k < t.size(); ++k) {
    auto e = detail::raw_estimate(sc.moments(), k, t[k], 0.0, st);
    detail::finish(e, ctx.m(t[k]) / t[k] * e.raw_mean, ctx.D_beta() * ctx.mu_A * ctx.mu_B);
    out.push_back(e);
  }
  return out;
}

/// mu^tau(A1 and F_t^{-1} B1) on a ladder; normalized by m(t), target d_beta mu^tau(A1) mu^tau(B1).
/// window_form averages over u exactly instead of sampling it.
template <class Driver>
std::vector<RenewalEstimate> estimate_rectangle_mixing(const Driver& d, const RenewalContext& ctx, const std::vector<double>& t,
                                                       bool window_form = false, PassStats* stats = nullptr) {
  RectangleScorer sc(t, ctx.sets, window_form);
  const auto st = run_pass(d, with_sets(ctx.pass, ctx), sc);
  if (stats) *stats = st;
  std::vector<RenewalEstimate> out;
  const double a = ctx.sets.a2 - ctx.sets.a1;
  for (std::size_t k = 0; k < t.size(); ++k) {
    auto e = detail::raw_estimate(sc.moments(), k, t[k], 0.0, st, a);
    detail::finish(e, ctx.m(t[k]) * e.raw_mean, ctx.d_beta() * ctx.mu_tau_A1() * ctx.mu_tau_B1());
    out.push_back(e);
  }
  return out;
}

/// int_0^t mu^tau(A1 and F_x^{-1} B1) dx; normalized by m(t)/t, target D_beta mu^tau(A1) mu^tau(B1).
template <class Driver>
std::vector<RenewalEstimate> estimate_occupation_average(const Driver& d, const RenewalContext& ctx, const std::vector<double>& t,
                                                         PassStats* stats = nullptr) {
  OccupationScorer sc(t, ctx.sets);
  const auto st = run_pass(d, with_sets(ctx.pass, ctx), sc);
  if (stats) *stats = st;
  std::vector<RenewalEstimate> out;
  const double a = ctx.sets.a2 - ctx.sets.a1;
  for (std::size_t k = 0; k < t.size(); ++k) {
    auto e = detail::raw_estimate(sc.moments(), k, t[k], 0.0, st, a);
    detail::finish(e, ctx.m(t[k]) / t[k] * e.raw_mean, ctx.D_beta() * ctx.mu_tau_A1() * ctx.mu_tau_B1());
    out.push_back(e);
  }
  return out;
}

struct LaplaceEstimate {
  double sigma = 0, value = 0, stderr = 0;
  std::uint64_t n_samples = 0, discards = 0;
};

/// int e^{-sigma t} dU_{A,B}(t) by Monte Carlo.
template <class Driver>
std::vector<LaplaceEstimate> estimate_laplace(const Driver& d, const RenewalContext& ctx, const std::vector<double>& sigma,
                                              PassStats* stats = nullptr) {
  LaplaceScorer sc(sigma);
  const auto st = run_pass(d, with_sets(ctx.pass, ctx), sc);
  if (stats) *stats = st;
  std::vector<LaplaceEstimate> out;
  for (std::size_t k = 0; k < sigma.size(); ++k)
    out.push_back({sigma[k], sc.moments().mean(k), sc.moments().stderr_mean(k), sc.moments().count(), st.discards});
  return out;
}

struct LltRow {
  std::uint64_t n = 0;
  double t = 0, h = 0, d_n = 0;
  double raw_mean = 0, stderr = 0;
  double scaled = 0;  // d_n * raw / h
  double target = 0;  // window-averaged q_beta(t / d_n) mu(A) mu(B)
  double error = 0;   // scaled - target
};

inline double llt_scale(const TailModel& tail, double n) { return std::pow(tail.c0 * n, 1.0 / tail.beta); }

/// Fixed-n windows mu(y in A, F^n y in B, tau_n in [t, t+h]) against the stable profile.
template <class Driver>
std::vector<LltRow> estimate_llt_windows(const Driver& d, const RenewalContext& ctx, const StableLaw& q,
                                         const std::vector<LltScorer::Block>& blocks, PassStats* stats = nullptr) {
  LltScorer sc(blocks);
  const auto st = run_pass(d, with_sets(ctx.pass, ctx), sc);
  if (stats) *stats = st;
  std::vector<LltRow> out;
  for (std::size_t b = 0; b < sc.blocks().size(); ++b) {
    const auto& B = sc.blocks()[b];
    const double dn = llt_scale(ctx.tail, static_cast<double>(B.n));
    for (std::size_t j = 0; j < B.t.size(); ++j) {
      LltRow r;
      r.n = B.n, r.t = B.t[j], r.h = B.h, r.d_n = dn;
      r.raw_mean = sc.moments().mean(sc.offset(b) + j);
      r.stderr = sc.moments().stderr_mean(sc.offset(b) + j);
      r.scaled = dn * r.raw_mean / B.h;
      r.target = (B.n == 0 ? 0.0 : q.window_mean(B.t[j] / dn, (B.t[j] + B.h) / dn)) * ctx.mu_A * ctx.mu_B;
      r.error = r.scaled - r.target;
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace rlab
