#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <tuple>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/renewal/drivers.hpp"
#include "rlab/renewal/sets.hpp"
#include "rlab/rng.hpp"

namespace rlab {

/// Per-entry sample moments over a common set of samples, in fixed point.
/// Entries a sample does not touch count as zeros, so orbit scoring only
/// pays for the entries it hits.
template <int Bits>
class VecMoments {
 public:
  static constexpr double scale = static_cast<double>(1ULL << Bits);

  explicit VecMoments(std::size_t k = 0) : sum_(k, 0), sumsq_(k, 0) {}

  void add(std::size_t k, double x) {
    const auto v = static_cast<std::int64_t>(std::llround(x * scale));
    sum_[k] += v;
    sumsq_[k] += static_cast<__int128>(v) * v;
  }
  void add_sample() { ++n_; }

  void merge(const VecMoments& o) {
    for (std::size_t i = 0; i < sum_.size(); ++i) sum_[i] += o.sum_[i], sumsq_[i] += o.sumsq_[i];
    n_ += o.n_;
  }

  std::size_t size() const { return sum_.size(); }
  std::uint64_t count() const { return n_; }

  double mean(std::size_t k) const {
    return n_ ? static_cast<double>(static_cast<long double>(sum_[k]) / scale / static_cast<long double>(n_)) : 0.0;
  }

  double stderr_mean(std::size_t k) const {
    if (n_ < 2) return 0.0;
    const long double n = static_cast<long double>(n_);
    const long double s = static_cast<long double>(sum_[k]) / scale;
    const long double ss = static_cast<long double>(sumsq_[k]) / (static_cast<long double>(scale) * scale);
    const long double var = std::max<long double>(0, (ss - s * s / n) / (n - 1));
    return static_cast<double>(std::sqrt(var / n));
  }

  bool operator==(const VecMoments&) const = default;

 private:
  std::vector<__int128> sum_, sumsq_;
  std::uint64_t n_ = 0;
};

/// Per-orbit scratch: accumulates into touched entries, flushed at orbit end.
struct Scratch {
  std::vector<double> val;
  std::vector<std::uint32_t> touched;
  explicit Scratch(std::size_t k = 0) : val(k, 0.0) {}
  void add(std::size_t k, double x) {
    if (val[k] == 0.0) touched.push_back(static_cast<std::uint32_t>(k));
    val[k] += x;
  }
  template <int Bits>
  void flush(VecMoments<Bits>& acc) {
    for (auto k : touched) {
      if (val[k] != 0.0) acc.add(k, val[k]);
      val[k] = 0.0;
    }
    touched.clear();
    acc.add_sample();
  }
  void drop() {
    for (auto k : touched) val[k] = 0.0;
    touched.clear();
  }
};

struct PassOptions {
  std::uint64_t N = 10000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;    // separates experiments sharing a seed
  int shards = 1;              // index-range partitions, merged exactly
  int threads = 1;
  const MeasureSampler* start = nullptr;  // draw y from this instead of mu
  Interval A{0, 1}, B{0, 1};
  bool everywhere = false;     // A = B = whole space (i.i.d. mode)
};

struct PassStats {
  std::uint64_t samples = 0;
  std::uint64_t discards = 0;
  std::uint64_t induced_steps = 0;
};

namespace detail {

template <class Driver, class... S>
PassStats run_range(const Driver& d, const PassOptions& o, std::uint64_t begin, std::uint64_t end, S&... sc) {
  PassStats st;
  const double horizon = std::max({sc.horizon()...});
  for (std::uint64_t i = begin; i < end; ++i) {
    CounterRng rng(o.seed, o.stream, i);
    double y = o.start ? d.start_in(*o.start, rng) : d.start(rng);
    (sc.begin(rng), ...);
    const bool inA = o.everywhere || o.A.contains(y);
    if (!inA) {
      (sc.end(), ...);
      ++st.samples;
      continue;
    }
    try {
      double tau = 0;
      std::uint64_t n = 0;
      for (;;) {
        const bool inB = o.everywhere || o.B.contains(y);
        bool more = false;
        ((more = sc.visit(n, tau, inB) || more), ...);
        if (!more) break;
        const auto s = d.step(y, rng, horizon - tau);
        if (s.censored) break;
        tau += s.tau;
        y = s.y_next;
        ++n;
        if (tau > horizon) break;
      }
      st.induced_steps += n;
      (sc.end(), ...);
      ++st.samples;
    } catch (const truncation_error&) {
      (sc.drop(), ...);
      ++st.discards;
    }
  }
  return st;
}

}  // namespace detail

/// Runs N orbits through all scorers.  Sample i always uses the counter
/// stream (seed, stream, i), and accumulators merge exactly, so the result
/// does not depend on the shard or thread plan.
template <class Driver, class... S>
PassStats run_pass(const Driver& d, const PassOptions& o, S&... sc) {
  const int shards = std::max(1, o.shards);
  std::vector<std::tuple<S...>> parts(shards, std::tuple<S...>(sc.fresh()...));
  std::vector<PassStats> stats(shards);
  auto work = [&](int s) {
    const std::uint64_t b = o.N * s / shards, e = o.N * (s + 1) / shards;
    std::apply([&](auto&... p) { stats[s] = detail::run_range(d, o, b, e, p...); }, parts[s]);
  };
  const int threads = std::max(1, std::min(o.threads, shards));
  if (threads == 1) {
    for (int s = 0; s < shards; ++s) work(s);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (int s = t; s < shards; s += threads) work(s);
      });
    for (auto& th : pool) th.join();
  }
  PassStats total;
  for (int s = 0; s < shards; ++s) {
    std::apply([&](auto&... p) { (sc.merge(p), ...); }, parts[s]);
    total.samples += stats[s].samples;
    total.discards += stats[s].discards;
    total.induced_steps += stats[s].induced_steps;
  }
  return total;
}

}  // namespace rlab
