#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rlab/dynamics/induced.hpp"

namespace rlab {

struct PeriodicOrbit {
  std::vector<int> itinerary;  // return times sigma along the orbit
  double y = 0;                // periodic point of F
  double period = 0;           // flow period tau_k(y)
};

struct PeriodRatio {
  std::size_t i, j;
  double ratio;
  long p, q;       // best rational approximation with q <= max_den
  double distance;  // |ratio - p/q|
};

struct PeriodicReport {
  std::vector<PeriodicOrbit> orbits;
  std::vector<PeriodRatio> ratios;
  std::vector<std::string> notices;
};

/// Inverse of the branch of F on which sigma = n: y with F(y) = w.
inline double inverse_branch(const IntermittentMapSpec& s, int n, double w) {
  double x = w;
  for (int i = 1; i < n; ++i) x = s.left_inverse(x);
  if (x > s.c1) return std::nan("");
  return s.right_inverse(x);
}

inline std::pair<long, long> best_rational(double r, long max_den) {
  long bp = std::lround(r), bq = 1;
  double best = std::abs(r - bp);
  for (long q = 2; q <= max_den; ++q) {
    const long p = std::lround(r * q);
    const double d = std::abs(r - static_cast<double>(p) / q);
    if (d < best - 1e-15) best = d, bp = p, bq = q;
  }
  return {bp, bq};
}

/// Periodic points of F for all itineraries of length k <= k_max with return
/// times in [1, n_max] (up to cyclic rotation).  Each is found as the fixed
/// point of the composed inverse branches, which contract; every inverse
/// branch is evaluated by bisection.
inline PeriodicReport periodic_orbit_periods(const InducedSystem& sys, int k_max, int n_max = 3, long max_den = 100) {
  const auto& s = sys.spec();
  PeriodicReport rep;
  for (int k = 1; k <= k_max; ++k) {
    std::vector<int> it(k, 1);
    for (;;) {
      // smallest rotation of a primitive word represents each orbit once
      bool canonical = true;
      for (int r = 1; r < k && canonical; ++r) {
        int cmp = 0;
        for (int i = 0; i < k && cmp == 0; ++i) cmp = (it[(i + r) % k] > it[i]) - (it[(i + r) % k] < it[i]);
        if (cmp <= 0) canonical = false;
      }
      if (canonical) {
        double y = 0.5 * (s.x_star + 1);
        bool ok = true;
        for (int iter = 0; iter < 400 && ok; ++iter) {
          double w = y;
          for (int i = k - 1; i >= 0 && ok; --i) {
            w = inverse_branch(s, it[i], w);
            ok = std::isfinite(w);
          }
          if (!ok) break;
          const double d = std::abs(w - y);
          y = w;
          if (d < 1e-15) break;
        }
        if (!ok || y >= 1.0 - 1e-12) {
          std::string str;
          for (int v : it) str += std::to_string(v) + " ";
          rep.notices.push_back("no interior periodic point for itinerary " + str);
        } else {
          PeriodicOrbit o{it, y, 0.0};
          double z = y;
          for (int i = 0; i < k; ++i) {
            const auto st = sys.first_return(z);
            o.period += st.tau;
            z = st.F_y;
          }
          rep.orbits.push_back(o);
        }
      }
      int pos = k - 1;
      while (pos >= 0 && it[pos] == n_max) it[pos--] = 1;
      if (pos < 0) break;
      ++it[pos];
    }
  }
  for (std::size_t i = 0; i < rep.orbits.size(); ++i)
    for (std::size_t j = i + 1; j < rep.orbits.size(); ++j) {
      const double r = rep.orbits[i].period / rep.orbits[j].period;
      const auto [p, q] = best_rational(r, max_den);
      rep.ratios.push_back({i, j, r, p, q, std::abs(r - static_cast<double>(p) / q)});
    }
  return rep;
}

}  // namespace rlab
