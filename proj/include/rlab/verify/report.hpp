#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <string>
#include <utility>
#include <vector>

namespace rlab {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    default: return "INCONCLUSIVE";
  }
}

/// One verdict against a named criterion with its tolerance band [lo, hi].
struct Check {
  std::string criterion;  // e.g. "srt.final_ratio"
  std::string tolerance;  // human-readable statement of the band
  double value = 0, lo = 0, hi = 0;
  Verdict verdict = Verdict::fail;
  std::string note;
};

inline Check band_check(std::string criterion, double value, double lo, double hi, std::string tolerance = "") {
  Check c;
  c.criterion = std::move(criterion);
  c.value = value, c.lo = lo, c.hi = hi;
  c.tolerance = tolerance.empty() ? "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]" : std::move(tolerance);
  c.verdict = value >= lo && value <= hi ? Verdict::pass : Verdict::fail;
  return c;
}

/// Plot-ready numeric table; emitted as CSV.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  std::string experiment_id;
  std::vector<std::pair<std::string, std::string>> config;  // full config echo
  std::vector<std::pair<std::string, std::string>> system;  // derived description (beta, c0, x*, ...)
  std::deque<Table> tables;  // stable references while tables are added
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, double>> timings;  // seconds; excluded from determinism
  std::uint64_t seed = 0;

  Table& table(const std::string& name, std::vector<std::string> cols) {
    tables.push_back({name, std::move(cols), {}});
    return tables.back();
  }

  Verdict verdict() const {
    bool inconclusive = false;
    for (const auto& c : checks) {
      if (c.verdict == Verdict::fail) return Verdict::fail;
      if (c.verdict == Verdict::inconclusive) inconclusive = true;
    }
    return inconclusive ? Verdict::inconclusive : Verdict::pass;
  }

  const Check* find(const std::string& criterion) const {
    for (const auto& c : checks)
      if (c.criterion == criterion) return &c;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Kendall trend test of a sequence against its index.

struct KendallResult {
  int n = 0;
  long S = 0;          // concordant minus discordant pairs (positive = increasing)
  double tau = 0;      // S / (n(n-1)/2)
  double p_up = 1;     // P(S >= observed) under exchangeability
  double p_down = 1;   // P(S <= observed)
  bool exact = true;   // false when ties forced the normal approximation
};

/// Number of permutations of n items with k inversions (Mahonian numbers), as
/// probabilities; exact for n up to a few hundred.
inline std::vector<double> inversion_distribution(int n) {
  std::vector<double> p{1.0};
  for (int m = 2; m <= n; ++m) {
    std::vector<double> q(p.size() + m - 1, 0.0);
    // q[k] = (1/m) sum_{j=0}^{m-1} p[k-j], via a running window
    double window = 0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      if (k < p.size()) window += p[k];
      if (k >= static_cast<std::size_t>(m) && k - m < p.size()) window -= p[k - m];
      q[k] = window / m;
    }
    p.swap(q);
  }
  return p;
}

inline KendallResult kendall_trend(const std::vector<double>& x) {
  KendallResult r;
  r.n = static_cast<int>(x.size());
  if (r.n < 2) return r;
  long ties = 0;
  for (int i = 0; i < r.n; ++i)
    for (int j = i + 1; j < r.n; ++j) {
      if (x[j] > x[i]) ++r.S;
      else if (x[j] < x[i]) --r.S;
      else ++ties;
    }
  const double pairs = 0.5 * r.n * (r.n - 1);
  r.tau = r.S / pairs;
  if (ties == 0) {
    // S = pairs - 2 * inversions
    const auto dist = inversion_distribution(r.n);
    const long inv = static_cast<long>(std::lround((pairs - r.S) / 2));
    double le = 0, ge = 0;
    for (long k = 0; k < static_cast<long>(dist.size()); ++k) {
      if (k <= inv) ge += dist[k];  // fewer inversions = larger S
      if (k >= inv) le += dist[k];
    }
    r.p_up = std::min(1.0, ge);
    r.p_down = std::min(1.0, le);
  } else {
    r.exact = false;
    std::vector<double> s = x;
    std::sort(s.begin(), s.end());
    double tie_term = 0;
    for (std::size_t i = 0; i < s.size();) {
      std::size_t j = i;
      while (j < s.size() && s[j] == s[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * (t - 1) * (2 * t + 5);
      i = j;
    }
    const double n = r.n;
    const double var = (n * (n - 1) * (2 * n + 5) - tie_term) / 18.0;
    if (var <= 0) return r;
    const double sd = std::sqrt(var);
    auto upper = [&](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); };
    r.p_up = upper((r.S - 1) / sd);  // continuity corrected
    r.p_down = upper((-r.S - 1) / sd);
  }
  return r;
}

/// "Non-increasing at level alpha": no significant increasing trend.
inline Check trend_check(std::string criterion, const std::vector<double>& seq, double alpha = 0.10) {
  const auto k = kendall_trend(seq);
  Check c;
  c.criterion = std::move(criterion);
  c.value = k.p_up;
  c.lo = alpha, c.hi = 1.0;
  c.tolerance = "Kendall one-sided p(increasing) > " + std::to_string(alpha);
  c.verdict = k.n >= 3 ? (k.p_up > alpha ? Verdict::pass : Verdict::fail) : Verdict::inconclusive;
  c.note = "tau=" + std::to_string(k.tau) + " p_down=" + std::to_string(k.p_down) + " n=" + std::to_string(k.n);
  return c;
}

}  // namespace rlab
