#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/rng.hpp"

namespace rlab {

using cplx = std::complex<double>;

/// Compressed sparse rows of a complex matrix acting on row vectors (v -> vP).
struct CsrMatrix {
  int n = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<cplx> val;

  void left_multiply(const std::vector<cplx>& v, std::vector<cplx>& out) const {
    out.assign(n, cplx(0));
    for (int j = 0; j < n; ++j) {
      const cplx vj = v[j];
      if (vj == cplx(0)) continue;
      for (std::size_t e = row_ptr[j]; e < row_ptr[j + 1]; ++e) out[col[e]] += vj * val[e];
    }
  }

  void right_multiply(const std::vector<cplx>& u, std::vector<cplx>& out) const {
    out.assign(n, cplx(0));
    for (int j = 0; j < n; ++j) {
      cplx s = 0;
      for (std::size_t e = row_ptr[j]; e < row_ptr[j + 1]; ++e) s += val[e] * u[col[e]];
      out[j] = s;
    }
  }
};

enum class TwistMode {
  galerkin,   // entries E[e^{-s tau} 1{F y in k} | y in cell j]
  cell_mean,  // e^{-s taubar_j} P_jk
};

struct UlamOptions {
  int grid_size = 4096;
  int samples_per_cell = 16;
  std::uint64_t seed = 0;
  int max_refine = 4;          // extra levels of 4x sub-sampling
  double refine_oscillation = 8;  // refine cells where max tau - min tau exceeds this
  double refine_spread = 32;      // ... or where fewer than this many samples land per destination cell
};

/// Ulam discretization of an induced map (F, tau) on [lo, hi].  Every
/// sample's destination cell and roof value are kept so that the twisted
/// families can be rebuilt exactly for any s.
class UlamOperator {
 public:
  UlamOperator() = default;

  template <class Map>
  UlamOperator(const Map& F, double lo, double hi, const UlamOptions& opt) : n_(opt.grid_size), lo_(lo), hi_(hi) {
    if (opt.grid_size < 2) throw domain_error("build_ulam: grid_size must be >= 2");
    if (opt.samples_per_cell < 10) throw domain_error("build_ulam: samples_per_cell must be >= 10");
    dx_ = (hi - lo) / n_;
    row_ptr_.assign(n_ + 1, 0);
    tau_bar_.assign(n_, 0.0);
    tau_osc_.assign(n_, 0.0);
    level_.assign(n_, 0);
    std::vector<std::pair<std::uint32_t, double>> buf;
    std::vector<std::uint32_t> dest;
    for (int j = 0; j < n_; ++j) {
      int level = 0;
      for (;;) {
        buf.clear();
        const long m = static_cast<long>(opt.samples_per_cell) << (2 * level);
        CounterRng rng(opt.seed, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(level));
        double tmin = 1e300, tmax = -1e300;
        for (long i = 0; i < m; ++i) {
          const double y = lo + (j + (i + rng.uniform()) / m) * dx_;
          const auto [fy, tau] = F(y);
          const int k = cell(fy);
          buf.emplace_back(static_cast<std::uint32_t>(k), tau);
          tmin = std::min(tmin, tau);
          tmax = std::max(tmax, tau);
        }
        tau_osc_[j] = tmax - tmin;
        if (level >= opt.max_refine) break;
        dest.clear();
        for (auto& e : buf) dest.push_back(e.first);
        std::sort(dest.begin(), dest.end());
        const auto distinct = static_cast<double>(std::unique(dest.begin(), dest.end()) - dest.begin());
        const bool spread = opt.refine_spread > 0 && static_cast<double>(m) < opt.refine_spread * distinct;
        if (tau_osc_[j] <= opt.refine_oscillation && !spread) break;
        ++level;
      }
      level_[j] = level;
      std::sort(buf.begin(), buf.end());
      const double w = 1.0 / static_cast<double>(buf.size());
      double sum = 0;
      for (auto [k, tau] : buf) {
        to_.push_back(k);
        tau_.push_back(tau);
        sum += tau;
      }
      weight_.push_back(w);
      tau_bar_[j] = sum * w;
      row_ptr_[j + 1] = to_.size();
    }
    // aggregated untwisted matrix
    base_ = aggregate([](double) { return cplx(1.0); }, TwistMode::galerkin);
  }

  int size() const { return n_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double cell_width() const { return dx_; }
  std::size_t sample_count() const { return to_.size(); }
  const std::vector<double>& tau_bar() const { return tau_bar_; }
  const std::vector<double>& tau_oscillation() const { return tau_osc_; }
  const std::vector<int>& refine_level() const { return level_; }

  int cell(double y) const {
    const int k = static_cast<int>((y - lo_) / dx_);
    return std::clamp(k, 0, n_ - 1);
  }

  const CsrMatrix& untwisted() const { return base_; }

  /// P(s) with entries twisted by e^{-s tau}; s = i b gives the Fourier family.
  CsrMatrix twisted(cplx s, TwistMode mode = TwistMode::galerkin) const {
    if (s == cplx(0)) return base_;
    return aggregate([s](double tau) { return std::exp(-s * tau); }, mode);
  }

  /// Per-cell (destination, tau) samples of row j, for diagnostics.
  std::pair<std::size_t, std::size_t> samples_of(int j) const { return {row_ptr_[j], row_ptr_[j + 1]}; }
  std::uint32_t sample_dest(std::size_t i) const { return to_[i]; }
  double sample_tau(std::size_t i) const { return tau_[i]; }

 private:
  template <class Twist>
  CsrMatrix aggregate(Twist twist, TwistMode mode) const {
    CsrMatrix m;
    m.n = n_;
    m.row_ptr.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) {
      const double w = weight_[j];
      const cplx rowf = mode == TwistMode::cell_mean ? twist(tau_bar_[j]) : cplx(1.0);
      std::size_t i = row_ptr_[j];
      while (i < row_ptr_[j + 1]) {
        const std::uint32_t k = to_[i];
        cplx acc = 0;
        double cnt = 0;
        for (; i < row_ptr_[j + 1] && to_[i] == k; ++i) {
          if (mode == TwistMode::galerkin) acc += twist(tau_[i]);
          cnt += 1;
        }
        m.col.push_back(k);
        m.val.push_back(mode == TwistMode::galerkin ? acc * w : rowf * (cnt * w));
      }
      m.row_ptr[j + 1] = m.col.size();
    }
    return m;
  }

  int n_ = 0;
  double lo_ = 0, hi_ = 1, dx_ = 1;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> to_;
  std::vector<double> tau_, weight_, tau_bar_, tau_osc_;
  std::vector<int> level_;
  CsrMatrix base_;
};

template <class Map>
UlamOperator build_ulam(const Map& F, double lo, double hi, const UlamOptions& opt) {
  return UlamOperator(F, lo, hi, opt);
}

}  // namespace rlab
