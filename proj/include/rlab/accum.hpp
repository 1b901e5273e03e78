#pragma once

#include <cmath>
#include <cstdint>

namespace rlab {

/// Sample moments accumulated in fixed point so that merging shards is exact
/// and order independent.  Each sample is rounded to a multiple of 2^-Bits
/// before summation; the rounded values *are* the data of record.
template <int Bits = 32>
class FixedMoments {
 public:
  static constexpr double scale = static_cast<double>(1ULL << Bits);

  void add(double x) noexcept {
    const auto v = static_cast<std::int64_t>(std::llround(x * scale));
    sum_ += v;
    sumsq_ += static_cast<__int128>(v) * v;
    ++n_;
  }

  void merge(const FixedMoments& o) noexcept {
    sum_ += o.sum_;
    sumsq_ += o.sumsq_;
    n_ += o.n_;
  }

  std::uint64_t count() const noexcept { return n_; }

  double mean() const noexcept {
    return n_ ? static_cast<double>(sum_) / scale / static_cast<double>(n_) : 0.0;
  }

  /// Standard error of the mean (unbiased variance).
  double stderr_mean() const noexcept {
    if (n_ < 2) return 0.0;
    const long double n = static_cast<long double>(n_);
    const long double s = static_cast<long double>(sum_) / scale;
    const long double ss = static_cast<long double>(sumsq_) / (static_cast<long double>(scale) * scale);
    long double var = (ss - s * s / n) / (n - 1);
    if (var < 0) var = 0;
    return static_cast<double>(std::sqrt(var / n));
  }

  bool operator==(const FixedMoments&) const = default;

 private:
  __int128 sum_ = 0;
  __int128 sumsq_ = 0;
  std::uint64_t n_ = 0;
};

}  // namespace rlab
