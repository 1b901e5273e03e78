#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace rlab {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the stream for sample `index` of `stream` under a
/// given seed is a pure function of those three numbers.  Shards that split
/// the index range therefore reproduce the single-run draws exactly.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept
      : key_(splitmix64(splitmix64(seed ^ 0x6a09e667f3bcc909ULL) ^ splitmix64(stream + 0x3c6ef372fe94f82bULL)) ^
             splitmix64(index * 0xd1b54a32d192ed03ULL + 0xa54ff53a5f1d36f1ULL)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1].
  double uniform_pos() noexcept { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

  double exponential() noexcept { return -std::log(uniform_pos()); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rlab
