#pragma once

#include <cstdint>
#include <limits>

#include "ghzsim/types.hpp"

namespace ghzsim {

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream keyed by (seed, stream, trial).
///
/// Every Monte-Carlo trial owns one of these, so the draws a trial sees do
/// not depend on which worker lane runs it or in what order. The stream id
/// separates independent experiments sharing a seed (e.g. grid points).
/// Output i of a stream is mix64(key + (i + 1) * gamma), i.e. SplitMix64
/// started at the derived key.
class TrialRng {
 public:
  using result_type = std::uint64_t;

  TrialRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial) noexcept
      : state_(mix64(mix64(seed ^ mix64(stream + golden)) + trial * golden)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += golden;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  Bit bit() noexcept { return static_cast<Bit>((*this)() >> 63); }

 private:
  static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

}  // namespace ghzsim
