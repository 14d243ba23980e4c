#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace sparsetd {

/// Counter-based random stream keyed by (seed, replicate, stream). Output k
/// is splitmix64(key + k * golden), so any stream can be reproduced without
/// replaying others; parallel schedules cannot perturb draws.
class KeyedStream {
 public:
  using result_type = std::uint64_t;

  KeyedStream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream)
      : key_(mix(mix(mix(seed) ^ (replicate + 0x632be59bd9b4e019ULL)) ^
                 (stream + 0x9e3779b97f4a7c15ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (++counter_) * kGolden); }

  /// Standard normal draw.
  double normal() { return normal_(*this); }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_;
};

}  // namespace sparsetd
