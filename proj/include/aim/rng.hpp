#pragma once

#include <cstdint>
#include <limits>

namespace aim {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of an independent child stream, keyed by (parent seed, index).
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

/// Maps 64 random bits to a double in [0, 1).
inline constexpr double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// SplitMix64; a small UniformRandomBitGenerator whose streams are cheap to
/// create, so every RR-set sample and every replicate can own one.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  double uniform() { return to_unit((*this)()); }
  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    // Lemire's multiply-shift; the bias is below 2^-64 * bound and irrelevant here.
    __extension__ using u128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<u128>((*this)()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
};

/// Live/dead draw for an edge that depends only on (key, edge id), so two
/// processes sharing a key see the same full realization.
inline constexpr bool keyed_live(std::uint64_t key, std::uint64_t edge, double p) {
  return to_unit(mix64(derive_seed(key, edge))) < p;
}

}  // namespace aim
