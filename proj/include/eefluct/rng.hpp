#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace eefluct {

/// Pseudorandom stream used everywhere in the library.
///
/// Wraps mt19937_64 (whose output sequence is fixed by the standard) and
/// converts raw words to doubles by hand, so a given seed produces the same
/// numbers on every platform and standard library.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Seed for child stream `index` of `master`: first 8 bytes of
/// SHA-256(master || index), both encoded little-endian.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace eefluct
