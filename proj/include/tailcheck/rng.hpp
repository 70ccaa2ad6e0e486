#pragma once

#include <array>
#include <cstdint>

namespace tailcheck {

// SplitMix64 finalizer. Used both to expand seeds and to derive sub-seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives the seed of one independent work item (a grid cell, a chain...)
/// from the run seed. The mix is
///
///   s = global; s = splitmix64(s ^ stage * 0x9E3779B97F4A7C15)
///   s = splitmix64(s ^ (index + 1) * 0xBF58476D1CE4E5B9)
///
/// so results never depend on how work is scheduled.
std::uint64_t mix_seed(std::uint64_t global, std::uint64_t index,
                       std::uint64_t stage);

/// xoshiro256** 1.0 (Blackman & Vigna), state expanded from a 64-bit seed
/// with SplitMix64. Outputs are fixed across platforms and compilers.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  // Uniform on the open interval (0, 1): ((x >> 11) + 0.5) * 2^-53.
  double uniform();
  // Standard normal by the Box-Muller transform (two uniforms per value).
  double normal();

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace tailcheck
