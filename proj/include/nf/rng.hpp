#pragma once

#include <cmath>
#include <cstdint>

namespace nf {

// Counter-based Gaussian stream. Every draw is a pure function of
// (seed, path_index, step_index, point slot), so ensembles are reproducible
// under any thread schedule and any evaluation order. The generator is
// Philox2x64-10 with the standard multiplier and Weyl constant; the two
// output words feed one Box-Muller cosine draw.
//
// Slot conventions used by the noise module:
//   step_index 0        reserved for initial-condition randomness
//   step_index s >= 1   the s-th solver step
//   point slot          flat grid index (white noise) or mode index (Q-Wiener)
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  std::uint64_t step_index = 0;

  RngStream at_step(std::uint64_t s) const { return {seed, path_index, s}; }

  // Raw 128-bit Philox block for the given point slot.
  void block(std::uint64_t point, std::uint64_t& r0, std::uint64_t& r1) const {
    std::uint64_t x0 = path_index;
    std::uint64_t x1 = (step_index << 32) ^ point;
    std::uint64_t key = seed;
    for (int round = 0; round < 10; ++round) {
      const unsigned __int128 prod =
          static_cast<unsigned __int128>(x0) * 0xD2B74407B1CE6E93ULL;
      const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
      const std::uint64_t lo = static_cast<std::uint64_t>(prod);
      x0 = hi ^ key ^ x1;
      x1 = lo;
      key += 0x9E3779B97F4A7C15ULL;
    }
    r0 = x0;
    r1 = x1;
  }

  // Uniform in the open interval (0,1). 52 bits plus a half-ulp offset keep
  // every value exactly representable, so neither endpoint can round in.
  static double to_open01(std::uint64_t x) {
    return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
  }

  // One standard normal per (seed, path, step, point) tuple.
  double normal(std::uint64_t point) const {
    std::uint64_t r0, r1;
    block(point, r0, r1);
    const double u1 = to_open01(r0);
    const double u2 = to_open01(r1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }
};

}  // namespace nf
