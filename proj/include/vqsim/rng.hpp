#ifndef VQSIM_RNG_HPP_
#define VQSIM_RNG_HPP_

#include <cstdint>

namespace vqsim {

// SplitMix64 (Steele/Lea/Flood mixer, Vigna's constants). Chosen over
// <random> engines because the standard distributions are not bit-portable
// across library implementations; every draw here is fully specified, so a
// (seed, packet index) pair reproduces the same channel on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64();

  // Uniform in [0, 1), 53 mantissa bits.
  double next_double();

  // Uniform in [-half_width, +half_width].
  double next_uniform(double half_width);

  // Exponential with the given mean, inverse-CDF method.
  double next_exponential(double mean);

 private:
  uint64_t state_;
};

// Stateless avalanche of one 64-bit word (the SplitMix64 output function).
uint64_t mix64(uint64_t x);

// Independent per-packet stream: packet `index` under `seed` draws from
// SplitMix64 seeded with mix64(seed ^ mix64(index + 1)). Streams never
// overlap regardless of how many values each packet consumes.
SplitMix64 packet_stream(uint64_t seed, uint64_t index);

// Derived seed for sweep jobs: hash of (master, point index, run index).
uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b);

}  // namespace vqsim

#endif  // VQSIM_RNG_HPP_
