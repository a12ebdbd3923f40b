#include "vqsim/rng.hpp"

#include <cmath>

namespace vqsim {

namespace {
constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

uint64_t SplitMix64::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double SplitMix64::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SplitMix64::next_uniform(double half_width) {
  return (2.0 * next_double() - 1.0) * half_width;
}

double SplitMix64::next_exponential(double mean) {
  // next_double() < 1, so the log argument stays positive.
  return -mean * std::log(1.0 - next_double());
}

SplitMix64 packet_stream(uint64_t seed, uint64_t index) {
  return SplitMix64(mix64(seed ^ mix64(index + 1)));
}

uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b) {
  uint64_t h = mix64(master ^ kGolden);
  h = mix64(h ^ (a + kGolden));
  h = mix64(h ^ (b + 2 * kGolden));
  return h;
}

}  // namespace vqsim
