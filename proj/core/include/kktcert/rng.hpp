#pragma once

#include <cstdint>

namespace kktcert {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen for the certificate trail:
// pure 64-bit integer arithmetic, so identical seeds give bit-identical
// sample sequences on every platform. The generator name is recorded in
// every emitted certificate.
class SplitMix64 {
 public:
  static constexpr const char* kName = "splitmix64";

  explicit SplitMix64(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + next_double() * (hi - lo);
  }

  // Independent child stream: the child seed mixes the parent seed with the
  // stream id, not the parent position, so split trees are reproducible.
  SplitMix64 split(std::uint64_t stream) const {
    SplitMix64 mixer(seed_ ^ (0xA0761D6478BD642FULL + stream * 0xE7037ED1A0B428DBULL));
    return SplitMix64(mixer.next_u64());
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace kktcert
