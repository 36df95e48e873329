#pragma once

#include <cstdint>

namespace smla {

// Deterministic, platform-independent generator (splitmix64). Standard
// library distributions are implementation-defined, so anything that feeds
// reproducible traces or property tests goes through this instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound). Modulo bias is negligible for bound << 2^64.
  std::uint64_t next_below(std::uint64_t bound) { return bound ? next_u64() % bound : 0; }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bool(double p_true) { return next_double() < p_true; }

 private:
  std::uint64_t state_;
};

}  // namespace smla
