#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace smla {

using Cycle = std::uint64_t;

inline constexpr Cycle kNoCycle = ~Cycle{0};

// One 64-byte transaction, fixed by the bus geometry.
inline constexpr int kRequestBytes = 64;
inline constexpr int kLineBytes = 64;

enum class IoScheme { Baseline, DedicatedIo, CascadedIo };
enum class RankOrg { SingleLayerRank, MultiLayerRank };
enum class AccessKind { Read, Write };

const char* to_string(IoScheme s);
const char* to_string(RankOrg o);
const char* to_string(AccessKind k);

// Configuration/validation failures; message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal consistency violations (e.g. a timing-illegal command reaching
// the device). These indicate a simulator bug, never a bad input.
class SimError : public std::logic_error {
 public:
  explicit SimError(const std::string& msg) : std::logic_error(msg) {}
};

inline bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline int log2_exact(std::uint64_t v) {
  int n = 0;
  while (v > 1) {
    v >>= 1;
    ++n;
  }
  return n;
}

}  // namespace smla
