#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "smla/types.h"

namespace smla {

// One trace record: `bubble_count` non-memory instructions followed by one
// memory access. Traces are post-LLC miss streams unless the optional LLC
// filter is enabled.
struct TraceEntry {
  std::uint64_t bubble_count = 0;
  std::uint64_t address = 0;
  AccessKind kind = AccessKind::Read;

  bool operator==(const TraceEntry&) const = default;
};

// Line-oriented text format: `<bubble_count> <hex-address> <R|W>` per line.
// Blank lines and `#` comments are skipped.
std::vector<TraceEntry> parse_trace(std::istream& in, const std::string& name);
std::vector<TraceEntry> load_trace(const std::string& path);
void write_trace(std::ostream& out, const std::vector<TraceEntry>& trace);

struct SyntheticTraceSpec {
  double target_mpki = 10.0;      // memory accesses per kilo-instruction
  double row_hit_fraction = 0.5;  // sequential (next line) vs random jumps
  double read_fraction = 0.67;
  std::uint64_t footprint_bytes = 1 << 20;
  std::uint64_t instructions = 1'000'000;
  std::uint64_t row_bytes = 1024;  // feasibility check only
  std::uint64_t seed = 1;
};

// Deterministic-by-seed trace whose realized MPKI tracks the target exactly
// (bubble counts come from an error-carrying accumulator, not sampling).
std::vector<TraceEntry> gen_synthetic(const SyntheticTraceSpec& spec);

double realized_mpki(const std::vector<TraceEntry>& trace);

struct LlcConfig {
  std::uint64_t size_bytes = 512 * 1024;
  int ways = 16;
  int line_bytes = kLineBytes;
};

// Set-associative LRU filter. Hits become bubbles; misses stay memory
// requests.
class Llc {
 public:
  explicit Llc(const LlcConfig& cfg);
  bool access(std::uint64_t address);  // true = hit
 private:
  int ways_;
  std::uint64_t sets_;
  int line_bytes_;
  std::vector<std::vector<std::uint64_t>> tags_;  // per set, MRU first
};

std::vector<TraceEntry> llc_filter(const std::vector<TraceEntry>& trace, const LlcConfig& cfg);

// Sum of per-core IPC(shared) / IPC(alone).
double weighted_speedup(const std::vector<double>& ipc_shared,
                        const std::vector<double>& ipc_alone);

struct CoreConfig {
  int window_entries = 128;
  int issue_width = 3;
  int mshrs = 8;
  std::uint64_t target_instructions = 1'000'000;
};

// In-order-retire core with an out-of-order-dispatch window, driven by a
// trace. Memory instructions dispatch a request when they enter the window
// (MSHR and queue-space permitting) and block retirement until it completes.
// Cores that hit their instruction target keep replaying the trace to hold
// pressure on the memory system.
class Core {
 public:
  // dispatch returns false when the memory system cannot accept the request
  // this cycle; the core stalls and retries.
  using DispatchFn =
      std::function<bool(int core_id, AccessKind kind, std::uint64_t address, std::uint64_t tag)>;

  Core(int id, CoreConfig cfg, std::vector<TraceEntry> trace, DispatchFn dispatch);

  void step(std::uint64_t core_cycle);
  void notify_complete(std::uint64_t tag);

  bool reached_target() const { return target_cycle_ != kNoCycle; }
  std::uint64_t target_cycle() const { return target_cycle_; }
  std::uint64_t target_instructions() const { return cfg_.target_instructions; }
  std::uint64_t retired_instructions() const { return retired_; }
  std::uint64_t dispatched_requests() const { return dispatched_; }
  std::uint64_t trace_length_instructions() const { return trace_instructions_; }
  int outstanding_misses() const { return mshrs_in_use_; }

  // IPC over the first target_instructions; 0 until the target is reached.
  double ipc() const;

 private:
  struct Slot {
    bool memory = false;
    bool done = true;
    std::uint64_t tag = 0;
  };

  bool fetch_one();
  void advance_trace();

  int id_;
  CoreConfig cfg_;
  std::vector<TraceEntry> trace_;
  DispatchFn dispatch_;

  std::uint64_t trace_instructions_ = 0;
  std::size_t trace_pos_ = 0;
  std::uint64_t bubbles_left_ = 0;

  std::vector<Slot> window_;
  std::size_t head_ = 0, tail_ = 0, in_window_ = 0;
  int mshrs_in_use_ = 0;
  std::uint64_t next_tag_ = 0;
  std::vector<std::pair<std::uint64_t, std::size_t>> pending_;  // tag -> slot index

  std::uint64_t retired_ = 0;
  std::uint64_t dispatched_ = 0;
  std::uint64_t target_cycle_ = kNoCycle;
};

}  // namespace smla
