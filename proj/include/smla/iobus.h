#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "smla/types.h"

namespace smla {

// Geometry and clocking of one channel's TSV data bus.
struct IoBusConfig {
  IoScheme scheme = IoScheme::Baseline;
  RankOrg rank_org = RankOrg::SingleLayerRank;
  int layers = 4;          // L
  int io_width_bits = 128; // W, per channel
  int base_freq_mhz = 200; // F

  // All bus events run on the fast clock: F*L for the SMLA schemes, F for
  // the baseline.
  int fast_freq_mhz() const {
    return scheme == IoScheme::Baseline ? base_freq_mhz : base_freq_mhz * layers;
  }
  double fast_period_ns() const { return 1000.0 / fast_freq_mhz(); }

  // Bookkeeping granularity: W/L-bit TSV groups, one per layer. A full-width
  // transfer occupies all of them for one fast cycle.
  int group_count() const { return layers; }
  int group_width_bits() const { return io_width_bits / layers; }

  int full_width_beats_per_request() const { return kRequestBytes * 8 / io_width_bits; }

  void validate() const;  // throws ConfigError
};

// Clock frequency of one stack layer under a scheme. Cascaded-IO follows the
// divide-by-two ladder: the lower half of the stack at F*L, the next quarter
// at F*L/2, and so on, with the topmost layer at F.
int layer_clock_mhz(IoScheme scheme, int layer, int layers, int base_freq_mhz);

// Contiguous TSV index range [first, last) owned by a layer under
// Dedicated-IO. Throws ConfigError for the other schemes, which have no
// static groups.
struct TsvRange {
  int first;
  int last;
};
TsvRange tsv_group_for_layer(IoScheme scheme, int layer, int layers, int io_width_bits);

// Cascaded-IO single-layer-rank slot ownership: slot i of every L-cycle
// frame belongs to layer/rank i, bottom layer first.
int slot_owner(Cycle fast_cycle, int layers);

// Fraction of fast cycles carrying useful data through a layer's TSV
// segment under Cascaded-IO: layer i forwards the traffic of layers >= i.
double cascaded_layer_utilization(int layer, int layers);

// Minimum fast-cycle spacing between commands a layer can latch; commands
// are only accepted on that layer's (possibly divided) clock edges.
int command_issue_granularity(IoScheme scheme, int layer, int layers);

// One fast-cycle transfer on one TSV group, sourced by one layer.
struct Beat {
  Cycle cycle;
  std::uint16_t group;
  std::uint16_t layer;
  std::uint64_t request_id;
};

struct BeatSchedule {
  std::uint64_t request_id = 0;
  std::vector<Beat> beats;
  Cycle first_beat = kNoCycle;
  Cycle completion = kNoCycle;  // last beat cycle + 1
};

struct SlotConflict {
  Cycle cycle;
  int group;
};

// Verifies the no-double-drive invariant across schedules: no two beats may
// share a (fast_cycle, tsv_group) slot. A conflict is a return value, not an
// error; correct runs always get nullopt.
std::optional<SlotConflict> check_conflicts(std::span<const BeatSchedule> schedules);

// Per-channel data bus. Places each request's beats into the earliest legal
// conflict-free slots at or after its ready cycle, per the configured scheme
// and rank organization:
//
//   Baseline              4 consecutive full-width beats on the base clock
//   Dedicated-IO + MLR    4 consecutive full-width fast beats, each group
//                         driven by its own layer
//   Dedicated-IO + SLR    16 consecutive fast beats on the rank's group
//   Cascaded-IO  + MLR    4 consecutive full-width fast beats, pipelined
//                         bottom layer first
//   Cascaded-IO  + SLR    one full-width beat per owned slot (stride L)
class IoBus {
 public:
  explicit IoBus(IoBusConfig cfg, Cycle search_horizon = 4096);

  // nullopt means no placement with first_beat <= latest_first_beat (or
  // within the search horizon): the bus is saturated and the controller must
  // back off. Nothing is committed on failure.
  std::optional<BeatSchedule> schedule_burst(int rank, std::uint64_t request_id, Cycle ready,
                                             std::optional<Cycle> latest_first_beat = {});

  // Drops occupancy bookkeeping for slots before `cycle` (already drained).
  void forget_before(Cycle cycle);

  const IoBusConfig& config() const { return cfg_; }

  std::uint64_t beats_on_group(int group) const { return beats_per_group_[group]; }
  std::uint64_t beats_from_layer(int layer) const { return beats_per_layer_[layer]; }
  std::uint64_t total_beats() const { return total_beats_; }

 private:
  bool block_free(Cycle start, Cycle stride, int count, int group_first, int group_last) const;
  void commit(const BeatSchedule& s);

  IoBusConfig cfg_;
  Cycle horizon_;
  std::vector<std::set<Cycle>> occupied_;  // per group
  std::vector<std::uint64_t> beats_per_group_;
  std::vector<std::uint64_t> beats_per_layer_;
  std::uint64_t total_beats_ = 0;
};

}  // namespace smla
