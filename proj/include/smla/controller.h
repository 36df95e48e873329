#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "smla/device.h"
#include "smla/energy.h"
#include "smla/iobus.h"
#include "smla/types.h"

namespace smla {

struct DecodedAddress {
  int channel = 0;
  int rank = 0;
  int bank = 0;
  std::uint64_t row = 0;
  std::uint64_t column = 0;  // line index within the row

  bool operator==(const DecodedAddress&) const = default;
};

// Bit-sliced byte-address mapping, low to high:
//   byte-in-line (6) | channel | column | bank | rank | row
// Channel bits lowest for channel parallelism on streams; rank above bank so
// single-layer ranks expose rank-level parallelism. Bijective over the
// configured capacity.
class AddressMap {
 public:
  AddressMap(int channels, int ranks, int banks, std::uint64_t rows,
             std::uint64_t lines_per_row);

  DecodedAddress decode(std::uint64_t address) const;  // throws beyond capacity
  std::uint64_t encode(const DecodedAddress& d) const;
  std::uint64_t capacity_bytes() const { return capacity_; }

  int channels() const { return channels_; }
  int ranks() const { return ranks_; }
  int banks() const { return banks_; }
  std::uint64_t rows() const { return rows_; }
  std::uint64_t lines_per_row() const { return lines_; }

 private:
  int channels_, ranks_, banks_;
  std::uint64_t rows_, lines_;
  std::uint64_t capacity_;
};

struct MemRequest {
  std::uint64_t id = 0;
  int core_id = 0;
  AccessKind kind = AccessKind::Read;
  std::uint64_t address = 0;
  Cycle arrival = 0;  // fast cycle
  DecodedAddress decoded;

  Cycle first_beat = kNoCycle;  // filled on service
  Cycle last_beat = kNoCycle;
  std::uint64_t token = 0;  // opaque write payload / read result

  bool needed_row_work = false;  // serviced via PRE/ACT (row miss)
  bool retired = false;

  Cycle completion() const { return last_beat == kNoCycle ? kNoCycle : last_beat + 1; }
};

// First-Ready FCFS over a queue snapshot: among requests whose next required
// command is timing-legal at `now` on its bank, prefer row hits, breaking
// ties by (arrival, id). Returns an index into `queue`. Pure; bank timing
// only -- the channel layers bus availability and command-edge gating on top.
std::optional<std::size_t> frfcfs_select(std::span<MemRequest* const> queue,
                                         const std::vector<std::vector<BankState>>& banks,
                                         Cycle now);

struct ChannelConfig {
  IoBusConfig bus;
  TimingParams timing;
  int ranks = 4;
  int banks_per_rank = 2;
  std::size_t queue_capacity = 64;
  std::size_t write_watermark = 48;
  Cycle max_burst_lead = 64;           // bus back-pressure window
  double power_down_threshold_ns = 0;  // 0 = power-down disabled
  // Cores sharing this channel. Above 1, same-readiness candidates are
  // arbitrated with a rotating core priority so no core drafts permanently
  // behind another; 1 keeps plain oldest-first.
  int fairness_cores = 1;
  // Periodic rank-unavailability injection (no commands accepted while a
  // window is open). Both zero by default: the modeled device needs no
  // refresh, but the hook allows studying its cost.
  double unavailable_every_ns = 0;
  double unavailable_for_ns = 0;

  void validate() const;
};

struct ChannelStats {
  std::uint64_t reads_retired = 0;
  std::uint64_t writes_retired = 0;
  std::uint64_t bytes_transferred = 0;
  std::uint64_t row_hits = 0;
  std::uint64_t row_misses = 0;
  std::uint64_t act_cmds = 0;
  std::uint64_t pre_cmds = 0;
  std::uint64_t rd_cmds = 0;
  std::uint64_t wr_cmds = 0;
  std::uint64_t rejected_enqueues = 0;
  double latency_ns_sum = 0;
  std::uint64_t latency_samples = 0;

  double avg_latency_ns() const {
    return latency_samples ? latency_ns_sum / latency_samples : 0.0;
  }
  double row_hit_rate() const {
    const auto n = row_hits + row_misses;
    return n ? static_cast<double>(row_hits) / n : 0.0;
  }
};

// One channel: read/write queues, FR-FCFS command generation against the
// per-bank timing state machines, burst handoff to the TSV bus, and energy
// state tracking for the channel's stack layers.
class Channel {
 public:
  Channel(int index, const ChannelConfig& cfg);

  bool enqueue(MemRequest* req);
  void step(Cycle now, std::vector<MemRequest*>& completed);

  bool drained() const { return read_q_.empty() && write_q_.empty() && in_flight_.empty(); }
  std::size_t read_queue_size() const { return read_q_.size(); }
  std::size_t write_queue_size() const { return write_q_.size(); }

  const ChannelStats& stats() const { return stats_; }
  const IoBus& bus() const { return bus_; }
  const std::vector<std::vector<BankState>>& banks() const { return banks_; }

  // Closes open residency spans at `end_cycle` and hands out the ledger.
  EnergyLedger finish(Cycle end_cycle);

 private:
  struct InFlight {
    Cycle completion;
    MemRequest* req;
  };

  CommandKind next_required(const MemRequest& req, const BankState& bank) const;
  bool command_edge(int rank, Cycle now) const;
  bool rank_available(int rank, Cycle now) const;
  bool hazard_blocked(const MemRequest& req) const;
  void issue_column(MemRequest* req, CommandKind kind, Cycle now, const BeatSchedule& sched);
  void record_op_for_rank(int rank, DramOp op);
  void sync_layer_states(Cycle now);
  void close_span(int layer, Cycle now);
  std::uint64_t line_of(const MemRequest& req) const { return req.address / kLineBytes; }

  int index_;
  ChannelConfig cfg_;
  TimingCycles timing_;
  IoBus bus_;
  std::vector<std::vector<BankState>> banks_;  // [rank][bank]
  std::deque<MemRequest*> read_q_;
  std::deque<MemRequest*> write_q_;
  std::vector<InFlight> in_flight_;
  std::unordered_map<std::uint64_t, std::uint64_t> store_;  // line -> token

  EnergyLedger ledger_;
  std::vector<StandbyState> layer_state_;
  std::vector<Cycle> layer_since_;

  ChannelStats stats_;
  Cycle last_forget_ = 0;
  int rr_token_ = 0;  // core whose candidates rank first on the next grant
  std::vector<Cycle> last_cmd_cycle_;  // per rank, for command-clock pacing
  Cycle unavail_period_ = 0;
  Cycle unavail_len_ = 0;
};

}  // namespace smla
