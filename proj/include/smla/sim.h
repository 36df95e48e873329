#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "smla/config.h"
#include "smla/controller.h"
#include "smla/energy.h"
#include "smla/frontend.h"
#include "smla/types.h"

namespace smla {

struct CoreReport {
  std::uint64_t target_instructions = 0;
  std::uint64_t retired_instructions = 0;
  std::uint64_t cycles_to_target = 0;
  std::optional<double> ipc;
  std::uint64_t requests = 0;
};

struct ChannelReport {
  ChannelStats stats;
  double bandwidth_gbps = 0;
  std::vector<double> layer_utilization;
  std::uint64_t conflicts = 0;  // double-driven slots; always 0 in correct runs
};

struct RunReport {
  std::string scheme;
  std::string rank_org;
  int layers = 0;
  int channels = 0;
  int cores = 0;
  std::uint64_t seed = 0;

  double simulated_ns = 0;
  std::vector<CoreReport> core_reports;
  std::vector<ChannelReport> channel_reports;

  double bandwidth_gbps_total = 0;
  double avg_latency_ns = 0;
  double row_hit_rate = 0;

  EnergyTotals energy;
  std::vector<int> layer_freqs_mhz;
  std::vector<double> layer_residency_ns;  // summed over channels, per state-major order

  // Filled by sweep/experiment drivers; null in plain runs.
  std::optional<std::vector<double>> alone_ipc;
  std::optional<double> weighted_speedup_value;
};

// One fully self-contained, deterministic simulation: N trace-driven cores
// over C channels of 3D-stacked DRAM. Core and bus clocks advance by exact
// integer tick arithmetic (ticks = lcm of the two frequencies), so there is
// no cross-domain drift.
class Simulation {
 public:
  Simulation(const SimConfig& cfg, std::vector<std::vector<TraceEntry>> traces,
             std::vector<std::uint64_t> per_core_targets = {});

  RunReport run();

  // Test hooks.
  const std::vector<std::unique_ptr<Channel>>& channels() const { return channels_; }
  const MemRequest* request_by_id(std::uint64_t id) const;

 private:
  bool dispatch(int core_id, AccessKind kind, std::uint64_t address, std::uint64_t tag);

  SimConfig cfg_;
  AddressMap map_;
  std::vector<std::unique_ptr<Channel>> channels_;
  std::vector<std::unique_ptr<Core>> cores_;
  std::deque<MemRequest> pool_;
  std::vector<std::uint64_t> request_core_tag_;
  std::uint64_t next_id_ = 0;
  Cycle fast_now_ = 0;
};

// Convenience: run the per-core traces through `cfg`, then each trace alone
// (cores = 1, same memory system) and attach weighted-speedup data.
RunReport run_with_weighted_speedup(const SimConfig& cfg,
                                    const std::vector<std::vector<TraceEntry>>& traces,
                                    const std::vector<std::uint64_t>& per_core_targets = {});

}  // namespace smla
