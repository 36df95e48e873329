#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "smla/controller.h"
#include "smla/device.h"
#include "smla/energy.h"
#include "smla/frontend.h"
#include "smla/iobus.h"
#include "smla/types.h"

namespace smla {

// Everything one simulation needs, cross-validated at load time. The file
// format is flat `key = value` pairs under `[section]` headers; unknown keys
// are rejected so typos cannot silently fall back to defaults.
struct SimConfig {
  // [topology]
  int channels = 4;
  int layers = 4;
  int ranks = -1;  // -1 = derived from rank_org (L for SLR, 1 for MLR)
  int banks_per_rank = 2;
  std::uint64_t rows_per_bank = 8192;
  std::uint64_t row_bytes = 1024;
  int io_width = 128;
  int base_freq_mhz = 200;

  // [scheme]
  IoScheme scheme = IoScheme::Baseline;
  RankOrg rank_org = RankOrg::SingleLayerRank;

  // [timing]
  TimingParams timing;

  // [controller]
  std::size_t queue_capacity = 64;
  std::size_t write_watermark = 48;
  Cycle max_burst_lead = 64;
  double power_down_threshold_ns = 0;
  double unavailable_every_ns = 0;
  double unavailable_for_ns = 0;

  // [energy]
  EnergyParams energy;

  // [frontend]
  int cores = 1;
  int core_freq_mhz = 3200;
  int window_entries = 128;
  int issue_width = 3;
  int mshrs = 8;
  std::uint64_t target_instructions = 1'000'000;
  double min_sim_time_ns = 0;
  bool llc_enabled = false;
  std::uint64_t llc_size_bytes = 512 * 1024;
  int llc_ways = 16;

  // [sim]
  std::uint64_t seed = 1;

  bool operator==(const SimConfig&) const = default;

  void validate() const;  // throws ConfigError naming the offending key

  int effective_ranks() const {
    if (ranks >= 0) return ranks;
    return rank_org == RankOrg::SingleLayerRank ? layers : 1;
  }
  int fast_freq_mhz() const {
    return scheme == IoScheme::Baseline ? base_freq_mhz : base_freq_mhz * layers;
  }
  double fast_period_ns() const { return 1000.0 / fast_freq_mhz(); }
  std::uint64_t lines_per_row() const {
    const std::uint64_t per_layer = row_bytes / kLineBytes;
    return rank_org == RankOrg::MultiLayerRank ? per_layer * layers : per_layer;
  }
  std::vector<int> layer_freqs_mhz() const;

  IoBusConfig bus_config() const;
  ChannelConfig channel_config() const;
  AddressMap address_map() const;
  CoreConfig core_config() const;
  LlcConfig llc_config() const;
};

SimConfig load_config(std::istream& in, const std::string& name);
SimConfig load_config_file(const std::string& path);
std::string serialize_config(const SimConfig& cfg);

// Workload manifest: one `<trace-path> [instructions]` line per core.
// Relative paths resolve against the manifest's directory.
struct WorkloadEntry {
  std::string trace_path;
  std::uint64_t target_instructions = 0;  // 0 = config default
};
std::vector<WorkloadEntry> load_manifest(const std::string& path);

}  // namespace smla
