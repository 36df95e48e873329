#include "smla/iobus.h"

#include <string>
#include <unordered_set>

namespace smla {

const char* to_string(IoScheme s) {
  switch (s) {
    case IoScheme::Baseline: return "baseline";
    case IoScheme::DedicatedIo: return "dedicated";
    case IoScheme::CascadedIo: return "cascaded";
  }
  return "?";
}

const char* to_string(RankOrg o) {
  switch (o) {
    case RankOrg::SingleLayerRank: return "slr";
    case RankOrg::MultiLayerRank: return "mlr";
  }
  return "?";
}

const char* to_string(AccessKind k) {
  return k == AccessKind::Read ? "read" : "write";
}

void IoBusConfig::validate() const {
  if (layers != 1 && layers != 2 && layers != 4 && layers != 8)
    throw ConfigError("topology.layers must be one of 1, 2, 4, 8");
  if (io_width_bits <= 0 || io_width_bits % layers != 0)
    throw ConfigError("topology.io_width must be positive and divisible by layers");
  if (base_freq_mhz <= 0) throw ConfigError("topology.base_freq_mhz must be > 0");
  if (kRequestBytes * 8 % io_width_bits != 0)
    throw ConfigError("topology.io_width must divide the 512-bit request size");
}

int layer_clock_mhz(IoScheme scheme, int layer, int layers, int base_freq_mhz) {
  if (layer < 0 || layer >= layers) throw ConfigError("layer index out of range");
  switch (scheme) {
    case IoScheme::Baseline:
      return base_freq_mhz;
    case IoScheme::DedicatedIo:
      return base_freq_mhz * layers;
    case IoScheme::CascadedIo: {
      // Layer i must carry the streams of the L-i layers at or above it,
      // rounded up to the next power of two the divide-by-two counters can
      // produce.
      int need = layers - layer;
      int factor = 1;
      while (factor < need) factor *= 2;
      return base_freq_mhz * factor;
    }
  }
  throw ConfigError("unknown scheme");
}

TsvRange tsv_group_for_layer(IoScheme scheme, int layer, int layers, int io_width_bits) {
  if (scheme != IoScheme::DedicatedIo)
    throw ConfigError("scheme has no static groups");
  if (layer < 0 || layer >= layers) throw ConfigError("layer index out of range");
  const int width = io_width_bits / layers;
  return TsvRange{layer * width, (layer + 1) * width};
}

int slot_owner(Cycle fast_cycle, int layers) {
  return static_cast<int>(fast_cycle % static_cast<Cycle>(layers));
}

double cascaded_layer_utilization(int layer, int layers) {
  if (layer < 0 || layer >= layers) throw ConfigError("layer index out of range");
  return static_cast<double>(layers - layer) / static_cast<double>(layers);
}

int command_issue_granularity(IoScheme scheme, int layer, int layers) {
  const int fast = layers;  // in units of the base frequency
  const int layer_factor = layer_clock_mhz(scheme, layer, layers, 1);
  return scheme == IoScheme::Baseline ? 1 : fast / layer_factor;
}

std::optional<SlotConflict> check_conflicts(std::span<const BeatSchedule> schedules) {
  std::unordered_set<std::uint64_t> seen;
  for (const auto& s : schedules) {
    for (const auto& b : s.beats) {
      const std::uint64_t key = (b.cycle << 8) | b.group;
      if (!seen.insert(key).second) return SlotConflict{b.cycle, b.group};
    }
  }
  return std::nullopt;
}

IoBus::IoBus(IoBusConfig cfg, Cycle search_horizon) : cfg_(cfg), horizon_(search_horizon) {
  cfg_.validate();
  occupied_.resize(cfg_.group_count());
  beats_per_group_.assign(cfg_.group_count(), 0);
  beats_per_layer_.assign(cfg_.layers, 0);
}

bool IoBus::block_free(Cycle start, Cycle stride, int count, int group_first,
                       int group_last) const {
  for (int i = 0; i < count; ++i) {
    const Cycle c = start + stride * static_cast<Cycle>(i);
    for (int g = group_first; g < group_last; ++g) {
      if (occupied_[g].count(c)) return false;
    }
  }
  return true;
}

void IoBus::commit(const BeatSchedule& s) {
  for (const auto& b : s.beats) {
    if (!occupied_[b.group].insert(b.cycle).second)
      throw SimError("TSV slot double-booked at cycle " + std::to_string(b.cycle) +
                     ", group " + std::to_string(b.group));
    ++beats_per_group_[b.group];
    ++beats_per_layer_[b.layer];
    ++total_beats_;
  }
}

std::optional<BeatSchedule> IoBus::schedule_burst(int rank, std::uint64_t request_id,
                                                  Cycle ready,
                                                  std::optional<Cycle> latest_first_beat) {
  const int L = cfg_.layers;
  const int n_full = cfg_.full_width_beats_per_request();

  // Placement geometry per scheme/org: beat count, cycle stride, group span
  // and the layer sourcing each beat.
  int count = n_full;
  Cycle stride = 1;
  int group_first = 0, group_last = L;
  Cycle start_lo = ready;
  Cycle start_step = 1;

  const bool slr = cfg_.rank_org == RankOrg::SingleLayerRank;
  if (cfg_.scheme == IoScheme::DedicatedIo && slr) {
    count = n_full * L;  // the rank's data squeezes through its own group
    group_first = rank;
    group_last = rank + 1;
  } else if (cfg_.scheme == IoScheme::CascadedIo && slr) {
    stride = static_cast<Cycle>(L);  // one full-width beat per owned slot
    start_step = static_cast<Cycle>(L);
    start_lo = ready + ((static_cast<Cycle>(rank) + static_cast<Cycle>(L) -
                         ready % static_cast<Cycle>(L)) %
                        static_cast<Cycle>(L));
  }

  Cycle limit = ready + horizon_;
  if (latest_first_beat && *latest_first_beat < limit) limit = *latest_first_beat;

  for (Cycle start = start_lo; start <= limit; start += start_step) {
    if (!block_free(start, stride, count, group_first, group_last)) continue;

    BeatSchedule s;
    s.request_id = request_id;
    s.beats.reserve(static_cast<size_t>(count) * (group_last - group_first));
    for (int i = 0; i < count; ++i) {
      const Cycle c = start + stride * static_cast<Cycle>(i);
      for (int g = group_first; g < group_last; ++g) {
        int layer = rank;
        if (cfg_.rank_org == RankOrg::MultiLayerRank) {
          // Dedicated-IO wires each group to its own layer; Cascaded-IO
          // pipelines whole beats bottom layer first.
          layer = cfg_.scheme == IoScheme::CascadedIo ? i % L : g;
        }
        s.beats.push_back(Beat{c, static_cast<std::uint16_t>(g),
                               static_cast<std::uint16_t>(layer), request_id});
      }
    }
    s.first_beat = start;
    s.completion = start + stride * static_cast<Cycle>(count - 1) + 1;
    commit(s);
    return s;
  }
  return std::nullopt;
}

void IoBus::forget_before(Cycle cycle) {
  for (auto& set : occupied_) {
    set.erase(set.begin(), set.lower_bound(cycle));
  }
}

}  // namespace smla
