#include "smla/sim.h"

#include <algorithm>
#include <numeric>

namespace smla {

namespace {

std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b) { return a / std::gcd(a, b) * b; }

}  // namespace

Simulation::Simulation(const SimConfig& cfg, std::vector<std::vector<TraceEntry>> traces,
                       std::vector<std::uint64_t> per_core_targets)
    : cfg_(cfg), map_(cfg.address_map()) {
  cfg_.validate();
  if (static_cast<int>(traces.size()) != cfg_.cores)
    throw ConfigError("frontend.cores (" + std::to_string(cfg_.cores) + ") != trace count (" +
                      std::to_string(traces.size()) + ")");
  if (!per_core_targets.empty() && per_core_targets.size() != traces.size())
    throw ConfigError("per-core targets must match trace count");

  for (int c = 0; c < cfg_.channels; ++c)
    channels_.push_back(std::make_unique<Channel>(c, cfg_.channel_config()));

  for (int i = 0; i < cfg_.cores; ++i) {
    std::vector<TraceEntry> trace = std::move(traces[i]);
    if (cfg_.llc_enabled) trace = llc_filter(trace, cfg_.llc_config());
    for (const TraceEntry& e : trace) {
      if (e.address >= map_.capacity_bytes())
        throw ConfigError("trace address 0x" + std::to_string(e.address) +
                          " beyond configured capacity (core " + std::to_string(i) + ")");
    }
    CoreConfig cc = cfg_.core_config();
    if (!per_core_targets.empty() && per_core_targets[i] > 0)
      cc.target_instructions = per_core_targets[i];
    cores_.push_back(std::make_unique<Core>(
        i, cc, std::move(trace),
        [this](int core_id, AccessKind kind, std::uint64_t address, std::uint64_t tag) {
          return dispatch(core_id, kind, address, tag);
        }));
  }
}

bool Simulation::dispatch(int core_id, AccessKind kind, std::uint64_t address,
                          std::uint64_t tag) {
  MemRequest& req = pool_.emplace_back();
  req.id = next_id_;
  req.core_id = core_id;
  req.kind = kind;
  req.address = address;
  req.arrival = fast_now_;
  req.decoded = map_.decode(address);
  req.token = req.id + 1;  // opaque nonzero payload for writes

  if (!channels_[req.decoded.channel]->enqueue(&req)) {
    pool_.pop_back();
    return false;
  }
  request_core_tag_.push_back(tag);
  ++next_id_;
  return true;
}

const MemRequest* Simulation::request_by_id(std::uint64_t id) const {
  return id < pool_.size() ? &pool_[id] : nullptr;
}

RunReport Simulation::run() {
  const std::uint64_t fast_mhz = cfg_.fast_freq_mhz();
  const std::uint64_t core_mhz = cfg_.core_freq_mhz;
  const std::uint64_t tick_mhz = lcm_u64(fast_mhz, core_mhz);
  const std::uint64_t fast_step = tick_mhz / fast_mhz;
  const std::uint64_t core_step = tick_mhz / core_mhz;
  const double fast_period_ns = cfg_.fast_period_ns();

  std::uint64_t next_fast = 0, next_core = 0, core_now = 0;
  std::vector<MemRequest*> completed;
  Cycle last_progress = 0;

  auto all_done = [&] {
    for (const auto& c : cores_) {
      if (!c->reached_target()) return false;
    }
    return true;
  };

  bool done = all_done() && cfg_.min_sim_time_ns <= 0;
  while (!done) {
    const std::uint64_t t = std::min(next_fast, next_core);
    if (t == next_fast) {
      completed.clear();
      for (auto& ch : channels_) ch->step(fast_now_, completed);
      if (channels_.size() > 1) {
        std::sort(completed.begin(), completed.end(),
                  [](const MemRequest* a, const MemRequest* b) { return a->id < b->id; });
      }
      for (MemRequest* req : completed)
        cores_[req->core_id]->notify_complete(request_core_tag_[req->id]);
      if (!completed.empty()) last_progress = fast_now_;
      ++fast_now_;
      next_fast += fast_step;
    }
    if (t == next_core) {
      // Rotating step order keeps same-cycle arbitration ties fair across
      // cores instead of always favoring core 0. The rotation tracks the
      // memory clock: with an integer core/bus ratio, a core-cycle rotation
      // would realign to the same core at every bus boundary.
      const std::size_t n = cores_.size();
      const std::size_t rot = static_cast<std::size_t>(core_now + fast_now_);
      for (std::size_t i = 0; i < n; ++i) cores_[(i + rot) % n]->step(core_now);
      ++core_now;
      next_core += core_step;
    }

    done = all_done() &&
           static_cast<double>(fast_now_) * fast_period_ns >= cfg_.min_sim_time_ns;

    if (fast_now_ - last_progress > 50'000'000) {
      bool pending = false;
      for (const auto& ch : channels_) pending |= !ch->drained();
      if (pending || !all_done()) throw SimError("simulation stalled: no progress");
      last_progress = fast_now_;
    }
  }

  // Assemble the report.
  RunReport r;
  r.scheme = to_string(cfg_.scheme);
  r.rank_org = to_string(cfg_.rank_org);
  r.layers = cfg_.layers;
  r.channels = cfg_.channels;
  r.cores = cfg_.cores;
  r.seed = cfg_.seed;
  r.simulated_ns = static_cast<double>(fast_now_) * fast_period_ns;
  r.layer_freqs_mhz = cfg_.layer_freqs_mhz();

  for (const auto& core : cores_) {
    CoreReport cr;
    cr.target_instructions = core->target_instructions();
    cr.retired_instructions = core->retired_instructions();
    cr.cycles_to_target = core->target_cycle();
    cr.requests = core->dispatched_requests();
    if (core->reached_target() && core->target_cycle() > 0) cr.ipc = core->ipc();
    r.core_reports.push_back(cr);
  }

  EnergyLedger merged;
  double latency_sum = 0;
  std::uint64_t latency_n = 0, hits = 0, misses = 0;
  for (auto& ch : channels_) {
    ChannelReport cr;
    cr.stats = ch->stats();
    cr.bandwidth_gbps = r.simulated_ns > 0
                            ? static_cast<double>(cr.stats.bytes_transferred) / r.simulated_ns
                            : 0.0;
    // Per-layer bus utilization: under Cascaded-IO a layer's TSV segment
    // carries every beat sourced at or above it; under the static schemes
    // it is simply the layer's group occupancy.
    const IoBus& bus = ch->bus();
    const int L = cfg_.layers;
    for (int l = 0; l < L; ++l) {
      double busy;
      if (cfg_.scheme == IoScheme::CascadedIo) {
        std::uint64_t above = 0;
        for (int d = l; d < L; ++d) above += bus.beats_from_layer(d);
        busy = static_cast<double>(above) / L;  // group-entries -> full beats
      } else {
        busy = static_cast<double>(bus.beats_on_group(l));
      }
      cr.layer_utilization.push_back(fast_now_ ? busy / static_cast<double>(fast_now_) : 0.0);
    }
    r.channel_reports.push_back(cr);

    latency_sum += cr.stats.latency_ns_sum;
    latency_n += cr.stats.latency_samples;
    hits += cr.stats.row_hits;
    misses += cr.stats.row_misses;
    r.bandwidth_gbps_total += cr.bandwidth_gbps;

    merged.merge(ch->finish(fast_now_));
  }
  r.avg_latency_ns = latency_n ? latency_sum / latency_n : 0.0;
  r.row_hit_rate = (hits + misses) ? static_cast<double>(hits) / (hits + misses) : 0.0;

  r.energy = total_energy(merged, cfg_.energy, r.layer_freqs_mhz);
  for (int l = 0; l < cfg_.layers; ++l) {
    for (int s = 0; s < kStandbyStates; ++s)
      r.layer_residency_ns.push_back(merged.residency_ns(l, static_cast<StandbyState>(s)));
  }
  return r;
}

RunReport run_with_weighted_speedup(const SimConfig& cfg,
                                    const std::vector<std::vector<TraceEntry>>& traces,
                                    const std::vector<std::uint64_t>& per_core_targets) {
  Simulation shared(cfg, traces, per_core_targets);
  RunReport report = shared.run();

  std::vector<double> alone;
  std::vector<double> shared_ipc;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    SimConfig solo = cfg;
    solo.cores = 1;
    if (!per_core_targets.empty() && per_core_targets[i] > 0)
      solo.target_instructions = per_core_targets[i];
    Simulation sim(solo, {traces[i]});
    RunReport rr = sim.run();
    alone.push_back(rr.core_reports[0].ipc.value_or(0.0));
    shared_ipc.push_back(report.core_reports[i].ipc.value_or(0.0));
  }
  report.alone_ipc = alone;
  report.weighted_speedup_value = weighted_speedup(shared_ipc, alone);
  return report;
}

}  // namespace smla
