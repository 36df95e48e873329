#include "smla/controller.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace smla {

namespace {

void require_pow2(std::uint64_t v, const char* key) {
  if (!is_power_of_two(v)) throw ConfigError(std::string(key) + " must be a power of two");
}

}  // namespace

AddressMap::AddressMap(int channels, int ranks, int banks, std::uint64_t rows,
                       std::uint64_t lines_per_row)
    : channels_(channels), ranks_(ranks), banks_(banks), rows_(rows), lines_(lines_per_row) {
  if (channels <= 0 || ranks <= 0 || banks <= 0 || rows == 0 || lines_per_row == 0)
    throw ConfigError("address map: all topology dimensions must be positive");
  require_pow2(static_cast<std::uint64_t>(channels), "topology.channels");
  require_pow2(static_cast<std::uint64_t>(ranks), "topology.ranks");
  require_pow2(static_cast<std::uint64_t>(banks), "topology.banks_per_rank");
  require_pow2(rows, "topology.rows_per_bank");
  require_pow2(lines_per_row, "row size in lines");
  capacity_ = static_cast<std::uint64_t>(channels) * ranks * banks * rows * lines_ * kLineBytes;
}

DecodedAddress AddressMap::decode(std::uint64_t address) const {
  if (address >= capacity_)
    throw ConfigError("address 0x" + std::to_string(address) + " beyond configured capacity");
  std::uint64_t v = address / kLineBytes;
  DecodedAddress d;
  d.channel = static_cast<int>(v % channels_);
  v /= channels_;
  d.column = v % lines_;
  v /= lines_;
  d.bank = static_cast<int>(v % banks_);
  v /= banks_;
  d.rank = static_cast<int>(v % ranks_);
  v /= ranks_;
  d.row = v;
  return d;
}

std::uint64_t AddressMap::encode(const DecodedAddress& d) const {
  std::uint64_t v = d.row;
  v = v * ranks_ + d.rank;
  v = v * banks_ + d.bank;
  v = v * lines_ + d.column;
  v = v * channels_ + d.channel;
  return v * kLineBytes;
}

std::optional<std::size_t> frfcfs_select(std::span<MemRequest* const> queue,
                                         const std::vector<std::vector<BankState>>& banks,
                                         Cycle now) {
  std::optional<std::size_t> best;
  bool best_hit = false;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const MemRequest* r = queue[i];
    const BankState& bank = banks[r->decoded.rank][r->decoded.bank];

    bool legal;
    bool hit = false;
    if (bank.phase == BankState::Phase::Idle) {
      legal = now >= bank.next_act;
    } else if (bank.row_open(r->decoded.row)) {
      legal = now >= bank.next_rdwr;
      hit = true;
    } else {
      legal = now >= bank.next_pre;
    }
    if (!legal) continue;

    if (!best) {
      best = i;
      best_hit = hit;
      continue;
    }
    const MemRequest* b = queue[*best];
    const bool older = r->arrival < b->arrival || (r->arrival == b->arrival && r->id < b->id);
    if ((hit && !best_hit) || (hit == best_hit && older)) {
      best = i;
      best_hit = hit;
    }
  }
  return best;
}

void ChannelConfig::validate() const {
  bus.validate();
  timing.validate();
  if (ranks <= 0 || banks_per_rank <= 0)
    throw ConfigError("topology: ranks and banks_per_rank must be positive");
  if (bus.rank_org == RankOrg::SingleLayerRank && ranks != bus.layers)
    throw ConfigError("topology.ranks must equal layers with single-layer ranks");
  if (bus.rank_org == RankOrg::MultiLayerRank && ranks != 1)
    throw ConfigError("topology.ranks must be 1 with multi-layer ranks");
  if (queue_capacity == 0) throw ConfigError("controller.queue_capacity must be > 0");
  if (write_watermark > queue_capacity)
    throw ConfigError("controller.write_watermark must not exceed queue_capacity");
  if (unavailable_every_ns < 0 || unavailable_for_ns < 0)
    throw ConfigError("controller.unavailable_*_ns must be >= 0");
  if (unavailable_for_ns > 0 && unavailable_every_ns <= unavailable_for_ns)
    throw ConfigError("controller.unavailable_every_ns must exceed unavailable_for_ns");
}

Channel::Channel(int index, const ChannelConfig& cfg)
    : index_(index),
      cfg_(cfg),
      timing_(TimingCycles::from_ns(cfg.timing, cfg.bus.fast_freq_mhz())),
      bus_(cfg.bus),
      banks_(cfg.ranks, std::vector<BankState>(cfg.banks_per_rank)),
      ledger_(cfg.bus.layers),
      layer_state_(cfg.bus.layers, StandbyState::PrechargeStandby),
      layer_since_(cfg.bus.layers, 0),
      last_cmd_cycle_(cfg.ranks, kNoCycle) {
  cfg_.validate();
  const double mhz = cfg_.bus.fast_freq_mhz();
  unavail_period_ = static_cast<Cycle>(std::ceil(cfg_.unavailable_every_ns * mhz / 1000.0 - 1e-9));
  unavail_len_ = static_cast<Cycle>(std::ceil(cfg_.unavailable_for_ns * mhz / 1000.0 - 1e-9));
}

bool Channel::rank_available(int rank, Cycle now) const {
  if (unavail_len_ == 0) return true;
  // Windows are staggered across ranks so the channel never blacks out whole.
  const Cycle offset =
      (static_cast<Cycle>(rank) * unavail_period_) / static_cast<Cycle>(cfg_.ranks);
  const Cycle phase = (now + unavail_period_ - offset % unavail_period_) % unavail_period_;
  return phase >= unavail_len_;
}

bool Channel::enqueue(MemRequest* req) {
  auto& q = req->kind == AccessKind::Read ? read_q_ : write_q_;
  if (q.size() >= cfg_.queue_capacity) {
    ++stats_.rejected_enqueues;
    return false;
  }
  if (req->kind == AccessKind::Read) {
    // Resolve the read's data now: every older write is either still queued
    // (forward from the youngest) or already applied to the store. Early
    // resolution keeps reads independent of write-drain order.
    const std::uint64_t line = line_of(*req);
    const MemRequest* src = nullptr;
    for (const MemRequest* w : write_q_) {
      if (w->id < req->id && line_of(*w) == line && (!src || w->id > src->id)) src = w;
    }
    if (src) {
      req->token = src->token;
    } else if (auto it = store_.find(line); it != store_.end()) {
      req->token = it->second;
    } else {
      req->token = 0;
    }
  }
  q.push_back(req);
  return true;
}

CommandKind Channel::next_required(const MemRequest& req, const BankState& bank) const {
  if (bank.phase == BankState::Phase::Idle) return CommandKind::Act;
  if (bank.row_open(req.decoded.row))
    return req.kind == AccessKind::Read ? CommandKind::Read : CommandKind::Write;
  return CommandKind::Precharge;
}

bool Channel::command_edge(int rank, Cycle now) const {
  // A layer latches at most one command per cycle of its own (possibly
  // divided) clock: minimum spacing in fast cycles. A multi-layer rank spans
  // the whole stack, so it paces at the slowest layer's cadence.
  const int layer =
      cfg_.bus.rank_org == RankOrg::SingleLayerRank ? rank : cfg_.bus.layers - 1;
  const int gran = command_issue_granularity(cfg_.bus.scheme, layer, cfg_.bus.layers);
  if (gran <= 1) return true;
  const Cycle last = last_cmd_cycle_[rank];
  return last == kNoCycle || now >= last + static_cast<Cycle>(gran);
}

bool Channel::hazard_blocked(const MemRequest& req) const {
  // Same-line writes drain in age order so the store ends on the youngest
  // value. Reads carry their data from enqueue time and need no guard.
  if (req.kind != AccessKind::Write) return false;
  const std::uint64_t line = line_of(req);
  for (const MemRequest* w : write_q_) {
    if (w->id < req.id && line_of(*w) == line) return true;
  }
  return false;
}

void Channel::record_op_for_rank(int rank, DramOp op) {
  if (cfg_.bus.rank_org == RankOrg::SingleLayerRank) {
    ledger_.record_op(rank, op);
  } else {
    // Lockstep layers share the command; attribute it evenly.
    const double w = 1.0 / cfg_.bus.layers;
    for (int l = 0; l < cfg_.bus.layers; ++l) ledger_.record_op(l, op, w);
  }
}

void Channel::close_span(int layer, Cycle now) {
  const double period = cfg_.bus.fast_period_ns();
  double span_ns = static_cast<double>(now - layer_since_[layer]) * period;
  const StandbyState state = layer_state_[layer];
  if (state == StandbyState::PrechargeStandby && cfg_.power_down_threshold_ns > 0 &&
      span_ns > cfg_.power_down_threshold_ns) {
    ledger_.accumulate(layer, StandbyState::PrechargeStandby, cfg_.power_down_threshold_ns);
    ledger_.accumulate(layer, StandbyState::PowerDown,
                       span_ns - cfg_.power_down_threshold_ns);
  } else {
    ledger_.accumulate(layer, state, span_ns);
  }
  layer_since_[layer] = now;
}

void Channel::sync_layer_states(Cycle now) {
  for (int layer = 0; layer < cfg_.bus.layers; ++layer) {
    const int rank = cfg_.bus.rank_org == RankOrg::SingleLayerRank ? layer : 0;
    bool active = false;
    for (const BankState& b : banks_[rank]) {
      if (b.phase == BankState::Phase::Active) {
        active = true;
        break;
      }
    }
    const StandbyState want =
        active ? StandbyState::ActiveStandby : StandbyState::PrechargeStandby;
    if (want != layer_state_[layer]) {
      close_span(layer, now);
      layer_state_[layer] = want;
    }
  }
}

void Channel::issue_column(MemRequest* req, CommandKind kind, Cycle now,
                           const BeatSchedule& sched) {
  BankState& bank = banks_[req->decoded.rank][req->decoded.bank];
  DramCommand cmd{kind, {index_, req->decoded.rank, req->decoded.bank, req->decoded.row,
                         req->decoded.column},
                  now};
  bank = apply_command(bank, cmd, timing_);
  bank = note_burst_end(bank, req->kind, sched.completion, timing_);

  req->first_beat = sched.first_beat;
  req->last_beat = sched.completion - 1;

  if (req->kind == AccessKind::Read) {
    ++stats_.rd_cmds;
    record_op_for_rank(req->decoded.rank, DramOp::Read);
  } else {
    store_[line_of(*req)] = req->token;
    ++stats_.wr_cmds;
    record_op_for_rank(req->decoded.rank, DramOp::Write);
  }

  if (req->needed_row_work) {
    ++stats_.row_misses;
  } else {
    ++stats_.row_hits;
  }
  in_flight_.push_back(InFlight{sched.completion, req});
}

void Channel::step(Cycle now, std::vector<MemRequest*>& completed) {
  // Retire bursts whose last beat has drained, in request-id order so the
  // surfaced completion order never depends on container internals.
  std::vector<MemRequest*> done;
  for (std::size_t i = 0; i < in_flight_.size();) {
    if (in_flight_[i].completion <= now) {
      done.push_back(in_flight_[i].req);
      in_flight_[i] = in_flight_.back();
      in_flight_.pop_back();
    } else {
      ++i;
    }
  }
  std::sort(done.begin(), done.end(),
            [](const MemRequest* a, const MemRequest* b) { return a->id < b->id; });
  for (MemRequest* req : done) {
    req->retired = true;
    const double latency_ns =
        static_cast<double>(req->completion() - req->arrival) * cfg_.bus.fast_period_ns();
    stats_.latency_ns_sum += latency_ns;
    ++stats_.latency_samples;
    stats_.bytes_transferred += kRequestBytes;
    if (req->kind == AccessKind::Read) {
      ++stats_.reads_retired;
    } else {
      ++stats_.writes_retired;
    }
    completed.push_back(req);
  }

  const bool write_mode =
      (read_q_.empty() && !write_q_.empty()) || write_q_.size() >= cfg_.write_watermark;
  auto& q = write_mode ? write_q_ : read_q_;

  // Candidate walk in FR-FCFS order (row hits first, then oldest), gated by
  // bank timing, the rank's command clock edge, and same-line hazards. One
  // command per fast cycle.
  struct Cand {
    std::size_t idx;
    bool hit;
    int edge_scarcity;  // command-clock divider of the target rank
    int fair_rank;
    const MemRequest* req;
  };
  const int fair_n = cfg_.fairness_cores;
  std::vector<Cand> cands;
  cands.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    MemRequest* r = q[i];
    const BankState& bank = banks_[r->decoded.rank][r->decoded.bank];
    const CommandKind kind = next_required(*r, bank);
    const Cycle legal = legal_issue_cycle(bank, kind, now);
    if (legal != now) continue;
    if (!rank_available(r->decoded.rank, now)) continue;
    if (!command_edge(r->decoded.rank, now)) continue;
    if (hazard_blocked(*r)) continue;
    const int layer = cfg_.bus.rank_org == RankOrg::SingleLayerRank ? r->decoded.rank
                                                                    : cfg_.bus.layers - 1;
    const int fair_rank = fair_n > 1 ? (r->core_id - rr_token_ + fair_n) % fair_n : 0;
    cands.push_back(Cand{i, bank.row_open(r->decoded.row),
                         command_issue_granularity(cfg_.bus.scheme, layer, cfg_.bus.layers),
                         fair_rank, r});
  }
  // Row hits first; among equals, ranks whose command clock is divided down
  // go first (missing one of their scarce edges costs a whole divider
  // period, while a full-rate rank only waits a cycle), then the fairness
  // rotation, then age.
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.hit != b.hit) return a.hit;
    if (a.edge_scarcity != b.edge_scarcity) return a.edge_scarcity > b.edge_scarcity;
    if (a.fair_rank != b.fair_rank) return a.fair_rank < b.fair_rank;
    if (a.req->arrival != b.req->arrival) return a.req->arrival < b.req->arrival;
    return a.req->id < b.req->id;
  });

  for (const Cand& c : cands) {
    MemRequest* req = q[c.idx];
    BankState& bank = banks_[req->decoded.rank][req->decoded.bank];
    const CommandKind kind = next_required(*req, bank);

    if (kind == CommandKind::Read || kind == CommandKind::Write) {
      const Cycle ready =
          now + (kind == CommandKind::Read ? timing_.cas : timing_.cwl);
      auto sched =
          bus_.schedule_burst(req->decoded.rank, req->id, ready, ready + cfg_.max_burst_lead);
      if (!sched) continue;  // bus saturated; try the next candidate
      if (fair_n > 1) rr_token_ = (req->core_id + 1) % fair_n;
      last_cmd_cycle_[req->decoded.rank] = now;
      issue_column(req, kind, now, *sched);
      q.erase(q.begin() + static_cast<std::ptrdiff_t>(c.idx));
    } else {
      DramCommand cmd{kind, {index_, req->decoded.rank, req->decoded.bank, req->decoded.row,
                             req->decoded.column},
                      now};
      bank = apply_command(bank, cmd, timing_);
      req->needed_row_work = true;
      last_cmd_cycle_[req->decoded.rank] = now;
      if (kind == CommandKind::Act) {
        ++stats_.act_cmds;
        record_op_for_rank(req->decoded.rank, DramOp::ActPre);
      } else {
        ++stats_.pre_cmds;
      }
      sync_layer_states(now);
    }
    break;
  }

  if (now - last_forget_ >= 1024) {
    bus_.forget_before(now);
    last_forget_ = now;
  }
}

EnergyLedger Channel::finish(Cycle end_cycle) {
  for (int layer = 0; layer < cfg_.bus.layers; ++layer) close_span(layer, end_cycle);
  return ledger_;
}

}  // namespace smla
