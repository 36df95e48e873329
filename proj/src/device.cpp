#include "smla/device.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace smla {

void TimingParams::validate() const {
  auto positive = [](double v, const char* key) {
    if (v < 0) throw ConfigError(std::string("timing.") + key + " must be >= 0");
  };
  positive(t_rcd_ns, "t_rcd_ns");
  positive(t_rp_ns, "t_rp_ns");
  positive(t_ras_ns, "t_ras_ns");
  positive(t_cas_ns, "t_cas_ns");
  positive(t_cwl_ns, "t_cwl_ns");
  positive(t_wr_ns, "t_wr_ns");
  if (t_ras_ns < t_rcd_ns) throw ConfigError("timing.t_ras_ns must be >= timing.t_rcd_ns");
}

namespace {

Cycle cycles_ceil(double ns, int fast_freq_mhz) {
  // ns * MHz / 1000 cycles; the 1e-9 slack absorbs representation error so
  // exact multiples stay exact.
  double c = ns * static_cast<double>(fast_freq_mhz) / 1000.0;
  return static_cast<Cycle>(std::ceil(c - 1e-9));
}

}  // namespace

TimingCycles TimingCycles::from_ns(const TimingParams& p, int fast_freq_mhz) {
  p.validate();
  TimingCycles t;
  t.rcd = cycles_ceil(p.t_rcd_ns, fast_freq_mhz);
  t.rp = cycles_ceil(p.t_rp_ns, fast_freq_mhz);
  t.ras = cycles_ceil(p.t_ras_ns, fast_freq_mhz);
  t.cas = cycles_ceil(p.t_cas_ns, fast_freq_mhz);
  t.cwl = cycles_ceil(p.t_cwl_ns, fast_freq_mhz);
  t.wr = cycles_ceil(p.t_wr_ns, fast_freq_mhz);
  return t;
}

const char* to_string(CommandKind k) {
  switch (k) {
    case CommandKind::Act: return "ACT";
    case CommandKind::Read: return "RD";
    case CommandKind::Write: return "WR";
    case CommandKind::Precharge: return "PRE";
  }
  return "?";
}

Cycle legal_issue_cycle(const BankState& bank, CommandKind kind, Cycle now) {
  switch (kind) {
    case CommandKind::Act:
      if (bank.phase == BankState::Phase::Active)
        throw SimError("ACT on an active bank (precharge first)");
      return std::max(now, bank.next_act);
    case CommandKind::Read:
    case CommandKind::Write:
      if (bank.phase != BankState::Phase::Active) throw SimError("row not open");
      return std::max(now, bank.next_rdwr);
    case CommandKind::Precharge:
      // PRE on an idle bank is a no-op, legal immediately.
      if (bank.phase == BankState::Phase::Idle) return now;
      return std::max(now, bank.next_pre);
  }
  throw SimError("unknown command kind");
}

BankState apply_command(const BankState& bank, const DramCommand& cmd, const TimingCycles& t) {
  const Cycle legal = legal_issue_cycle(bank, cmd.kind, 0);
  if (cmd.issue_cycle < legal)
    throw SimError(std::string("timing violation: ") + to_string(cmd.kind) + " at cycle " +
                   std::to_string(cmd.issue_cycle) + ", earliest legal " + std::to_string(legal));

  BankState next = bank;
  switch (cmd.kind) {
    case CommandKind::Act:
      next.phase = BankState::Phase::Active;
      next.open_row = cmd.target.row;
      next.next_rdwr = cmd.issue_cycle + t.rcd;
      next.next_pre = std::max(next.next_pre, cmd.issue_cycle + t.ras);
      break;
    case CommandKind::Read:
    case CommandKind::Write:
      if (!bank.row_open(cmd.target.row)) throw SimError("column access to a different row");
      break;
    case CommandKind::Precharge:
      if (bank.phase == BankState::Phase::Active) {
        next.phase = BankState::Phase::Idle;
        next.open_row.reset();
        next.next_act = std::max(next.next_act, cmd.issue_cycle + t.rp);
      }
      break;
  }
  return next;
}

BankState note_burst_end(const BankState& bank, AccessKind kind, Cycle burst_completion,
                         const TimingCycles& t) {
  BankState next = bank;
  const Cycle hold = kind == AccessKind::Write ? burst_completion + t.wr : burst_completion;
  next.next_pre = std::max(next.next_pre, hold);
  return next;
}

}  // namespace smla
