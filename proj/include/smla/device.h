#pragma once

#include <cstdint>
#include <optional>

#include "smla/types.h"

namespace smla {

// Command-class timing constraints in nanoseconds, plus the conversion to
// integer fast-clock cycles the simulation actually runs on. Only tRCD is
// dictated by the modeled device; the rest default to DDR3-1600-class
// values and are freely configurable.
struct TimingParams {
  double t_rcd_ns = 13.0;   // ACT -> RD/WR
  double t_rp_ns = 13.75;   // PRE -> ACT
  double t_ras_ns = 35.0;   // ACT -> PRE minimum
  double t_cas_ns = 13.75;  // RD -> first data beat
  double t_cwl_ns = 10.0;   // WR -> first data beat
  double t_wr_ns = 15.0;    // last write beat -> PRE

  bool operator==(const TimingParams&) const = default;

  void validate() const;  // throws ConfigError
};

// The same constraints as whole fast-clock cycle counts (rounded up once at
// load; the rest of the simulation is pure integer arithmetic).
struct TimingCycles {
  Cycle rcd, rp, ras, cas, cwl, wr;

  static TimingCycles from_ns(const TimingParams& p, int fast_freq_mhz);
};

enum class CommandKind { Act, Read, Write, Precharge };

const char* to_string(CommandKind k);

struct CommandTarget {
  int channel = 0;
  int rank = 0;
  int bank = 0;
  std::uint64_t row = 0;
  std::uint64_t column = 0;
};

struct DramCommand {
  CommandKind kind;
  CommandTarget target;
  Cycle issue_cycle = 0;
};

// Timing state of one bank. next_* fields hold the earliest fast-clock cycle
// at which the corresponding command class may issue; they only move forward.
struct BankState {
  enum class Phase { Idle, Active };

  Phase phase = Phase::Idle;
  std::optional<std::uint64_t> open_row;
  Cycle next_act = 0;
  Cycle next_rdwr = 0;
  Cycle next_pre = 0;

  bool row_open(std::uint64_t row) const {
    return phase == Phase::Active && open_row && *open_row == row;
  }
};

// Earliest legal issue cycle for `kind` given the bank's stored constraints.
// Pure query. Throws SimError for RD/WR on an idle bank.
Cycle legal_issue_cycle(const BankState& bank, CommandKind kind, Cycle now);

// Applies one command, returning the updated bank state. Throws SimError on
// any timing or phase violation: the controller must never emit an illegal
// command, so reaching this is a bug, not an input error.
BankState apply_command(const BankState& bank, const DramCommand& cmd, const TimingCycles& t);

// Records the bus-side end of a data burst so PRE cannot cut a transfer
// short. Writes additionally hold the bank open for the write-recovery time.
BankState note_burst_end(const BankState& bank, AccessKind kind, Cycle burst_completion,
                         const TimingCycles& t);

}  // namespace smla
