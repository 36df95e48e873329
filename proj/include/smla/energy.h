#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "smla/types.h"

namespace smla {

enum class StandbyState { PowerDown, PrechargeStandby, ActiveStandby };
enum class DramOp { ActPre, Read, Write };

inline constexpr int kStandbyStates = 3;
inline constexpr int kDramOps = 3;

const char* to_string(StandbyState s);
const char* to_string(DramOp o);

// Frequency-dependent currents and per-operation energies of one stacked
// DRAM layer. The four supported clock frequencies are exactly the grid the
// simulator can instantiate (F = 200 MHz, L in {1,2,4,8}); lookups are
// exact, never interpolated.
struct EnergyParams {
  static constexpr std::array<int, 4> kFreqsMhz = {200, 400, 800, 1600};

  std::array<double, 4> power_down_ma = {0.24, 0.24, 0.24, 0.24};
  std::array<double, 4> precharge_standby_ma = {4.24, 5.39, 6.54, 8.84};
  std::array<double, 4> active_standby_ma = {7.33, 8.50, 9.67, 12.0};
  std::array<double, 4> act_pre_nj = {1.36, 1.37, 1.38, 1.41};
  std::array<double, 4> read_nj = {1.93, 1.93, 1.93, 1.93};
  std::array<double, 4> write_nj = {1.33, 1.33, 1.33, 1.33};
  double vdd = 1.2;

  bool operator==(const EnergyParams&) const = default;

  void validate() const;  // throws ConfigError

  double standby_current_ma(StandbyState state, int freq_mhz) const;
  double op_energy_nj(DramOp op, int freq_mhz) const;

  static int freq_index(int freq_mhz);  // throws ConfigError if unsupported
};

// Per-layer residency times and operation counts accumulated over a run.
// Operation counts are fractional so a multi-layer-rank command can be
// attributed 1/L to each of its lockstep layers.
class EnergyLedger {
 public:
  EnergyLedger() = default;
  explicit EnergyLedger(int layers);

  void accumulate(int layer, StandbyState state, double duration_ns);
  void record_op(int layer, DramOp op, double weight = 1.0);

  double residency_ns(int layer, StandbyState state) const;
  double op_count(int layer, DramOp op) const;
  double total_residency_ns(int layer) const;
  int layers() const { return static_cast<int>(residency_.size()); }

  // Order-independent merge of per-channel ledgers.
  void merge(const EnergyLedger& other);

 private:
  std::vector<std::array<double, kStandbyStates>> residency_;
  std::vector<std::array<double, kDramOps>> ops_;
};

struct LayerEnergy {
  double standby_nj[kStandbyStates] = {0, 0, 0};
  double op_nj[kDramOps] = {0, 0, 0};
  double total_nj = 0;
};

struct EnergyTotals {
  std::vector<LayerEnergy> per_layer;
  double total_nj = 0;
};

// Sum over layers of standby current x VDD x residency plus per-op energies,
// each looked up at that layer's clock frequency.
EnergyTotals total_energy(const EnergyLedger& ledger, const EnergyParams& params,
                          const std::vector<int>& layer_freqs_mhz);

// Idle precharge-standby current of a whole L-layer stack under each scheme,
// and Cascaded-IO's reduction of the over-baseline overhead versus
// Dedicated-IO.
struct IdleStandbyComparison {
  double baseline_ma;
  double dedicated_ma;
  double cascaded_ma;
  double dedicated_overhead_ma;  // vs baseline
  double cascaded_overhead_ma;   // vs baseline
  double overhead_reduction;     // 1 - cascaded/dedicated overhead
};

IdleStandbyComparison idle_standby_comparison(int layers, int base_freq_mhz,
                                              const EnergyParams& params);

}  // namespace smla
