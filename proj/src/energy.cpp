#include "smla/energy.h"

#include <string>

#include "smla/iobus.h"

namespace smla {

const char* to_string(StandbyState s) {
  switch (s) {
    case StandbyState::PowerDown: return "power_down";
    case StandbyState::PrechargeStandby: return "precharge_standby";
    case StandbyState::ActiveStandby: return "active_standby";
  }
  return "?";
}

const char* to_string(DramOp o) {
  switch (o) {
    case DramOp::ActPre: return "act_pre";
    case DramOp::Read: return "read";
    case DramOp::Write: return "write";
  }
  return "?";
}

int EnergyParams::freq_index(int freq_mhz) {
  for (size_t i = 0; i < kFreqsMhz.size(); ++i) {
    if (kFreqsMhz[i] == freq_mhz) return static_cast<int>(i);
  }
  throw ConfigError("energy: unsupported clock frequency " + std::to_string(freq_mhz) +
                    " MHz (table covers 200/400/800/1600)");
}

void EnergyParams::validate() const {
  if (vdd <= 0) throw ConfigError("energy.vdd must be > 0");
  auto non_decreasing = [](const std::array<double, 4>& row, const char* key) {
    for (int i = 1; i < 4; ++i) {
      if (row[i] < row[i - 1])
        throw ConfigError(std::string("energy.") + key +
                          " must be non-decreasing in frequency");
    }
  };
  non_decreasing(precharge_standby_ma, "precharge_standby_ma");
  non_decreasing(active_standby_ma, "active_standby_ma");
  for (int i = 1; i < 4; ++i) {
    if (power_down_ma[i] != power_down_ma[0])
      throw ConfigError("energy.power_down_ma must be frequency-independent");
  }
}

double EnergyParams::standby_current_ma(StandbyState state, int freq_mhz) const {
  const int i = freq_index(freq_mhz);
  switch (state) {
    case StandbyState::PowerDown: return power_down_ma[i];
    case StandbyState::PrechargeStandby: return precharge_standby_ma[i];
    case StandbyState::ActiveStandby: return active_standby_ma[i];
  }
  throw ConfigError("unknown standby state");
}

double EnergyParams::op_energy_nj(DramOp op, int freq_mhz) const {
  const int i = freq_index(freq_mhz);
  switch (op) {
    case DramOp::ActPre: return act_pre_nj[i];
    case DramOp::Read: return read_nj[i];
    case DramOp::Write: return write_nj[i];
  }
  throw ConfigError("unknown op");
}

EnergyLedger::EnergyLedger(int layers)
    : residency_(layers, {0.0, 0.0, 0.0}), ops_(layers, {0.0, 0.0, 0.0}) {}

void EnergyLedger::accumulate(int layer, StandbyState state, double duration_ns) {
  if (duration_ns < 0) throw SimError("negative residency duration");
  residency_.at(layer)[static_cast<int>(state)] += duration_ns;
}

void EnergyLedger::record_op(int layer, DramOp op, double weight) {
  ops_.at(layer)[static_cast<int>(op)] += weight;
}

double EnergyLedger::residency_ns(int layer, StandbyState state) const {
  return residency_.at(layer)[static_cast<int>(state)];
}

double EnergyLedger::op_count(int layer, DramOp op) const {
  return ops_.at(layer)[static_cast<int>(op)];
}

double EnergyLedger::total_residency_ns(int layer) const {
  const auto& r = residency_.at(layer);
  return r[0] + r[1] + r[2];
}

void EnergyLedger::merge(const EnergyLedger& other) {
  if (residency_.empty()) {
    residency_ = other.residency_;
    ops_ = other.ops_;
    return;
  }
  if (other.layers() != layers()) throw SimError("ledger layer-count mismatch");
  for (int l = 0; l < layers(); ++l) {
    for (int s = 0; s < kStandbyStates; ++s) residency_[l][s] += other.residency_[l][s];
    for (int o = 0; o < kDramOps; ++o) ops_[l][o] += other.ops_[l][o];
  }
}

EnergyTotals total_energy(const EnergyLedger& ledger, const EnergyParams& params,
                          const std::vector<int>& layer_freqs_mhz) {
  if (static_cast<int>(layer_freqs_mhz.size()) != ledger.layers())
    throw ConfigError("energy: one clock frequency required per layer");

  EnergyTotals totals;
  totals.per_layer.resize(ledger.layers());
  for (int l = 0; l < ledger.layers(); ++l) {
    LayerEnergy& e = totals.per_layer[l];
    const int f = layer_freqs_mhz[l];
    for (int s = 0; s < kStandbyStates; ++s) {
      const auto state = static_cast<StandbyState>(s);
      // mA * V * ns = pJ
      e.standby_nj[s] = params.standby_current_ma(state, f) * params.vdd *
                        ledger.residency_ns(l, state) * 1e-3;
      e.total_nj += e.standby_nj[s];
    }
    for (int o = 0; o < kDramOps; ++o) {
      const auto op = static_cast<DramOp>(o);
      e.op_nj[o] = ledger.op_count(l, op) * params.op_energy_nj(op, f);
      e.total_nj += e.op_nj[o];
    }
    totals.total_nj += e.total_nj;
  }
  return totals;
}

IdleStandbyComparison idle_standby_comparison(int layers, int base_freq_mhz,
                                              const EnergyParams& params) {
  IdleStandbyComparison c{};
  for (int l = 0; l < layers; ++l) {
    c.baseline_ma += params.standby_current_ma(
        StandbyState::PrechargeStandby,
        layer_clock_mhz(IoScheme::Baseline, l, layers, base_freq_mhz));
    c.dedicated_ma += params.standby_current_ma(
        StandbyState::PrechargeStandby,
        layer_clock_mhz(IoScheme::DedicatedIo, l, layers, base_freq_mhz));
    c.cascaded_ma += params.standby_current_ma(
        StandbyState::PrechargeStandby,
        layer_clock_mhz(IoScheme::CascadedIo, l, layers, base_freq_mhz));
  }
  c.dedicated_overhead_ma = c.dedicated_ma - c.baseline_ma;
  c.cascaded_overhead_ma = c.cascaded_ma - c.baseline_ma;
  c.overhead_reduction =
      c.dedicated_overhead_ma > 0 ? 1.0 - c.cascaded_overhead_ma / c.dedicated_overhead_ma : 0.0;
  return c;
}

}  // namespace smla
