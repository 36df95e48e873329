#include "smla/report.h"

#include <sstream>

#include "json.hpp"

namespace smla {

namespace {

using Json = nlohmann::ordered_json;

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string report_to_json(const RunReport& r) {
  Json j;
  j["scheme"] = r.scheme;
  j["rank_org"] = r.rank_org;
  j["layers"] = r.layers;
  j["channels"] = r.channels;
  j["cores"] = r.cores;
  j["seed"] = r.seed;
  j["simulated_ns"] = r.simulated_ns;

  Json cores = Json::array();
  for (const CoreReport& c : r.core_reports) {
    Json jc;
    jc["target_instructions"] = c.target_instructions;
    jc["retired_instructions"] = c.retired_instructions;
    jc["cycles_to_target"] = c.cycles_to_target == kNoCycle ? Json(nullptr) : Json(c.cycles_to_target);
    jc["ipc"] = opt(c.ipc);
    jc["requests"] = c.requests;
    cores.push_back(jc);
  }
  j["cores_detail"] = cores;

  Json chans = Json::array();
  for (const ChannelReport& c : r.channel_reports) {
    Json jc;
    jc["bandwidth_gbps"] = c.bandwidth_gbps;
    jc["reads_retired"] = c.stats.reads_retired;
    jc["writes_retired"] = c.stats.writes_retired;
    jc["avg_latency_ns"] = c.stats.avg_latency_ns();
    jc["row_hit_rate"] = c.stats.row_hit_rate();
    jc["act_cmds"] = c.stats.act_cmds;
    jc["pre_cmds"] = c.stats.pre_cmds;
    jc["rd_cmds"] = c.stats.rd_cmds;
    jc["wr_cmds"] = c.stats.wr_cmds;
    jc["rejected_enqueues"] = c.stats.rejected_enqueues;
    jc["layer_utilization"] = c.layer_utilization;
    jc["conflicts"] = c.conflicts;
    chans.push_back(jc);
  }
  j["channels_detail"] = chans;

  j["bandwidth_gbps_total"] = r.bandwidth_gbps_total;
  j["avg_latency_ns"] = r.avg_latency_ns;
  j["row_hit_rate"] = r.row_hit_rate;

  Json energy;
  energy["total_nj"] = r.energy.total_nj;
  Json layers = Json::array();
  for (std::size_t l = 0; l < r.energy.per_layer.size(); ++l) {
    const LayerEnergy& e = r.energy.per_layer[l];
    Json jl;
    jl["layer"] = l;
    jl["clock_mhz"] = r.layer_freqs_mhz[l];
    jl["power_down_nj"] = e.standby_nj[0];
    jl["precharge_standby_nj"] = e.standby_nj[1];
    jl["active_standby_nj"] = e.standby_nj[2];
    jl["act_pre_nj"] = e.op_nj[0];
    jl["read_nj"] = e.op_nj[1];
    jl["write_nj"] = e.op_nj[2];
    jl["total_nj"] = e.total_nj;
    if (r.layer_residency_ns.size() >= (l + 1) * 3) {
      jl["power_down_ns"] = r.layer_residency_ns[l * 3 + 0];
      jl["precharge_standby_ns"] = r.layer_residency_ns[l * 3 + 1];
      jl["active_standby_ns"] = r.layer_residency_ns[l * 3 + 2];
    }
    layers.push_back(jl);
  }
  energy["per_layer"] = layers;
  j["energy"] = energy;

  j["alone_ipc"] = r.alone_ipc ? Json(*r.alone_ipc) : Json(nullptr);
  j["weighted_speedup"] = opt(r.weighted_speedup_value);
  return j.dump(2) + "\n";
}

std::string report_csv_header() {
  return "scheme,rank_org,layers,channels,cores,seed,simulated_ns,"
         "bandwidth_gbps_total,avg_latency_ns,row_hit_rate,energy_total_nj,"
         "ipc_sum,weighted_speedup\n";
}

std::string report_to_csv_row(const RunReport& r) {
  std::ostringstream out;
  out.precision(12);
  double ipc_sum = 0;
  for (const CoreReport& c : r.core_reports) ipc_sum += c.ipc.value_or(0.0);
  out << r.scheme << ',' << r.rank_org << ',' << r.layers << ',' << r.channels << ','
      << r.cores << ',' << r.seed << ',' << r.simulated_ns << ',' << r.bandwidth_gbps_total
      << ',' << r.avg_latency_ns << ',' << r.row_hit_rate << ',' << r.energy.total_nj << ','
      << ipc_sum << ',';
  if (r.weighted_speedup_value) out << *r.weighted_speedup_value;
  out << '\n';
  return out.str();
}

}  // namespace smla
