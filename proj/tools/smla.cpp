// Command-line front end: single runs, grid sweeps, synthetic trace
// generation, closed-form datapath analysis, and config validation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "smla/analytic.h"
#include "smla/config.h"
#include "smla/report.h"
#include "smla/sim.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct RunArgs {
  std::string config_path;
  std::string workload_path;
  std::string out_dir;
  std::string format = "structured";
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool speedup = false;
};

std::vector<std::vector<smla::TraceEntry>> load_workload(
    const std::vector<smla::WorkloadEntry>& entries, std::vector<std::uint64_t>& targets) {
  std::vector<std::vector<smla::TraceEntry>> traces;
  for (const auto& e : entries) {
    traces.push_back(smla::load_trace(e.trace_path));
    targets.push_back(e.target_instructions);
  }
  return traces;
}

void emit_report(const smla::RunReport& report, const std::string& format,
                 const std::string& out_dir, const std::string& stem) {
  const std::string json = smla::report_to_json(report);
  const std::string csv = smla::report_csv_header() + smla::report_to_csv_row(report);
  if (out_dir.empty()) {
    std::cout << (format == "csv" ? csv : json);
    return;
  }
  fs::create_directories(out_dir);
  std::ofstream(fs::path(out_dir) / (stem + ".json")) << json;
  std::ofstream(fs::path(out_dir) / (stem + ".csv")) << csv;
  std::cout << "wrote " << (fs::path(out_dir) / stem).string() << ".{json,csv}\n";
}

int cmd_run(const RunArgs& args) {
  smla::SimConfig cfg = smla::load_config_file(args.config_path);
  if (args.seed_set) cfg.seed = args.seed;
  const auto entries = smla::load_manifest(args.workload_path);
  if (static_cast<int>(entries.size()) != cfg.cores) {
    cfg.cores = static_cast<int>(entries.size());
    cfg.validate();
  }
  std::vector<std::uint64_t> targets;
  auto traces = load_workload(entries, targets);

  smla::RunReport report;
  if (args.speedup && cfg.cores > 1) {
    report = smla::run_with_weighted_speedup(cfg, traces, targets);
  } else {
    smla::Simulation sim(cfg, std::move(traces), targets);
    report = sim.run();
  }
  emit_report(report, args.format, args.out_dir, "run");
  return 0;
}

struct SweepArgs {
  std::string config_path;
  std::string workload_path;
  std::string out_dir;
  std::vector<std::string> schemes;
  std::vector<int> layers;
  std::vector<std::string> rank_orgs;
  std::vector<int> cores;
  int jobs = 1;
};

struct SweepPoint {
  smla::IoScheme scheme;
  smla::RankOrg org;
  int layers;
  int cores;
  std::string name() const {
    return std::string("run_") + smla::to_string(scheme) + "_" + smla::to_string(org) + "_L" +
           std::to_string(layers) + "_c" + std::to_string(cores);
  }
};

int cmd_sweep(const SweepArgs& args) {
  smla::SimConfig base = smla::load_config_file(args.config_path);
  const auto entries = smla::load_manifest(args.workload_path);

  std::vector<SweepPoint> grid;
  for (const auto& s : args.schemes) {
    for (const int l : args.layers) {
      for (const auto& o : args.rank_orgs) {
        for (const int c : args.cores) {
          SweepPoint p;
          if (s == "baseline") p.scheme = smla::IoScheme::Baseline;
          else if (s == "dedicated") p.scheme = smla::IoScheme::DedicatedIo;
          else if (s == "cascaded") p.scheme = smla::IoScheme::CascadedIo;
          else throw smla::ConfigError("unknown scheme `" + s + "`");
          if (o == "slr") p.org = smla::RankOrg::SingleLayerRank;
          else if (o == "mlr") p.org = smla::RankOrg::MultiLayerRank;
          else throw smla::ConfigError("unknown rank org `" + o + "`");
          p.layers = l;
          p.cores = c;
          grid.push_back(p);
        }
      }
    }
  }

  std::vector<smla::RunReport> reports(grid.size());
  std::vector<std::string> errors(grid.size());
  std::mutex next_mu;
  std::size_t next = 0;

  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(next_mu);
        if (next >= grid.size()) return;
        i = next++;
      }
      const SweepPoint& p = grid[i];
      try {
        if (p.cores > static_cast<int>(entries.size()))
          throw smla::ConfigError("grid point needs " + std::to_string(p.cores) +
                                  " traces, manifest has " + std::to_string(entries.size()));
        smla::SimConfig cfg = base;
        cfg.scheme = p.scheme;
        cfg.rank_org = p.org;
        cfg.layers = p.layers;
        cfg.ranks = -1;  // re-derive from the new organization
        cfg.cores = p.cores;
        cfg.validate();

        std::vector<std::uint64_t> targets;
        std::vector<std::vector<smla::TraceEntry>> traces;
        for (int c = 0; c < p.cores; ++c) {
          traces.push_back(smla::load_trace(entries[c].trace_path));
          targets.push_back(entries[c].target_instructions);
        }
        reports[i] = smla::run_with_weighted_speedup(cfg, traces, targets);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  std::vector<std::thread> pool;
  const int jobs = std::max(1, args.jobs);
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!errors[i].empty())
      throw smla::ConfigError("sweep point " + grid[i].name() + " failed: " + errors[i]);
  }

  if (!args.out_dir.empty()) fs::create_directories(args.out_dir);

  // Speedups are relative to the baseline-scheme point with the same layer
  // count, rank organization and core count, when the grid contains one.
  auto find_reference = [&](const SweepPoint& p) -> const smla::RunReport* {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i].scheme == smla::IoScheme::Baseline && grid[i].layers == p.layers &&
          grid[i].org == p.org && grid[i].cores == p.cores)
        return &reports[i];
    }
    return nullptr;
  };

  Json summary = Json::array();
  std::string csv =
      "scheme,rank_org,layers,cores,weighted_speedup,speedup_vs_baseline,"
      "bandwidth_gbps_total,energy_total_nj\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const SweepPoint& p = grid[i];
    const smla::RunReport& r = reports[i];
    if (!args.out_dir.empty())
      std::ofstream(fs::path(args.out_dir) / (p.name() + ".json")) << smla::report_to_json(r);

    const smla::RunReport* ref = find_reference(p);
    std::optional<double> vs_base;
    if (ref && ref->weighted_speedup_value && r.weighted_speedup_value &&
        *ref->weighted_speedup_value > 0)
      vs_base = *r.weighted_speedup_value / *ref->weighted_speedup_value;

    Json row;
    row["scheme"] = smla::to_string(p.scheme);
    row["rank_org"] = smla::to_string(p.org);
    row["layers"] = p.layers;
    row["cores"] = p.cores;
    row["weighted_speedup"] = r.weighted_speedup_value ? Json(*r.weighted_speedup_value) : Json(nullptr);
    row["speedup_vs_baseline"] = vs_base ? Json(*vs_base) : Json(nullptr);
    row["bandwidth_gbps_total"] = r.bandwidth_gbps_total;
    row["energy_total_nj"] = r.energy.total_nj;
    summary.push_back(row);

    std::ostringstream line;
    line.precision(12);
    line << smla::to_string(p.scheme) << ',' << smla::to_string(p.org) << ',' << p.layers << ','
         << p.cores << ',' << r.weighted_speedup_value.value_or(0.0) << ',';
    if (vs_base) line << *vs_base;
    line << ',' << r.bandwidth_gbps_total << ',' << r.energy.total_nj << '\n';
    csv += line.str();
  }

  if (args.out_dir.empty()) {
    std::cout << summary.dump(2) << "\n";
  } else {
    std::ofstream(fs::path(args.out_dir) / "sweep_summary.json") << summary.dump(2) << "\n";
    std::ofstream(fs::path(args.out_dir) / "sweep_summary.csv") << csv;
    std::cout << "wrote " << grid.size() << " reports to " << args.out_dir << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-accurate simulator for 3D-stacked DRAM with simultaneous "
               "multi-layer access (dedicated/cascaded TSV IO)"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run one simulation from a config and a workload");
  run->add_option("--config", run_args.config_path, "Config file")->required();
  run->add_option("--workload", run_args.workload_path, "Workload manifest")->required();
  run->add_option("--out", run_args.out_dir, "Output directory (default: stdout)");
  run->add_option("--seed", run_args.seed, "Override [sim] seed")
      ->each([&](const std::string&) { run_args.seed_set = true; });
  run->add_option("--format", run_args.format, "structured | csv")
      ->check(CLI::IsMember({"structured", "csv"}));
  run->add_flag("--speedup", run_args.speedup, "Also run each trace alone for weighted speedup");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Run a scheme/layers/rank-org/cores grid");
  sweep->add_option("--config", sweep_args.config_path, "Base config file")->required();
  sweep->add_option("--workload", sweep_args.workload_path, "Workload manifest")->required();
  sweep->add_option("--out", sweep_args.out_dir, "Output directory");
  sweep->add_option("--schemes", sweep_args.schemes, "baseline,dedicated,cascaded")
      ->delimiter(',');
  sweep->add_option("--layers", sweep_args.layers, "Layer counts")->delimiter(',');
  sweep->add_option("--rank-orgs", sweep_args.rank_orgs, "slr,mlr")->delimiter(',');
  sweep->add_option("--cores", sweep_args.cores, "Core counts")->delimiter(',');
  sweep->add_option("--jobs", sweep_args.jobs, "Parallel workers");

  struct {
    std::string out;
    double mpki = 10, row_hit = 0.5, read_frac = 0.67;
    std::uint64_t instructions = 1'000'000, footprint_kb = 1024, row_bytes = 1024, seed = 1;
  } tg;
  auto* tracegen = app.add_subcommand("tracegen", "Generate a synthetic trace at a target MPKI");
  tracegen->add_option("--out", tg.out, "Output trace file")->required();
  tracegen->add_option("--mpki", tg.mpki, "Target memory accesses per kilo-instruction");
  tracegen->add_option("--instructions", tg.instructions, "Instruction count");
  tracegen->add_option("--footprint-kb", tg.footprint_kb, "Address footprint (KiB)");
  tracegen->add_option("--row-hit-fraction", tg.row_hit, "Sequential-access fraction");
  tracegen->add_option("--read-fraction", tg.read_frac, "Read fraction");
  tracegen->add_option("--row-bytes", tg.row_bytes, "Row size for feasibility checks");
  tracegen->add_option("--seed", tg.seed, "Generator seed");

  struct {
    double row_bits = 8192, t_rcd = 13.0, gsa_bits = 128, t_gbl = 4.0;
    double io_bits = 128, io_mhz = 200;
    int layers = 4;
  } an;
  auto* analytic = app.add_subcommand("analytic", "Closed-form datapath bandwidth analysis");
  analytic->add_option("--row-size-bits", an.row_bits);
  analytic->add_option("--t-rcd-ns", an.t_rcd);
  analytic->add_option("--gsa-width-bits", an.gsa_bits);
  analytic->add_option("--t-gbl-ns", an.t_gbl);
  analytic->add_option("--io-width-bits", an.io_bits);
  analytic->add_option("--io-freq-mhz", an.io_mhz);
  analytic->add_option("--layers", an.layers, "Stack height for the multi-layer peak");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Load and validate a config file");
  validate->add_option("--config", validate_path, "Config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (tracegen->parsed()) {
      smla::SyntheticTraceSpec spec;
      spec.target_mpki = tg.mpki;
      spec.row_hit_fraction = tg.row_hit;
      spec.read_fraction = tg.read_frac;
      spec.footprint_bytes = tg.footprint_kb * 1024;
      spec.instructions = tg.instructions;
      spec.row_bytes = tg.row_bytes;
      spec.seed = tg.seed;
      const auto trace = smla::gen_synthetic(spec);
      std::ofstream out(tg.out);
      if (!out) throw smla::ConfigError("cannot open " + tg.out + " for writing");
      smla::write_trace(out, trace);
      std::cout << "wrote " << trace.size() << " accesses (" << smla::realized_mpki(trace)
                << " MPKI) to " << tg.out << "\n";
      return 0;
    }
    if (analytic->parsed()) {
      smla::analytic::DatapathSpec spec;
      spec.row_size_bits = an.row_bits;
      spec.t_rcd_ns = an.t_rcd;
      spec.gsa_width_bits = an.gsa_bits;
      spec.t_gbl_ns = an.t_gbl;
      spec.io_width_bits = an.io_bits;
      spec.io_freq_mhz = an.io_mhz;
      const auto b = smla::analytic::effective_bandwidth(spec);
      std::cout << "activation       " << b.activation_gbps << " GBps\n"
                << "global bitline   " << b.global_bitline_gbps << " GBps\n"
                << "io               " << b.io_gbps << " GBps\n"
                << "effective        " << b.effective_gbps << " GBps (bottleneck: "
                << smla::analytic::to_string(b.bottleneck) << ")\n"
                << "multi-layer peak " << smla::analytic::smla_peak_bandwidth_gbps(
                                              an.layers, an.io_bits, an.io_mhz)
                << " GBps (" << an.layers << " layers)\n";
      return 0;
    }
    if (validate->parsed()) {
      const smla::SimConfig cfg = smla::load_config_file(validate_path);
      std::cout << smla::serialize_config(cfg);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
