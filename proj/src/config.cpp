#include "smla/config.h"

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace smla {

namespace {

struct KeyValue {
  std::string value;
  std::size_t line;
  bool used = false;
};

using Section = std::map<std::string, KeyValue>;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

class IniDoc {
 public:
  IniDoc(std::istream& in, std::string name) : name_(std::move(name)) {
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']') fail(lineno, "malformed section header");
        section = trim(t.substr(1, t.size() - 2));
        sections_[section];
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) fail(lineno, "expected `key = value`");
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty()) fail(lineno, "empty key");
      if (!sections_[section].emplace(key, KeyValue{value, lineno}).second)
        fail(lineno, "duplicate key `" + key + "`");
    }
  }

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const {
    throw ConfigError(name_ + ":" + std::to_string(line) + ": " + msg);
  }

  template <typename T, typename Parse>
  void get(const std::string& section, const std::string& key, T& out, Parse parse) {
    auto sit = sections_.find(section);
    if (sit == sections_.end()) return;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return;
    kit->second.used = true;
    try {
      out = parse(kit->second.value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail(kit->second.line, "invalid value for `" + section + "." + key + "`");
    }
  }

  void reject_unknown() const {
    for (const auto& [section, keys] : sections_) {
      for (const auto& [key, kv] : keys) {
        if (!kv.used)
          fail(kv.line, "unknown key `" + (section.empty() ? key : section + "." + key) + "`");
      }
    }
  }

 private:
  std::string name_;
  std::map<std::string, Section> sections_;
};

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw std::runtime_error("not an integer");
  return v;
}

int parse_int(const std::string& s) {
  const std::uint64_t v = parse_u64(s);
  if (v > 1u << 30) throw std::runtime_error("out of range");
  return static_cast<int>(v);
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::runtime_error("not a number");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw std::runtime_error("not a boolean");
}

IoScheme parse_scheme(const std::string& s) {
  if (s == "baseline") return IoScheme::Baseline;
  if (s == "dedicated") return IoScheme::DedicatedIo;
  if (s == "cascaded") return IoScheme::CascadedIo;
  throw std::runtime_error("expected baseline|dedicated|cascaded");
}

RankOrg parse_rank_org(const std::string& s) {
  if (s == "slr") return RankOrg::SingleLayerRank;
  if (s == "mlr") return RankOrg::MultiLayerRank;
  throw std::runtime_error("expected slr|mlr");
}

std::array<double, 4> parse_freq_row(const std::string& s) {
  std::istringstream in(s);
  std::array<double, 4> row{};
  for (double& v : row) {
    if (!(in >> v)) throw std::runtime_error("expected four values (200/400/800/1600 MHz)");
  }
  std::string extra;
  if (in >> extra) throw std::runtime_error("expected exactly four values");
  return row;
}

}  // namespace

std::vector<int> SimConfig::layer_freqs_mhz() const {
  std::vector<int> freqs(layers);
  for (int l = 0; l < layers; ++l) freqs[l] = layer_clock_mhz(scheme, l, layers, base_freq_mhz);
  return freqs;
}

IoBusConfig SimConfig::bus_config() const {
  IoBusConfig b;
  b.scheme = scheme;
  b.rank_org = rank_org;
  b.layers = layers;
  b.io_width_bits = io_width;
  b.base_freq_mhz = base_freq_mhz;
  return b;
}

ChannelConfig SimConfig::channel_config() const {
  ChannelConfig c;
  c.bus = bus_config();
  c.timing = timing;
  c.ranks = effective_ranks();
  c.banks_per_rank = banks_per_rank;
  c.queue_capacity = queue_capacity;
  c.write_watermark = write_watermark;
  c.max_burst_lead = max_burst_lead;
  c.power_down_threshold_ns = power_down_threshold_ns;
  c.fairness_cores = cores;
  c.unavailable_every_ns = unavailable_every_ns;
  c.unavailable_for_ns = unavailable_for_ns;
  return c;
}

AddressMap SimConfig::address_map() const {
  return AddressMap(channels, effective_ranks(), banks_per_rank, rows_per_bank,
                    lines_per_row());
}

CoreConfig SimConfig::core_config() const {
  CoreConfig c;
  c.window_entries = window_entries;
  c.issue_width = issue_width;
  c.mshrs = mshrs;
  c.target_instructions = target_instructions;
  return c;
}

LlcConfig SimConfig::llc_config() const {
  LlcConfig c;
  c.size_bytes = llc_size_bytes;
  c.ways = llc_ways;
  return c;
}

void SimConfig::validate() const {
  if (channels < 1 || channels > 4 || !is_power_of_two(static_cast<std::uint64_t>(channels)))
    throw ConfigError("topology.channels must be 1, 2 or 4");
  if (layers != 1 && layers != 2 && layers != 4 && layers != 8)
    throw ConfigError("topology.layers must be a power of two (1, 2, 4 or 8)");
  if (ranks >= 0) {
    if (rank_org == RankOrg::SingleLayerRank && ranks != layers)
      throw ConfigError("topology.ranks must equal topology.layers with rank_org = slr");
    if (rank_org == RankOrg::MultiLayerRank && ranks != 1)
      throw ConfigError("topology.ranks must be 1 with rank_org = mlr");
  }
  if (row_bytes < kLineBytes || !is_power_of_two(row_bytes))
    throw ConfigError("topology.row_bytes must be a power of two >= 64");
  if (!is_power_of_two(rows_per_bank)) throw ConfigError("topology.rows_per_bank must be a power of two");
  if (banks_per_rank < 1 || !is_power_of_two(static_cast<std::uint64_t>(banks_per_rank)))
    throw ConfigError("topology.banks_per_rank must be a power of two");

  bus_config().validate();
  timing.validate();
  energy.validate();
  channel_config().validate();

  // Every layer clock must sit on the energy table's frequency grid.
  for (const int f : layer_freqs_mhz()) EnergyParams::freq_index(f);

  if (cores < 1) throw ConfigError("frontend.cores must be >= 1");
  if (core_freq_mhz < fast_freq_mhz())
    throw ConfigError("frontend.core_freq_mhz must be >= the bus fast clock");
  if (issue_width < 1) throw ConfigError("frontend.issue_width must be >= 1");
  if (window_entries < 1) throw ConfigError("frontend.window must be >= 1");
  if (mshrs < 1) throw ConfigError("frontend.mshrs must be >= 1");
  if (min_sim_time_ns < 0) throw ConfigError("frontend.min_sim_time_ns must be >= 0");
  if (llc_enabled) llc_config();  // constructor validates

  address_map();  // validates the mapping geometry
}

SimConfig load_config(std::istream& in, const std::string& name) {
  IniDoc doc(in, name);
  SimConfig c;

  doc.get("topology", "channels", c.channels, parse_int);
  doc.get("topology", "layers", c.layers, parse_int);
  doc.get("topology", "ranks", c.ranks, parse_int);
  doc.get("topology", "banks_per_rank", c.banks_per_rank, parse_int);
  doc.get("topology", "rows_per_bank", c.rows_per_bank, parse_u64);
  doc.get("topology", "row_bytes", c.row_bytes, parse_u64);
  doc.get("topology", "io_width", c.io_width, parse_int);
  doc.get("topology", "base_freq_mhz", c.base_freq_mhz, parse_int);

  doc.get("scheme", "io", c.scheme, parse_scheme);
  doc.get("scheme", "rank_org", c.rank_org, parse_rank_org);

  doc.get("timing", "t_rcd_ns", c.timing.t_rcd_ns, parse_double);
  doc.get("timing", "t_rp_ns", c.timing.t_rp_ns, parse_double);
  doc.get("timing", "t_ras_ns", c.timing.t_ras_ns, parse_double);
  doc.get("timing", "t_cas_ns", c.timing.t_cas_ns, parse_double);
  doc.get("timing", "t_cwl_ns", c.timing.t_cwl_ns, parse_double);
  doc.get("timing", "t_wr_ns", c.timing.t_wr_ns, parse_double);

  doc.get("controller", "queue_capacity", c.queue_capacity,
          [](const std::string& s) { return static_cast<std::size_t>(parse_u64(s)); });
  doc.get("controller", "write_watermark", c.write_watermark,
          [](const std::string& s) { return static_cast<std::size_t>(parse_u64(s)); });
  doc.get("controller", "max_burst_lead", c.max_burst_lead, parse_u64);
  doc.get("controller", "power_down_threshold_ns", c.power_down_threshold_ns, parse_double);
  doc.get("controller", "unavailable_every_ns", c.unavailable_every_ns, parse_double);
  doc.get("controller", "unavailable_for_ns", c.unavailable_for_ns, parse_double);

  doc.get("energy", "vdd", c.energy.vdd, parse_double);
  doc.get("energy", "power_down_ma", c.energy.power_down_ma, parse_freq_row);
  doc.get("energy", "precharge_standby_ma", c.energy.precharge_standby_ma, parse_freq_row);
  doc.get("energy", "active_standby_ma", c.energy.active_standby_ma, parse_freq_row);
  doc.get("energy", "act_pre_nj", c.energy.act_pre_nj, parse_freq_row);
  doc.get("energy", "read_nj", c.energy.read_nj, parse_freq_row);
  doc.get("energy", "write_nj", c.energy.write_nj, parse_freq_row);

  doc.get("frontend", "cores", c.cores, parse_int);
  doc.get("frontend", "core_freq_mhz", c.core_freq_mhz, parse_int);
  doc.get("frontend", "window", c.window_entries, parse_int);
  doc.get("frontend", "issue_width", c.issue_width, parse_int);
  doc.get("frontend", "mshrs", c.mshrs, parse_int);
  doc.get("frontend", "target_instructions", c.target_instructions, parse_u64);
  doc.get("frontend", "min_sim_time_ns", c.min_sim_time_ns, parse_double);
  doc.get("frontend", "llc", c.llc_enabled, parse_bool);
  doc.get("frontend", "llc_size_kb", c.llc_size_bytes,
          [](const std::string& s) { return parse_u64(s) * 1024; });
  doc.get("frontend", "llc_ways", c.llc_ways, parse_int);

  doc.get("sim", "seed", c.seed, parse_u64);

  doc.reject_unknown();
  c.validate();
  c.ranks = c.effective_ranks();  // canonical form, so save/load round-trips compare equal
  return c;
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return load_config(in, path);
}

std::string serialize_config(const SimConfig& c) {
  std::ostringstream out;
  out.precision(17);
  auto row = [&](const std::array<double, 4>& r) {
    std::ostringstream s;
    s.precision(17);
    s << r[0] << " " << r[1] << " " << r[2] << " " << r[3];
    return s.str();
  };
  out << "[topology]\n"
      << "channels = " << c.channels << "\n"
      << "layers = " << c.layers << "\n"
      << "ranks = " << c.effective_ranks() << "\n"
      << "banks_per_rank = " << c.banks_per_rank << "\n"
      << "rows_per_bank = " << c.rows_per_bank << "\n"
      << "row_bytes = " << c.row_bytes << "\n"
      << "io_width = " << c.io_width << "\n"
      << "base_freq_mhz = " << c.base_freq_mhz << "\n\n"
      << "[scheme]\n"
      << "io = " << to_string(c.scheme) << "\n"
      << "rank_org = " << to_string(c.rank_org) << "\n\n"
      << "[timing]\n"
      << "t_rcd_ns = " << c.timing.t_rcd_ns << "\n"
      << "t_rp_ns = " << c.timing.t_rp_ns << "\n"
      << "t_ras_ns = " << c.timing.t_ras_ns << "\n"
      << "t_cas_ns = " << c.timing.t_cas_ns << "\n"
      << "t_cwl_ns = " << c.timing.t_cwl_ns << "\n"
      << "t_wr_ns = " << c.timing.t_wr_ns << "\n\n"
      << "[controller]\n"
      << "queue_capacity = " << c.queue_capacity << "\n"
      << "write_watermark = " << c.write_watermark << "\n"
      << "max_burst_lead = " << c.max_burst_lead << "\n"
      << "power_down_threshold_ns = " << c.power_down_threshold_ns << "\n"
      << "unavailable_every_ns = " << c.unavailable_every_ns << "\n"
      << "unavailable_for_ns = " << c.unavailable_for_ns << "\n\n"
      << "[energy]\n"
      << "vdd = " << c.energy.vdd << "\n"
      << "power_down_ma = " << row(c.energy.power_down_ma) << "\n"
      << "precharge_standby_ma = " << row(c.energy.precharge_standby_ma) << "\n"
      << "active_standby_ma = " << row(c.energy.active_standby_ma) << "\n"
      << "act_pre_nj = " << row(c.energy.act_pre_nj) << "\n"
      << "read_nj = " << row(c.energy.read_nj) << "\n"
      << "write_nj = " << row(c.energy.write_nj) << "\n\n"
      << "[frontend]\n"
      << "cores = " << c.cores << "\n"
      << "core_freq_mhz = " << c.core_freq_mhz << "\n"
      << "window = " << c.window_entries << "\n"
      << "issue_width = " << c.issue_width << "\n"
      << "mshrs = " << c.mshrs << "\n"
      << "target_instructions = " << c.target_instructions << "\n"
      << "min_sim_time_ns = " << c.min_sim_time_ns << "\n"
      << "llc = " << (c.llc_enabled ? "on" : "off") << "\n"
      << "llc_size_kb = " << c.llc_size_bytes / 1024 << "\n"
      << "llc_ways = " << c.llc_ways << "\n\n"
      << "[sim]\n"
      << "seed = " << c.seed << "\n";
  return out.str();
}

std::vector<WorkloadEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open workload manifest " + path);
  const auto base = std::filesystem::path(path).parent_path();

  std::vector<WorkloadEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream fields(t);
    WorkloadEntry e;
    fields >> e.trace_path;
    fields >> e.target_instructions;  // optional; 0 if absent
    std::filesystem::path p(e.trace_path);
    if (p.is_relative()) e.trace_path = (base / p).string();
    entries.push_back(e);
  }
  if (entries.empty()) throw ConfigError(path + ": manifest lists no traces");
  return entries;
}

}  // namespace smla
