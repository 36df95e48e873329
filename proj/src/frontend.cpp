#include "smla/frontend.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "smla/rng.h"

namespace smla {

std::vector<TraceEntry> parse_trace(std::istream& in, const std::string& name) {
  std::vector<TraceEntry> trace;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    TraceEntry e;
    std::string addr, kind;
    if (!(fields >> e.bubble_count >> addr >> kind) || (kind != "R" && kind != "W"))
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": expected `<bubbles> <hex-address> <R|W>`");
    e.address = std::stoull(addr, nullptr, 16);
    e.kind = kind == "R" ? AccessKind::Read : AccessKind::Write;
    trace.push_back(e);
  }
  return trace;
}

std::vector<TraceEntry> load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file " + path);
  return parse_trace(in, path);
}

void write_trace(std::ostream& out, const std::vector<TraceEntry>& trace) {
  char buf[64];
  for (const TraceEntry& e : trace) {
    std::snprintf(buf, sizeof buf, "%llu %llx %c\n",
                  static_cast<unsigned long long>(e.bubble_count),
                  static_cast<unsigned long long>(e.address),
                  e.kind == AccessKind::Read ? 'R' : 'W');
    out << buf;
  }
}

std::vector<TraceEntry> gen_synthetic(const SyntheticTraceSpec& spec) {
  if (spec.target_mpki <= 0 || spec.target_mpki > 1000)
    throw ConfigError("tracegen: target_mpki must be in (0, 1000]");
  if (spec.row_hit_fraction < 0 || spec.row_hit_fraction > 1)
    throw ConfigError("tracegen: row_hit_fraction must be in [0, 1]");
  if (spec.read_fraction < 0 || spec.read_fraction > 1)
    throw ConfigError("tracegen: read_fraction must be in [0, 1]");
  if (spec.footprint_bytes < static_cast<std::uint64_t>(kLineBytes))
    throw ConfigError("tracegen: footprint smaller than one line");
  if (spec.row_hit_fraction < 1.0 && spec.footprint_bytes <= spec.row_bytes)
    throw ConfigError("tracegen: footprint must exceed one row to generate row misses");

  const std::uint64_t lines = spec.footprint_bytes / kLineBytes;
  const double instr_per_entry = 1000.0 / spec.target_mpki;  // includes the access itself

  Rng rng(spec.seed);
  std::vector<TraceEntry> trace;
  trace.reserve(static_cast<std::size_t>(spec.instructions / instr_per_entry) + 1);

  std::uint64_t cur_line = 0;
  std::uint64_t emitted_instructions = 0;
  double carry = 0.0;
  while (emitted_instructions < spec.instructions) {
    carry += instr_per_entry;
    auto entry_instr = static_cast<std::uint64_t>(carry);
    carry -= static_cast<double>(entry_instr);
    if (entry_instr == 0) entry_instr = 1;

    TraceEntry e;
    e.bubble_count = entry_instr - 1;
    if (rng.next_bool(spec.row_hit_fraction)) {
      cur_line = (cur_line + 1) % lines;
    } else {
      cur_line = rng.next_below(lines);
    }
    e.address = cur_line * kLineBytes;
    e.kind = rng.next_bool(spec.read_fraction) ? AccessKind::Read : AccessKind::Write;
    trace.push_back(e);
    emitted_instructions += entry_instr;
  }
  return trace;
}

double realized_mpki(const std::vector<TraceEntry>& trace) {
  std::uint64_t instructions = 0;
  for (const TraceEntry& e : trace) instructions += e.bubble_count + 1;
  return instructions ? 1000.0 * static_cast<double>(trace.size()) /
                            static_cast<double>(instructions)
                      : 0.0;
}

Llc::Llc(const LlcConfig& cfg) : ways_(cfg.ways), line_bytes_(cfg.line_bytes) {
  if (cfg.ways <= 0 || cfg.line_bytes <= 0 || cfg.size_bytes == 0)
    throw ConfigError("llc: size, ways and line_bytes must be positive");
  const std::uint64_t lines = cfg.size_bytes / (static_cast<std::uint64_t>(cfg.line_bytes));
  if (lines % cfg.ways != 0) throw ConfigError("llc: size must be a multiple of ways*line");
  sets_ = lines / cfg.ways;
  if (!is_power_of_two(sets_)) throw ConfigError("llc: set count must be a power of two");
  tags_.resize(sets_);
}

bool Llc::access(std::uint64_t address) {
  const std::uint64_t line = address / line_bytes_;
  auto& set = tags_[line % sets_];
  const std::uint64_t tag = line / sets_;
  auto it = std::find(set.begin(), set.end(), tag);
  if (it != set.end()) {
    set.erase(it);
    set.insert(set.begin(), tag);
    return true;
  }
  set.insert(set.begin(), tag);
  if (set.size() > static_cast<std::size_t>(ways_)) set.pop_back();
  return false;
}

std::vector<TraceEntry> llc_filter(const std::vector<TraceEntry>& trace, const LlcConfig& cfg) {
  Llc llc(cfg);
  std::vector<TraceEntry> out;
  std::uint64_t absorbed = 0;
  for (const TraceEntry& e : trace) {
    if (llc.access(e.address)) {
      absorbed += e.bubble_count + 1;  // the hit retires as a bubble too
    } else {
      TraceEntry m = e;
      m.bubble_count += absorbed;
      absorbed = 0;
      out.push_back(m);
    }
  }
  if (absorbed) {
    // Trailing hits: keep the instruction count by folding them into a final
    // read of the last line touched (rare, cosmetic).
    if (!out.empty()) {
      out.back().bubble_count += absorbed;
    } else if (!trace.empty()) {
      out.push_back(TraceEntry{absorbed - 1, trace.back().address, AccessKind::Read});
    }
  }
  return out;
}

double weighted_speedup(const std::vector<double>& ipc_shared,
                        const std::vector<double>& ipc_alone) {
  if (ipc_shared.size() != ipc_alone.size())
    throw ConfigError("weighted speedup: shared/alone IPC vectors differ in length");
  double ws = 0.0;
  for (std::size_t i = 0; i < ipc_shared.size(); ++i) {
    if (ipc_alone[i] <= 0)
      throw ConfigError("weighted speedup: alone IPC of core " + std::to_string(i) +
                        " must be > 0");
    ws += ipc_shared[i] / ipc_alone[i];
  }
  return ws;
}

Core::Core(int id, CoreConfig cfg, std::vector<TraceEntry> trace, DispatchFn dispatch)
    : id_(id), cfg_(cfg), trace_(std::move(trace)), dispatch_(std::move(dispatch)) {
  window_.resize(cfg_.window_entries);
  for (const TraceEntry& e : trace_) trace_instructions_ += e.bubble_count + 1;
  if (trace_instructions_ == 0 || cfg_.target_instructions == 0) {
    target_cycle_ = 0;  // nothing to run
  } else {
    advance_trace();
  }
}

void Core::advance_trace() {
  if (trace_pos_ >= trace_.size()) trace_pos_ = 0;  // replay to keep up pressure
  bubbles_left_ = trace_[trace_pos_].bubble_count;
}

bool Core::fetch_one() {
  if (trace_instructions_ == 0) return false;
  if (in_window_ >= window_.size()) return false;

  if (bubbles_left_ > 0) {
    --bubbles_left_;
    window_[tail_] = Slot{false, true, 0};
  } else {
    if (mshrs_in_use_ >= cfg_.mshrs) return false;
    const TraceEntry& e = trace_[trace_pos_];
    const std::uint64_t tag = next_tag_;
    if (!dispatch_(id_, e.kind, e.address, tag)) return false;  // queue full, retry
    ++next_tag_;
    ++mshrs_in_use_;
    ++dispatched_;
    window_[tail_] = Slot{true, false, tag};
    pending_.emplace_back(tag, tail_);
    ++trace_pos_;
    advance_trace();
  }
  tail_ = (tail_ + 1) % window_.size();
  ++in_window_;
  return true;
}

void Core::step(std::uint64_t core_cycle) {
  if (trace_instructions_ == 0) return;

  // Retire in order from the head, then refill.
  for (int i = 0; i < cfg_.issue_width && in_window_ > 0; ++i) {
    if (!window_[head_].done) break;
    head_ = (head_ + 1) % window_.size();
    --in_window_;
    ++retired_;
    if (retired_ == cfg_.target_instructions && target_cycle_ == kNoCycle)
      target_cycle_ = core_cycle + 1;  // finished during this cycle
  }
  for (int i = 0; i < cfg_.issue_width; ++i) {
    if (!fetch_one()) break;
  }
}

void Core::notify_complete(std::uint64_t tag) {
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    if (pending_[i].first == tag) {
      window_[pending_[i].second].done = true;
      pending_[i] = pending_.back();
      pending_.pop_back();
      --mshrs_in_use_;
      return;
    }
  }
  throw SimError("completion for unknown tag");
}

double Core::ipc() const {
  if (target_cycle_ == kNoCycle || target_cycle_ == 0) return 0.0;
  return static_cast<double>(cfg_.target_instructions) / static_cast<double>(target_cycle_);
}

}  // namespace smla
