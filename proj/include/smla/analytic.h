#pragma once

#include "smla/types.h"

namespace smla::analytic {

// Parameters of the read/write datapath of one DRAM chip, from the cell
// array down to the off-chip (or TSV) IO bus. All bandwidths below are
// decimal GBps (1 GB = 1e9 bytes).
struct DatapathSpec {
  double row_size_bits = 8192;  // bits moved to the row buffer per ACT
  double t_rcd_ns = 13.0;       // activation latency
  double gsa_width_bits = 128;  // bits per global-bitline access
  double t_gbl_ns = 4.0;        // global bitline access latency
  double io_width_bits = 128;   // off-chip / TSV bus width
  double io_freq_mhz = 200;

  void validate() const;  // throws ConfigError
};

enum class Stage { Activation, GlobalBitline, Io };

const char* to_string(Stage s);

struct BandwidthBreakdown {
  double activation_gbps;
  double global_bitline_gbps;
  double io_gbps;
  double effective_gbps;  // min of the three
  Stage bottleneck;       // earliest stage on ties
};

double activation_bandwidth_gbps(const DatapathSpec& spec);
double global_bitline_bandwidth_gbps(const DatapathSpec& spec);
double io_bandwidth_gbps(double io_width_bits, double io_freq_mhz);
BandwidthBreakdown effective_bandwidth(const DatapathSpec& spec);

// One bit per global sense amplifier per internal clock.
double internal_bandwidth_from_gsa_gbps(double n_gsa, double f_internal_mhz);

// Peak IO bandwidth with all `layers` stacked chips accessed simultaneously.
// Layer counts must be powers of two (the divide-by-two clock ladder cannot
// produce anything else).
double smla_peak_bandwidth_gbps(int layers, double io_width_bits, double base_freq_mhz);

}  // namespace smla::analytic
