#include "smla/analytic.h"

#include <algorithm>

namespace smla::analytic {

void DatapathSpec::validate() const {
  if (row_size_bits <= 0) throw ConfigError("analytic.row_size_bits must be > 0");
  if (t_rcd_ns <= 0) throw ConfigError("analytic.t_rcd_ns must be > 0");
  if (gsa_width_bits <= 0) throw ConfigError("analytic.gsa_width_bits must be > 0");
  if (t_gbl_ns <= 0) throw ConfigError("analytic.t_gbl_ns must be > 0");
  if (io_width_bits <= 0) throw ConfigError("analytic.io_width_bits must be > 0");
  if (io_freq_mhz <= 0) throw ConfigError("analytic.io_freq_mhz must be > 0");
  if (gsa_width_bits > row_size_bits)
    throw ConfigError("analytic.gsa_width_bits must not exceed row_size_bits");
}

const char* to_string(Stage s) {
  switch (s) {
    case Stage::Activation: return "activation";
    case Stage::GlobalBitline: return "global_bitline";
    case Stage::Io: return "io";
  }
  return "?";
}

// bytes-per-ns equals decimal GBps, so all three stages reduce to that form.

double activation_bandwidth_gbps(const DatapathSpec& spec) {
  return (spec.row_size_bits / 8.0) / spec.t_rcd_ns;
}

double global_bitline_bandwidth_gbps(const DatapathSpec& spec) {
  return (spec.gsa_width_bits / 8.0) / spec.t_gbl_ns;
}

double io_bandwidth_gbps(double io_width_bits, double io_freq_mhz) {
  return (io_width_bits / 8.0) * io_freq_mhz * 1e-3;
}

BandwidthBreakdown effective_bandwidth(const DatapathSpec& spec) {
  spec.validate();
  BandwidthBreakdown b;
  b.activation_gbps = activation_bandwidth_gbps(spec);
  b.global_bitline_gbps = global_bitline_bandwidth_gbps(spec);
  b.io_gbps = io_bandwidth_gbps(spec.io_width_bits, spec.io_freq_mhz);
  b.effective_gbps = std::min({b.activation_gbps, b.global_bitline_gbps, b.io_gbps});
  // Ties resolve to the earliest pipeline stage.
  if (b.activation_gbps == b.effective_gbps) {
    b.bottleneck = Stage::Activation;
  } else if (b.global_bitline_gbps == b.effective_gbps) {
    b.bottleneck = Stage::GlobalBitline;
  } else {
    b.bottleneck = Stage::Io;
  }
  return b;
}

double internal_bandwidth_from_gsa_gbps(double n_gsa, double f_internal_mhz) {
  if (n_gsa <= 0) throw ConfigError("analytic.n_gsa must be > 0");
  if (f_internal_mhz <= 0) throw ConfigError("analytic.f_internal_mhz must be > 0");
  return (n_gsa / 8.0) * f_internal_mhz * 1e-3;
}

double smla_peak_bandwidth_gbps(int layers, double io_width_bits, double base_freq_mhz) {
  if (layers <= 0 || !is_power_of_two(static_cast<std::uint64_t>(layers)))
    throw ConfigError("analytic.layers must be a power of two");
  if (io_width_bits <= 0 || base_freq_mhz <= 0)
    throw ConfigError("analytic: io width and base frequency must be > 0");
  return io_bandwidth_gbps(io_width_bits, base_freq_mhz) * layers;
}

}  // namespace smla::analytic
