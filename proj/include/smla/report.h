#pragma once

#include <string>

#include "smla/sim.h"

namespace smla {

// Structured report is the source of truth; the CSV row is a fixed-order
// flat projection for spreadsheet/plotting use. Absent measurements are
// explicit nulls, never missing keys.
std::string report_to_json(const RunReport& r);
std::string report_csv_header();
std::string report_to_csv_row(const RunReport& r);

}  // namespace smla
