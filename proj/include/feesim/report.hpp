#pragma once

#include <span>
#include <string>

#include "feesim/montecarlo.hpp"

namespace feesim {

/// Fixed-schema CSV:
/// distribution,n,metric,trials,seed,estimate,std_error,ci95_lo,ci95_hi,diag_violations,runtime_ms
/// Byte-stable for a given spec and seed: doubles are shortest-round-trip
/// formatted and the runtime_ms column always holds "na" (wall time is not
/// reproducible; it appears in the summary table and JSON output instead).
std::string to_csv(std::span<const MetricRow> rows);

std::string to_json(std::span<const MetricRow> rows);

/// Human-readable summary table, one line per row.
std::string summary_table(std::span<const MetricRow> rows);

/// Shortest round-trip decimal form of a double ("na" for NaN).
std::string format_double(double v);

}  // namespace feesim
