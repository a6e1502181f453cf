#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "feesim/distributions.hpp"

namespace feesim {

enum class Metric {
  delta_max,
  delta_avg,
  delta_max_msb,
  delta_avg_msb,
  rev_mp,
  rev_mp_trimmed,  // 5% two-sided trimmed mean of R/n, emitted with rev_mp
  rev_rsop,
  rev_ratio,
};

std::string_view metric_name(Metric m);
std::optional<Metric> metric_from_name(std::string_view name);
bool is_delta_metric(Metric m);

struct ExperimentSpec {
  Distribution dist = Distribution::inverse();
  std::vector<std::size_t> n_values;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  std::vector<Metric> metrics;
  int max_splits = 8;
  std::optional<double> eta_diagnostic;  // enables the OSB diagnostic on
                                         // bounded-support runs

  /// Throws std::invalid_argument on an invalid spec. Delta metrics
  /// require every n >= 2 (the lone-bidder case is excluded).
  void validate() const;
};

struct MetricRow {
  std::string distribution;
  std::size_t n = 0;
  Metric metric = Metric::delta_max;
  std::size_t trials_used = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double std_error = 0.0;  // NaN when trials_used < 2
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  std::size_t diag_violations = 0;
  long long runtime_ms = 0;  // wall clock; excluded from CSV (see report)
};

struct ExperimentResult {
  std::vector<MetricRow> rows;
  std::size_t diag_violations = 0;       // OSB diagnostic failures
  std::size_t dominance_violations = 0;  // per-trial RSOP > R occurrences
  std::size_t audit_failures = 0;        // fast-path/full-scan disagreements
};

/// Runs every enabled metric for every n. Per-trial streams are derived
/// from (seed, metric group, n, trial), so the result is a pure function
/// of the spec regardless of worker count or scheduling. All delta
/// metrics within a run share samples trial-by-trial, as do all revenue
/// metrics, so paired comparisons between them are meaningful.
ExperimentResult run(const ExperimentSpec& spec, unsigned workers = 1);

}  // namespace feesim
