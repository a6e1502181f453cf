#include "feesim/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace feesim {

std::string format_double(double v) {
  if (std::isnan(v)) return "na";
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, ptr);
}

std::string to_csv(std::span<const MetricRow> rows) {
  std::string out =
      "distribution,n,metric,trials,seed,estimate,std_error,ci95_lo,ci95_hi,"
      "diag_violations,runtime_ms\n";
  for (const MetricRow& row : rows) {
    out += row.distribution;
    out += ',';
    out += std::to_string(row.n);
    out += ',';
    out += metric_name(row.metric);
    out += ',';
    out += std::to_string(row.trials_used);
    out += ',';
    out += std::to_string(row.seed);
    out += ',';
    out += format_double(row.estimate);
    out += ',';
    out += format_double(row.std_error);
    out += ',';
    out += format_double(row.ci95_lo);
    out += ',';
    out += format_double(row.ci95_hi);
    out += ',';
    out += std::to_string(row.diag_violations);
    // Wall time is not reproducible across runs, which would break the
    // byte-stability contract; it is reported in the summary and JSON.
    out += ",na\n";
  }
  return out;
}

std::string to_json(std::span<const MetricRow> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const MetricRow& row : rows) {
    nlohmann::json item;
    item["distribution"] = row.distribution;
    item["n"] = row.n;
    item["metric"] = metric_name(row.metric);
    item["trials"] = row.trials_used;
    item["seed"] = row.seed;
    item["estimate"] = row.estimate;
    if (std::isnan(row.std_error)) {
      item["std_error"] = nullptr;
      item["ci95_lo"] = nullptr;
      item["ci95_hi"] = nullptr;
    } else {
      item["std_error"] = row.std_error;
      item["ci95_lo"] = row.ci95_lo;
      item["ci95_hi"] = row.ci95_hi;
    }
    item["diag_violations"] = row.diag_violations;
    item["runtime_ms"] = row.runtime_ms;
    arr.push_back(std::move(item));
  }
  return arr.dump(2) + "\n";
}

std::string summary_table(std::span<const MetricRow> rows) {
  std::ostringstream out;
  out << "distribution            n        metric          estimate"
         "      std_error    runtime_ms\n";
  for (const MetricRow& row : rows) {
    std::string dist = row.distribution;
    if (dist.size() > 22) dist = dist.substr(0, 19) + "...";
    out << dist << std::string(24 - dist.size(), ' ');
    std::string n = std::to_string(row.n);
    out << n << std::string(9 - std::min<std::size_t>(8, n.size()), ' ');
    std::string metric(metric_name(row.metric));
    out << metric << std::string(16 - metric.size(), ' ');
    std::string est = format_double(row.estimate);
    if (est.size() > 12) est = est.substr(0, 12);
    out << est << std::string(14 - est.size(), ' ');
    std::string se = format_double(row.std_error);
    if (se.size() > 12) se = se.substr(0, 12);
    out << se << std::string(13 - se.size(), ' ');
    out << row.runtime_ms << '\n';
  }
  return out.str();
}

}  // namespace feesim
