// Acceptance gate: one pass/fail line per criterion, each with pinned
// thresholds. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "feesim/distributions.hpp"
#include "feesim/mechanisms.hpp"
#include "feesim/montecarlo.hpp"
#include "feesim/oracle.hpp"
#include "feesim/report.hpp"
#include "feesim/rng.hpp"
#include "feesim/strategic.hpp"

using namespace feesim;

namespace {

namespace fs = std::filesystem;

int failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail, double seconds) {
  std::printf("criterion %2d %-24s %s  [%7.1fs]  %s\n", number, name.c_str(),
              pass ? "PASS" : "FAIL", seconds, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::vector<Distribution> all_families() {
  return {
      Distribution::uniform(0, 1),
      Distribution::uniform(1, 2),
      Distribution::inverse(),
      Distribution::inverse_truncated(10.0),
      Distribution::inverse_truncated(100.0),
      Distribution::exponential(1.0),
      Distribution::discrete({{1, 0.5}, {2, 0.3}, {5, 0.2}}),
      Distribution::constant(3.0),
  };
}

double estimate_of(const ExperimentResult& result, Metric metric,
                   std::size_t n) {
  for (const MetricRow& row : result.rows) {
    if (row.metric == metric && row.n == n) return row.estimate;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

bool strictly_decreasing(const ExperimentResult& result, Metric metric,
                         const std::vector<std::size_t>& grid) {
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(estimate_of(result, metric, grid[i]) >
          estimate_of(result, metric, grid[i + 1]))) {
      return false;
    }
  }
  return true;
}

std::string trend_string(const ExperimentResult& result, Metric metric,
                         const std::vector<std::size_t>& grid) {
  std::string out;
  for (std::size_t n : grid) {
    if (!out.empty()) out += " > ";
    out += format_double(estimate_of(result, metric, n)).substr(0, 8);
  }
  return out;
}

// Shared across criteria 3/4 (trends) and 9 (OSB diagnostic aggregation).
std::size_t g_osb_violations = 0;
std::size_t g_audit_failures = 0;

// ---------------------------------------------------------------------------

void criterion_1_dominance() {
  Timer timer;
  std::size_t exhaustive = oracle_rsop_dominance(12, GridSpec{4, 4.0});
  std::size_t random_violations =
      oracle_rsop_dominance_random(all_families(), 100000, 200, 42);
  std::ostringstream detail;
  detail << "exhaustive n<=12 grid-4: " << exhaustive
         << " violations; 1e5 random instances: " << random_violations
         << " violations";
  report(1, "dominance", exhaustive == 0 && random_violations == 0,
         detail.str(), timer.seconds());
}

void criterion_2_oracles() {
  Timer timer;
  std::vector<Distribution> families = all_families();
  auto bids_for = [&](std::uint64_t idx, std::size_t max_n) {
    RngStream rng = RngStream::derive(42, "acceptance-oracle", max_n, idx);
    const Distribution& dist = families[idx % families.size()];
    std::size_t n = 1 + rng.next_u64() % max_n;
    return dist.sample(rng, n);
  };

  std::size_t strat_mismatch = 0;
  for (std::size_t i = 0; i < 10000; ++i) {
    BidVector others = bids_for(i, 10);
    if (p_strategic(others) != oracle_p_strategic(others)) ++strat_mismatch;
  }

  std::size_t dmax_mismatch = 0;
  for (std::size_t i = 0; i < 10000; ++i) {
    BidVector bids = bids_for(i + 1000000, 50);
    double reference = oracle_delta_max(bids);
    if (delta_max_fast(bids) != reference || delta_max_scan(bids) != reference) {
      ++dmax_mismatch;
    }
  }

  std::size_t multi_failures = 0;
  std::size_t multi_checked = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    BidVector others = bids_for(i + 2000000, 8);
    double cap = 1.0;
    for (double b : others) cap = std::max(cap, b);
    if (cap > 8.0) continue;  // keep the grid oracle desk-sized
    ++multi_checked;
    MultiBidPrice production = p_multi(others, 4);
    GridSpec grid{4, cap + 1.0};
    double reference = oracle_p_multi(others, 4, grid);
    BidVector combined = others;
    combined.insert(combined.end(), production.split.begin(),
                    production.split.end());
    std::sort(combined.begin(), combined.end(), std::greater<>());
    bool feasible = mp_cut(combined).price <= production.split.back();
    if (production.price > reference + 1e-12 || !feasible) ++multi_failures;
  }

  std::ostringstream detail;
  detail << "p_strategic exact 1e4: " << strat_mismatch
         << " mismatches; delta_max 1e4 (n<=50): " << dmax_mismatch
         << " mismatches; p_multi 1e3 (n<=8, u<=4): " << multi_failures << "/"
         << multi_checked << " failures";
  report(2, "oracle-equivalence",
         strat_mismatch == 0 && dmax_mismatch == 0 && multi_failures == 0,
         detail.str(), timer.seconds());
}

void criterion_3_bounded_trend() {
  Timer timer;
  const std::vector<std::size_t> grid = {10, 100, 1000, 10000};
  bool pass = true;
  std::string detail;
  for (auto dist :
       {Distribution::uniform(0, 1), Distribution::inverse_truncated(10.0)}) {
    ExperimentSpec spec;
    spec.dist = dist;
    spec.n_values = grid;
    spec.trials = 10000;
    spec.seed = 42;
    spec.metrics = {Metric::delta_max};
    spec.eta_diagnostic = 0.1;
    ExperimentResult result = run(spec);
    g_osb_violations += result.diag_violations;
    g_audit_failures += result.audit_failures;

    bool decreasing = strictly_decreasing(result, Metric::delta_max, grid);
    bool halved = estimate_of(result, Metric::delta_max, 10000) <
                  0.5 * estimate_of(result, Metric::delta_max, 100);
    pass = pass && decreasing && halved;
    if (!detail.empty()) detail += "; ";
    detail += dist.spec_string() + ": " +
              trend_string(result, Metric::delta_max, grid) +
              (decreasing ? "" : " NOT-DECREASING") +
              (halved ? "" : " NOT-HALVED");
  }
  report(3, "bounded-support-trend", pass, detail, timer.seconds());
}

void criterion_4_average_and_msb_trend() {
  Timer timer;
  const std::vector<std::size_t> grid = {10, 100, 1000, 10000};
  bool pass = true;
  std::string detail;

  {
    ExperimentSpec spec;
    spec.dist = Distribution::uniform(0, 1);
    spec.n_values = grid;
    spec.trials = 10000;
    spec.seed = 42;
    spec.metrics = {Metric::delta_max, Metric::delta_avg, Metric::delta_max_msb,
                    Metric::delta_avg_msb};
    spec.max_splits = 8;
    spec.eta_diagnostic = 0.1;
    ExperimentResult result = run(spec);
    g_osb_violations += result.diag_violations;
    g_audit_failures += result.audit_failures;

    bool avg_dec = strictly_decreasing(result, Metric::delta_avg, grid);
    bool mmax_dec = strictly_decreasing(result, Metric::delta_max_msb, grid);
    bool mavg_dec = strictly_decreasing(result, Metric::delta_avg_msb, grid);
    bool paired = true;
    for (std::size_t n : grid) {
      paired = paired && estimate_of(result, Metric::delta_max_msb, n) >=
                             estimate_of(result, Metric::delta_max, n);
      paired = paired && estimate_of(result, Metric::delta_avg_msb, n) >=
                             estimate_of(result, Metric::delta_avg, n);
    }
    pass = avg_dec && mmax_dec && mavg_dec && paired;
    detail = "uniform avg: " + trend_string(result, Metric::delta_avg, grid) +
             (avg_dec ? "" : " NOT-DECREASING") + "; msb-max " +
             std::string(mmax_dec ? "decreasing" : "NOT-DECREASING") +
             ", msb-avg " + (mavg_dec ? "decreasing" : "NOT-DECREASING") +
             ", msb>=single pairwise " + (paired ? "yes" : "NO");
  }
  {
    ExperimentSpec spec;
    spec.dist = Distribution::inverse();
    spec.n_values = grid;
    spec.trials = 10000;
    spec.seed = 42;
    spec.metrics = {Metric::delta_avg};
    ExperimentResult result = run(spec);
    g_audit_failures += result.audit_failures;
    bool avg_dec = strictly_decreasing(result, Metric::delta_avg, grid);
    pass = pass && avg_dec;
    detail += "; inverse avg: " + trend_string(result, Metric::delta_avg, grid) +
              (avg_dec ? "" : " NOT-DECREASING");
  }
  report(4, "average-and-msb-trend", pass, detail, timer.seconds());
}

void criterion_5_heavy_tail_floor() {
  Timer timer;
  // Threshold recomputed from first principles:
  // (1 - lambda'/lambda) * (exp(-2/lambda')/lambda - 4*exp(-lambda/2))
  // at lambda = 40, lambda' = 1.
  const double lambda = 40.0, lambda_prime = 1.0;
  const double c = (1.0 - lambda_prime / lambda) *
                   (std::exp(-2.0 / lambda_prime) / lambda -
                    4.0 * std::exp(-lambda / 2.0));
  const double threshold = 0.00329;  // pinned; c evaluates to ~0.0032988

  ExperimentSpec spec;
  spec.dist = Distribution::inverse();
  spec.n_values = {100, 1000, 10000};
  spec.trials = 10000;
  spec.seed = 42;
  spec.metrics = {Metric::delta_max};
  ExperimentResult result = run(spec);
  g_audit_failures += result.audit_failures;

  bool pass = c > threshold;  // the recomputed constant backs the pin
  std::string detail = "c=" + format_double(c).substr(0, 9) + " pinned " +
                       format_double(threshold) + "; estimates";
  for (std::size_t n : spec.n_values) {
    double est = estimate_of(result, Metric::delta_max, n);
    pass = pass && est > threshold;
    detail += " " + format_double(est).substr(0, 8);
  }
  report(5, "heavy-tail-floor", pass, detail, timer.seconds());
}

void criterion_6_revenue_convergence() {
  Timer timer;
  ExperimentSpec spec;
  spec.dist = Distribution::inverse();
  spec.n_values = {100, 10000};
  spec.trials = 10000;
  spec.seed = 42;
  spec.metrics = {Metric::rev_mp, Metric::rev_rsop};
  ExperimentResult result = run(spec);

  double rsop_per_user = estimate_of(result, Metric::rev_rsop, 10000);
  bool rsop_near_one = rsop_per_user >= 0.85 && rsop_per_user <= 1.15;

  double trimmed_small = estimate_of(result, Metric::rev_mp_trimmed, 100);
  double trimmed_large = estimate_of(result, Metric::rev_mp_trimmed, 10000);
  bool trimmed_doubles = trimmed_large >= 2.0 * trimmed_small;

  std::ostringstream detail;
  detail << "E[RSOP]/n@1e4=" << format_double(rsop_per_user).substr(0, 8)
         << (rsop_near_one ? " in" : " OUTSIDE") << " [0.85,1.15]"
         << "; trimmed R/n " << format_double(trimmed_small).substr(0, 8)
         << " -> " << format_double(trimmed_large).substr(0, 8) << " (x"
         << format_double(trimmed_large / trimmed_small).substr(0, 6)
         << (trimmed_doubles ? " >= 2)" : " < 2)");
  report(6, "revenue-convergence", rsop_near_one && trimmed_doubles,
         detail.str(), timer.seconds());
  if (result.dominance_violations != 0) {
    report(6, "revenue-dominance-inline", false,
           "per-trial dominance violations detected", 0.0);
  }
}

void criterion_7_ratio() {
  Timer timer;
  ExperimentSpec spec;
  spec.dist = Distribution::uniform(1, 2);
  spec.n_values = {10000};
  spec.trials = 1000;
  spec.seed = 42;
  spec.metrics = {Metric::rev_ratio};
  ExperimentResult result = run(spec);
  double ratio = estimate_of(result, Metric::rev_ratio, 10000);
  report(7, "revenue-ratio", ratio <= 1.05,
         "mean R/RSOP = " + format_double(ratio).substr(0, 10) + " (<= 1.05)",
         timer.seconds());
}

void criterion_8_wrapper_identity() {
  Timer timer;
  std::vector<Distribution> families = all_families();
  std::size_t identity_failures = 0;
  std::size_t residual_failures = 0;
  for (std::size_t i = 0; i < 10000; ++i) {
    RngStream rng = RngStream::derive(42, "acceptance-wrap", 0, i);
    const Distribution& dist = families[i % families.size()];
    std::size_t n = 1 + rng.next_u64() % 30;
    BidVector bids = dist.sample(rng, n);
    FeeSchedule base = to_fee_schedule(rsop_random(bids, rng));
    for (double eps : {0.0, 0.1, 0.5}) {
      FeeSchedule wrapped = m_epsilon_wrap(base, bids, eps);
      const double shift = eps / (1.0 + eps);
      // Same evaluation order on both sides: exact equality demanded.
      double expected_total = 0.0;
      for (const FeeEntry& e : base.entries) {
        expected_total += e.fee + shift * (bids[e.user] - e.fee);
      }
      if (wrapped.total != expected_total) ++identity_failures;
      for (std::size_t k = 0; k < base.entries.size(); ++k) {
        double u = bids[base.entries[k].user] - base.entries[k].fee;
        double residual =
            bids[wrapped.entries[k].user] - wrapped.entries[k].fee;
        // residual = u / (1 + eps) mathematically; computed as
        // v - (p + shift*(v-p)), so allow one-ulp-scale drift.
        if (std::abs(residual - u / (1.0 + eps)) >
            1e-12 * std::max(1.0, std::abs(u))) {
          ++residual_failures;
        }
      }
    }
  }
  bool rejects_one = false;
  try {
    m_epsilon_wrap({{{0, 1.0}}, 1.0}, {2.0}, 1.0);
  } catch (const std::invalid_argument&) {
    rejects_one = true;
  }
  std::ostringstream detail;
  detail << "1e4 instances x eps {0,0.1,0.5}: " << identity_failures
         << " total-identity failures, " << residual_failures
         << " residual failures; eps=1 rejected: "
         << (rejects_one ? "yes" : "NO");
  report(8, "wrapper-identity",
         identity_failures == 0 && residual_failures == 0 && rejects_one,
         detail.str(), timer.seconds());
}

void criterion_9_osb_diagnostic() {
  std::ostringstream detail;
  detail << "bounded-support runs of criteria 3-4 at eta=0.1: "
         << g_osb_violations << " violations (and " << g_audit_failures
         << " fast-path audit failures)";
  report(9, "osb-diagnostic", g_osb_violations == 0 && g_audit_failures == 0,
         detail.str(), 0.0);
}

void criterion_10_determinism() {
  Timer timer;
  fs::path dir = fs::temp_directory_path() / "feesim-acceptance";
  fs::create_directories(dir);
  fs::path config = fs::path(FEESIM_CONFIG_DIR) / "theoremB_ratio.cfg";
  fs::path out1 = dir / "workers1.csv";
  fs::path out4 = dir / "workers4.csv";

  auto run_cli = [&](const std::string& args) {
    std::string cmd = std::string(FEESIM_BINARY_PATH) + " " + args +
                      " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  int rc1 = run_cli("experiment " + config.string() + " --workers 1 --out " +
                    out1.string());
  int rc4 = run_cli("experiment " + config.string() + " --workers 4 --out " +
                    out4.string());

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  };
  std::string csv1 = slurp(out1);
  std::string csv4 = slurp(out4);
  bool pass = rc1 == 0 && rc4 == 0 && !csv1.empty() && csv1 == csv4;
  std::ostringstream detail;
  detail << "recipe theoremB_ratio, workers 1 vs 4: "
         << (csv1 == csv4 ? "byte-identical CSV" : "CSV DIFFERS") << " ("
         << csv1.size() << " bytes)";
  report(10, "determinism", pass, detail.str(), timer.seconds());
}

}  // namespace

int main() {
  std::printf("acceptance gate (seed 42)\n");
  criterion_1_dominance();
  criterion_2_oracles();
  criterion_3_bounded_trend();
  criterion_4_average_and_msb_trend();
  criterion_5_heavy_tail_floor();
  criterion_6_revenue_convergence();
  criterion_7_ratio();
  criterion_8_wrapper_identity();
  criterion_9_osb_diagnostic();
  criterion_10_determinism();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
