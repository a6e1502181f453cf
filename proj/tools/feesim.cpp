// Command-line front end: mechanism evaluation on bid files, experiment
// execution from config, verification suite, and plot-ready data export.
//
// Exit codes: 0 success, 1 validation failure, 2 parse failure,
// 3 invariant violation detected during a run.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "feesim/distributions.hpp"
#include "feesim/mechanisms.hpp"
#include "feesim/montecarlo.hpp"
#include "feesim/oracle.hpp"
#include "feesim/report.hpp"
#include "feesim/strategic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitParse = 2;
constexpr int kExitInvariant = 3;

struct ParseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Whitespace-separated decimal literals, `#` starts a comment.
feesim::BidVector read_bid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseFailure("cannot open bid file `" + path + "`");
  feesim::BidVector bids;
  std::string line;
  std::size_t line_no = 0;
  std::size_t token_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string token;
    while (ls >> token) {
      ++token_no;
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) {
        throw ParseFailure("line " + std::to_string(line_no) + ", token " +
                           std::to_string(token_no) + ": `" + token +
                           "` is not a number");
      }
      bids.push_back(value);
    }
  }
  return bids;
}

std::vector<feesim::Side> parse_partition(const std::string& text) {
  std::istringstream ss(text);
  std::string token;
  std::vector<feesim::Side> sides;
  while (ss >> token) {
    if (token == "A" || token == "a") {
      sides.push_back(feesim::Side::A);
    } else if (token == "B" || token == "b") {
      sides.push_back(feesim::Side::B);
    } else {
      throw ParseFailure("partition label `" + token + "` is not A or B");
    }
  }
  return sides;
}

void print_fee_schedule(const feesim::FeeSchedule& schedule) {
  for (const auto& entry : schedule.entries) {
    std::cout << "user " << entry.user + 1 << " pays "
              << feesim::format_double(entry.fee) << "\n";
  }
  std::cout << "total=" << feesim::format_double(schedule.total) << "\n";
}

int cmd_mp(const std::string& path) {
  feesim::BidVector bids = read_bid_file(path);
  feesim::MPOutcome outcome = feesim::monopolistic_price(bids);
  std::cout << "R=" << feesim::format_double(outcome.revenue)
            << " k*=" << outcome.k_star
            << " price=" << feesim::format_double(outcome.price)
            << " winners=" << outcome.winners.size() << "\n";
  print_fee_schedule(feesim::to_fee_schedule(outcome));
  return kExitOk;
}

int cmd_rsop(const std::string& path, const std::string& partition_text,
             std::uint64_t seed) {
  feesim::BidVector bids = read_bid_file(path);
  feesim::RSOPOutcome outcome;
  if (!partition_text.empty()) {
    std::vector<feesim::Side> partition = parse_partition(partition_text);
    outcome = feesim::rsop(bids, partition);
  } else {
    feesim::RngStream rng(seed);
    outcome = feesim::rsop_random(bids, rng);
  }
  feesim::MPOutcome mp = feesim::monopolistic_price(bids);

  std::cout << "price_A=" << feesim::format_double(outcome.price_a)
            << " price_B=" << feesim::format_double(outcome.price_b)
            << " |A'|=" << outcome.winners_a.size()
            << " |B'|=" << outcome.winners_b.size()
            << " revenue=" << feesim::format_double(outcome.revenue) << "\n";
  print_fee_schedule(feesim::to_fee_schedule(outcome));
  if (outcome.revenue > mp.revenue) {
    std::cout << "dominance VIOLATED: RSOP="
              << feesim::format_double(outcome.revenue)
              << " > R=" << feesim::format_double(mp.revenue) << "\n";
    return kExitInvariant;
  }
  std::cout << "dominance ok: RSOP=" << feesim::format_double(outcome.revenue)
            << " <= R=" << feesim::format_double(mp.revenue) << "\n";
  return kExitOk;
}

int cmd_deviation(const std::string& path, std::size_t user_1based,
                  std::optional<int> max_splits) {
  feesim::BidVector bids = read_bid_file(path);
  if (user_1based < 1 || user_1based > bids.size()) {
    throw std::invalid_argument("user index out of range");
  }
  feesim::DeviationReport report =
      feesim::analyze_deviation(bids, user_1based - 1, max_splits);
  std::cout << "user=" << user_1based
            << " p_honest=" << feesim::format_double(report.p_honest)
            << " p_strategic=" << feesim::format_double(report.p_strategic)
            << " delta=" << feesim::format_double(report.delta_single) << "\n";
  if (report.p_multi) {
    std::cout << "p_multi=" << feesim::format_double(*report.p_multi)
              << " delta_multi=" << feesim::format_double(*report.delta_multi)
              << " split=";
    for (std::size_t i = 0; i < report.multi_split.size(); ++i) {
      if (i) std::cout << ",";
      std::cout << feesim::format_double(report.multi_split[i]);
    }
    std::cout << "\n";
  }
  return kExitOk;
}

// Flat key-value config: `key = value` lines inside repeated [experiment]
// blocks; `#` comments.
std::vector<feesim::ExperimentSpec> parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseFailure("cannot open config `" + path + "`");

  std::vector<feesim::ExperimentSpec> specs;
  feesim::ExperimentSpec* current = nullptr;
  std::string line;
  std::size_t line_no = 0;

  auto fail = [&](const std::string& msg) -> void {
    throw ParseFailure("config line " + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string body = line.substr(first, last - first + 1);

    if (body == "[experiment]") {
      specs.emplace_back();
      specs.back().metrics.clear();
      current = &specs.back();
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string::npos) fail("expected `key = value` or `[experiment]`");
    if (!current) fail("key outside an [experiment] block");
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t");
      auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    try {
      if (key == "dist") {
        current->dist = feesim::Distribution::parse(value);
      } else if (key == "n") {
        current->n_values.clear();
        std::istringstream vs(value);
        std::string item;
        while (std::getline(vs, item, ',')) {
          current->n_values.push_back(std::stoull(item));
        }
      } else if (key == "trials") {
        current->trials = std::stoull(value);
      } else if (key == "seed") {
        current->seed = std::stoull(value);
      } else if (key == "metrics") {
        std::istringstream vs(value);
        std::string item;
        while (std::getline(vs, item, ',')) {
          auto metric = feesim::metric_from_name(item);
          if (!metric) fail("unknown metric `" + item + "`");
          current->metrics.push_back(*metric);
        }
      } else if (key == "max_splits") {
        current->max_splits = std::stoi(value);
      } else if (key == "eta") {
        current->eta_diagnostic = std::stod(value);
      } else {
        fail("unknown key `" + key + "`");
      }
    } catch (const ParseFailure&) {
      throw;
    } catch (const std::invalid_argument& e) {
      fail(std::string("bad value for `") + key + "`: " + e.what());
    } catch (const std::out_of_range&) {
      fail("value for `" + key + "` is out of range");
    }
  }
  if (specs.empty()) throw ParseFailure("config has no [experiment] block");
  return specs;
}

struct ExperimentOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> n_list;
  std::optional<std::string> dist;
  std::optional<int> max_splits;
  std::optional<double> eta;
};

int cmd_experiment(const std::string& config_path,
                   const ExperimentOverrides& overrides,
                   const std::string& out_path, const std::string& format,
                   unsigned workers) {
  std::vector<feesim::ExperimentSpec> specs = parse_config(config_path);
  for (auto& spec : specs) {
    if (overrides.seed) spec.seed = *overrides.seed;
    if (overrides.trials) spec.trials = *overrides.trials;
    if (overrides.dist) spec.dist = feesim::Distribution::parse(*overrides.dist);
    if (overrides.max_splits) spec.max_splits = *overrides.max_splits;
    if (overrides.eta) spec.eta_diagnostic = *overrides.eta;
    if (overrides.n_list) {
      spec.n_values.clear();
      std::istringstream vs(*overrides.n_list);
      std::string item;
      while (std::getline(vs, item, ',')) {
        spec.n_values.push_back(std::stoull(item));
      }
    }
    spec.validate();
  }

  std::vector<feesim::MetricRow> rows;
  std::size_t violations = 0;
  for (const auto& spec : specs) {
    feesim::ExperimentResult result = feesim::run(spec, workers);
    rows.insert(rows.end(), result.rows.begin(), result.rows.end());
    violations += result.diag_violations + result.dominance_violations +
                  result.audit_failures;
  }

  std::string payload =
      format == "json" ? feesim::to_json(rows) : feesim::to_csv(rows);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write to `" + out_path + "`");
    out << payload;
    std::cout << feesim::summary_table(rows);
    std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
  } else {
    std::cout << payload;
  }
  if (violations > 0) {
    std::cerr << "invariant violations detected during the run: " << violations
              << "\n";
    return kExitInvariant;
  }
  return kExitOk;
}

int cmd_verify(std::size_t n_max, int resolution, std::size_t instances,
               std::uint64_t seed, int max_splits, bool inject_fault) {
  using feesim::BidVector;
  bool all_ok = true;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << "check " << name << ": " << (ok ? "PASS" : "FAIL");
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    all_ok = all_ok && ok;
  };

  std::vector<feesim::Distribution> families = {
      feesim::Distribution::uniform(0.0, 1.0),
      feesim::Distribution::inverse(),
      feesim::Distribution::inverse_truncated(10.0),
      feesim::Distribution::exponential(1.0),
      feesim::Distribution::discrete({{1.0, 0.5}, {2.0, 0.3}, {5.0, 0.2}}),
  };
  auto random_bids = [&](std::uint64_t index, std::size_t max_n,
                         std::size_t min_n) {
    feesim::RngStream rng = feesim::RngStream::derive(seed, "verify", max_n, index);
    const auto& dist = families[index % families.size()];
    std::size_t n = min_n + rng.next_u64() % (max_n - min_n + 1);
    return dist.sample(rng, n);
  };

  // p_strategic: rank algorithm vs breakpoint enumeration, exact.
  {
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < instances; ++i) {
      BidVector others = random_bids(i, 10, 1);
      double fast = feesim::p_strategic(others);
      double slow = feesim::oracle_p_strategic(others);
      if (inject_fault && i == instances / 2) fast += 1e-6;
      if (fast != slow) ++mismatches;
    }
    report("p_strategic_oracle", mismatches == 0,
           std::to_string(mismatches) + " mismatches / " +
               std::to_string(instances) + " instances");
  }

  // delta_max: fast path vs full scan vs oracle scan.
  {
    std::size_t mismatches = 0;
    std::size_t count = std::max<std::size_t>(1, instances / 4);
    for (std::size_t i = 0; i < count; ++i) {
      BidVector bids = random_bids(i + 1000000, 50, 2);
      double fast = feesim::delta_max_fast(bids);
      double scan = feesim::delta_max_scan(bids);
      double reference = feesim::oracle_delta_max(bids);
      if (fast != reference || scan != reference) ++mismatches;
    }
    report("delta_max_oracle", mismatches == 0,
           std::to_string(mismatches) + " mismatches / " +
               std::to_string(count) + " instances");
  }

  // p_multi: production never above the grid oracle, and always feasible.
  {
    std::size_t failures = 0;
    std::size_t count = std::max<std::size_t>(1, instances / 10);
    int splits = std::min(max_splits, 4);
    for (std::size_t i = 0; i < count; ++i) {
      BidVector others = random_bids(i + 2000000, 8, 1);
      double cap = 1.0;
      for (double b : others) cap = std::max(cap, b);
      if (cap > 8.0) continue;  // grid oracle stays desk-sized
      feesim::MultiBidPrice production = feesim::p_multi(others, splits);
      feesim::GridSpec grid{resolution, cap + 1.0};
      double reference = feesim::oracle_p_multi(others, splits, grid);
      BidVector combined = others;
      combined.insert(combined.end(), production.split.begin(),
                      production.split.end());
      bool feasible = feesim::monopolistic_price(combined).price <=
                      production.split.back();
      if (production.price > reference + 1e-9 || !feasible) ++failures;
    }
    report("p_multi_oracle", failures == 0,
           std::to_string(failures) + " failures / " + std::to_string(count) +
               " instances");
  }

  // Revenue dominance: exhaustive over the grid, then random instances.
  {
    std::size_t violations =
        feesim::oracle_rsop_dominance(n_max, feesim::GridSpec{resolution, 4.0});
    report("rsop_dominance_exhaustive", violations == 0,
           std::to_string(violations) + " violations, n<=" +
               std::to_string(n_max) + ", " + std::to_string(resolution) +
               "-point grid");
  }
  {
    std::size_t violations = feesim::oracle_rsop_dominance_random(
        families, instances, 200, seed);
    report("rsop_dominance_random", violations == 0,
           std::to_string(violations) + " violations / " +
               std::to_string(instances) + " instances");
  }

  return all_ok ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-block fee auction simulator"};
  app.require_subcommand(1);

  unsigned default_workers = 1;
  if (const char* env = std::getenv("FEESIM_WORKERS")) {
    default_workers = static_cast<unsigned>(std::max(1, std::atoi(env)));
  }

  auto* mp = app.add_subcommand("mp", "Evaluate the monopolistic-price cut");
  std::string mp_file;
  mp->add_option("bids", mp_file, "bid file")->required();

  auto* rsop = app.add_subcommand("rsop", "Evaluate the random-sampling auction");
  std::string rsop_file, rsop_partition;
  std::uint64_t rsop_seed = 0;
  rsop->add_option("bids", rsop_file, "bid file")->required();
  rsop->add_option("--partition", rsop_partition, "explicit A/B labels per bid");
  rsop->add_option("--seed", rsop_seed, "seed for the random partition");

  auto* dev = app.add_subcommand("deviation", "Optimal strategic deviation for one user");
  std::string dev_file;
  std::size_t dev_user = 1;
  int dev_splits = 0;
  dev->add_option("bids", dev_file, "bid file")->required();
  dev->add_option("--user", dev_user, "1-based user index")->required();
  dev->add_option("--max-splits", dev_splits, "also analyze multi-bid splitting");

  auto* exp = app.add_subcommand("experiment", "Run experiments from a config file");
  std::string exp_config, exp_out, exp_format = "csv", exp_n, exp_dist;
  std::uint64_t exp_seed = 0;
  std::size_t exp_trials = 0;
  int exp_splits = 0;
  double exp_eta = 0.0;
  unsigned exp_workers = default_workers;
  exp->add_option("config", exp_config, "config file")->required();
  exp->add_option("--seed", exp_seed, "override seed");
  exp->add_option("--trials", exp_trials, "override trial count");
  exp->add_option("--n", exp_n, "override n grid (comma separated)");
  exp->add_option("--dist", exp_dist, "override distribution");
  exp->add_option("--max-splits", exp_splits, "override max splits");
  exp->add_option("--eta", exp_eta, "override OSB diagnostic eta");
  exp->add_option("--out", exp_out, "output path");
  exp->add_option("--format", exp_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  exp->add_option("--workers", exp_workers, "worker threads");

  auto* verify = app.add_subcommand("verify", "Run the brute-force verification suite");
  std::size_t ver_nmax = 10, ver_instances = 2000;
  int ver_resolution = 4, ver_splits = 3;
  std::uint64_t ver_seed = 1;
  bool ver_fault = false;
  verify->add_option("--n-max", ver_nmax, "exhaustive dominance size bound");
  verify->add_option("--resolution", ver_resolution, "grid points");
  verify->add_option("--instances", ver_instances, "random instances per check");
  verify->add_option("--seed", ver_seed, "seed");
  verify->add_option("--max-splits", ver_splits, "split bound for the multi-bid check");
  verify->add_flag("--inject-fault", ver_fault,
                   "perturb one comparison (harness self-test)")
      ->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*mp) return cmd_mp(mp_file);
    if (*rsop) return cmd_rsop(rsop_file, rsop_partition, rsop_seed);
    if (*dev) {
      std::optional<int> splits;
      if (dev->count("--max-splits")) splits = dev_splits;
      return cmd_deviation(dev_file, dev_user, splits);
    }
    if (*exp) {
      ExperimentOverrides overrides;
      if (exp->count("--seed")) overrides.seed = exp_seed;
      if (exp->count("--trials")) overrides.trials = exp_trials;
      if (exp->count("--n")) overrides.n_list = exp_n;
      if (!exp_dist.empty()) overrides.dist = exp_dist;
      if (exp->count("--max-splits")) overrides.max_splits = exp_splits;
      if (exp->count("--eta")) overrides.eta = exp_eta;
      return cmd_experiment(exp_config, overrides, exp_out, exp_format,
                            exp_workers);
    }
    if (*verify) {
      return cmd_verify(ver_nmax, ver_resolution, ver_instances, ver_seed,
                        ver_splits, ver_fault);
    }
  } catch (const ParseFailure& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
