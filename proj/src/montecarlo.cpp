#include "feesim/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "feesim/mechanisms.hpp"
#include "feesim/oracle.hpp"
#include "feesim/strategic.hpp"

namespace feesim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Full-scan audits are O(n^2); the audit rate shrinks quadratically above
// this size so the total audit cost stays bounded.
constexpr std::size_t kAuditReferenceN = 2000;

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  unsigned spawn = static_cast<unsigned>(
      std::min<std::size_t>(workers, count));
  threads.reserve(spawn);
  for (unsigned t = 0; t < spawn; ++t) threads.emplace_back(worker);
  for (auto& thread : threads) thread.join();
  if (error) std::rethrow_exception(error);
}

double ratio_of(double user_bid, double strategic, double price) {
  if (user_bid < strategic || price <= 0.0) return 0.0;
  return std::min(1.0, std::max(0.0, 1.0 - strategic / price));
}

struct Stats {
  double mean = 0.0;
  double se = kNaN;
  std::size_t used = 0;
};

// Mean and standard error over non-NaN entries, accumulated in trial order.
Stats reduce(const std::vector<double>& values, bool delta_floor) {
  Stats stats;
  double sum = 0.0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++stats.used;
  }
  if (stats.used == 0) return stats;
  stats.mean = sum / static_cast<double>(stats.used);
  if (stats.used < 2) return stats;

  double ss = 0.0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    double d = v - stats.mean;
    ss += d * d;
  }
  stats.se = std::sqrt(ss / static_cast<double>(stats.used - 1) /
                       static_cast<double>(stats.used));

  if (delta_floor) {
    // Mostly-zero delta samples behave like Bernoulli(p) times a value;
    // the sample variance can then understate the uncertainty in p.
    std::size_t nonzero = 0;
    double nonzero_sum = 0.0;
    for (double v : values) {
      if (std::isnan(v) || v == 0.0) continue;
      ++nonzero;
      nonzero_sum += v;
    }
    if (nonzero * 2 < stats.used) {
      double n = static_cast<double>(stats.used);
      double floor;
      if (nonzero == 0) {
        floor = 1.0 / n;
      } else {
        double p = static_cast<double>(nonzero) / n;
        double mean_nonzero = nonzero_sum / static_cast<double>(nonzero);
        floor = mean_nonzero * std::sqrt(p * (1.0 - p) / n);
      }
      stats.se = std::max(stats.se, floor);
    }
  }
  return stats;
}

Stats reduce_trimmed(const std::vector<double>& values, double trim_fraction) {
  std::vector<double> kept;
  kept.reserve(values.size());
  for (double v : values) {
    if (!std::isnan(v)) kept.push_back(v);
  }
  std::sort(kept.begin(), kept.end());
  std::size_t cut = static_cast<std::size_t>(
      std::floor(trim_fraction * static_cast<double>(kept.size())));
  if (kept.size() > 2 * cut) {
    kept.assign(kept.begin() + static_cast<std::ptrdiff_t>(cut),
                kept.end() - static_cast<std::ptrdiff_t>(cut));
  }
  return reduce(kept, false);
}

MetricRow make_row(const ExperimentSpec& spec, std::size_t n, Metric metric,
                   const Stats& stats, std::size_t diag, long long runtime_ms) {
  MetricRow row;
  row.distribution = spec.dist.spec_string();
  row.n = n;
  row.metric = metric;
  row.trials_used = stats.used;
  row.seed = spec.seed;
  row.estimate = stats.mean;
  row.std_error = stats.se;
  if (std::isnan(stats.se)) {
    row.ci95_lo = kNaN;
    row.ci95_hi = kNaN;
  } else {
    row.ci95_lo = stats.mean - 1.96 * stats.se;
    row.ci95_hi = stats.mean + 1.96 * stats.se;
  }
  row.diag_violations = diag;
  row.runtime_ms = runtime_ms;
  return row;
}

void remove_rank(std::span<const double> sorted, std::size_t rank,
                 std::vector<double>& out) {
  out.clear();
  out.reserve(sorted.size() - 1);
  out.insert(out.end(), sorted.begin(),
             sorted.begin() + static_cast<std::ptrdiff_t>(rank));
  out.insert(out.end(), sorted.begin() + static_cast<std::ptrdiff_t>(rank) + 1,
             sorted.end());
}

bool split_wins(std::span<const double> others_desc,
                const std::vector<double>& split) {
  std::vector<double> combined(others_desc.begin(), others_desc.end());
  combined.insert(combined.end(), split.begin(), split.end());
  std::sort(combined.begin(), combined.end(), std::greater<>());
  return mp_cut(combined).price <= split.back();
}

}  // namespace

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::delta_max: return "delta_max";
    case Metric::delta_avg: return "delta_avg";
    case Metric::delta_max_msb: return "delta_max_msb";
    case Metric::delta_avg_msb: return "delta_avg_msb";
    case Metric::rev_mp: return "rev_mp";
    case Metric::rev_mp_trimmed: return "rev_mp_trimmed";
    case Metric::rev_rsop: return "rev_rsop";
    case Metric::rev_ratio: return "rev_ratio";
  }
  return "unknown";
}

std::optional<Metric> metric_from_name(std::string_view name) {
  for (Metric m : {Metric::delta_max, Metric::delta_avg, Metric::delta_max_msb,
                   Metric::delta_avg_msb, Metric::rev_mp, Metric::rev_mp_trimmed,
                   Metric::rev_rsop, Metric::rev_ratio}) {
    if (metric_name(m) == name) return m;
  }
  return std::nullopt;
}

bool is_delta_metric(Metric m) {
  return m == Metric::delta_max || m == Metric::delta_avg ||
         m == Metric::delta_max_msb || m == Metric::delta_avg_msb;
}

void ExperimentSpec::validate() const {
  if (n_values.empty()) {
    throw std::invalid_argument("at least one n value is required");
  }
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (metrics.empty()) {
    throw std::invalid_argument("at least one metric is required");
  }
  bool any_delta = std::any_of(metrics.begin(), metrics.end(), is_delta_metric);
  for (std::size_t n : n_values) {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (any_delta && n < 2) {
      throw std::invalid_argument(
          "delta metrics exclude the lone-bidder case: n must be at least 2");
    }
  }
  bool any_msb =
      std::any_of(metrics.begin(), metrics.end(), [](Metric m) {
        return m == Metric::delta_max_msb || m == Metric::delta_avg_msb;
      });
  if (any_msb && max_splits < 1) {
    throw std::invalid_argument("msb metrics require max_splits >= 1");
  }
  if (eta_diagnostic && !(*eta_diagnostic > 0.0 && *eta_diagnostic < 1.0)) {
    throw std::invalid_argument("eta must lie in (0, 1)");
  }
}

ExperimentResult run(const ExperimentSpec& spec, unsigned workers) {
  spec.validate();

  // rev_mp_trimmed rides along with rev_mp (heavy-tail reporting).
  std::vector<Metric> metrics = spec.metrics;
  {
    auto has = [&](Metric m) {
      return std::find(metrics.begin(), metrics.end(), m) != metrics.end();
    };
    if (has(Metric::rev_mp) && !has(Metric::rev_mp_trimmed)) {
      metrics.insert(std::find(metrics.begin(), metrics.end(), Metric::rev_mp) + 1,
                     Metric::rev_mp_trimmed);
    }
  }
  auto enabled = [&](Metric m) {
    return std::find(metrics.begin(), metrics.end(), m) != metrics.end();
  };

  const bool want_dmax = enabled(Metric::delta_max);
  const bool want_davg = enabled(Metric::delta_avg);
  const bool want_mmax = enabled(Metric::delta_max_msb);
  const bool want_mavg = enabled(Metric::delta_avg_msb);
  const bool want_rev_mp = enabled(Metric::rev_mp);
  const bool want_rev_rsop = enabled(Metric::rev_rsop);
  const bool want_rev_ratio = enabled(Metric::rev_ratio);
  const bool any_delta = want_dmax || want_davg || want_mmax || want_mavg;
  const bool any_rev = want_rev_mp || want_rev_rsop || want_rev_ratio;

  const bool diagnose =
      spec.eta_diagnostic.has_value() && spec.dist.bounded_support();
  const double eta = spec.eta_diagnostic.value_or(0.0);
  const double support_upper = spec.dist.support_upper().value_or(0.0);

  ExperimentResult result;
  std::atomic<std::size_t> diag_total{0};
  std::atomic<std::size_t> dominance_total{0};
  std::atomic<std::size_t> audit_total{0};

  for (std::size_t n : spec.n_values) {
    if (any_delta) {
      auto start = std::chrono::steady_clock::now();
      std::vector<double> dmax(want_dmax || diagnose ? spec.trials : 0, kNaN);
      std::vector<double> davg(want_davg ? spec.trials : 0, kNaN);
      std::vector<double> mmax(want_mmax ? spec.trials : 0, kNaN);
      std::vector<double> mavg(want_mavg ? spec.trials : 0, kNaN);
      std::atomic<std::size_t> diag_cell{0};

      // ~1% of trials are re-checked with the O(n^2) full scan; at large n
      // the rate shrinks so total audit work stays near trials/100 * 2000^2.
      double scale = std::min(
          1.0, static_cast<double>(kAuditReferenceN * kAuditReferenceN) /
                   (static_cast<double>(n) * static_cast<double>(n)));
      std::size_t audits = std::max<std::size_t>(
          1, static_cast<std::size_t>(
                 std::llround(0.01 * static_cast<double>(spec.trials) * scale)));
      std::size_t audit_stride = std::max<std::size_t>(1, spec.trials / audits);
      std::size_t msb_stride = 100;

      parallel_for(spec.trials, workers, [&](std::size_t t) {
        RngStream rng = RngStream::derive(spec.seed, "delta", n, t);
        thread_local std::vector<double> v, b, others;
        v.resize(n);
        spec.dist.sample(rng, v);
        b = v;
        std::sort(b.begin(), b.end(), std::greater<>());
        const MPCut cut = mp_cut(b);

        double dmax_val = kNaN;
        if (want_dmax || diagnose || want_mmax) {
          double strat = p_strategic_sorted(std::span(b).subspan(1));
          dmax_val = ratio_of(b[0], strat, cut.price);
          if (!dmax.empty()) dmax[t] = dmax_val;
        }

        std::size_t user_rank = 0;
        if (want_davg || want_mavg) {
          // Any sorted position holding user 1's value leaves the same
          // multiset of others.
          user_rank = static_cast<std::size_t>(
              std::lower_bound(b.begin(), b.end(), v[0], std::greater<>()) -
              b.begin());
          remove_rank(b, user_rank, others);
        }
        if (want_davg) {
          double strat = p_strategic_sorted(others);
          davg[t] = ratio_of(v[0], strat, cut.price);
        }
        if (want_mmax) {
          double multi =
              p_multi_sorted(std::span(b).subspan(1), spec.max_splits).price;
          mmax[t] = ratio_of(b[0], multi, cut.price);
        }
        if (want_mavg) {
          double multi = p_multi_sorted(others, spec.max_splits).price;
          mavg[t] = ratio_of(v[0], multi, cut.price);
        }

        if (diagnose && dmax_val >= eta) {
          OSBCheck check = osb_check_sorted(b, eta, support_upper);
          if (!check.holds) diag_cell.fetch_add(1);
        }

        if ((want_dmax || diagnose) && t % audit_stride == 0) {
          double scan = delta_max_scan_sorted(b);
          if (std::abs(scan - dmax_val) > 1e-12 * std::max(1.0, scan)) {
            audit_total.fetch_add(1);
          }
        }
        if ((want_mmax || want_mavg) && n <= 10 && t % msb_stride == 0 &&
            b[0] <= 8.0) {
          int splits = std::min(spec.max_splits, 4);
          std::span<const double> rest = std::span(b).subspan(1);
          MultiBidPrice prod = p_multi_sorted(rest, splits);
          GridSpec grid{4, std::ceil(b[0]) + 1.0};
          double ref = oracle_p_multi(BidVector(rest.begin(), rest.end()),
                                      splits, grid);
          if (prod.price > ref + 1e-9 || !split_wins(rest, prod.split)) {
            audit_total.fetch_add(1);
          }
        }
      });

      auto runtime = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
      diag_total.fetch_add(diag_cell.load());

      for (Metric m : metrics) {
        const std::vector<double>* values = nullptr;
        switch (m) {
          case Metric::delta_max: values = &dmax; break;
          case Metric::delta_avg: values = &davg; break;
          case Metric::delta_max_msb: values = &mmax; break;
          case Metric::delta_avg_msb: values = &mavg; break;
          default: break;
        }
        if (!values || values->empty()) continue;
        result.rows.push_back(make_row(spec, n, m, reduce(*values, true),
                                       diag_cell.load(), runtime));
      }
    }

    if (any_rev) {
      auto start = std::chrono::steady_clock::now();
      std::vector<double> rev_mp(spec.trials, kNaN);
      std::vector<double> rev_rsop(spec.trials, kNaN);
      std::vector<double> rev_ratio(spec.trials, kNaN);

      parallel_for(spec.trials, workers, [&](std::size_t t) {
        RngStream rng = RngStream::derive(spec.seed, "revenue", n, t);
        thread_local std::vector<double> v, b, side_a, side_b;
        v.resize(n);
        spec.dist.sample(rng, v);
        b = v;
        std::sort(b.begin(), b.end(), std::greater<>());
        const double mp_revenue = mp_cut(b).revenue;

        side_a.clear();
        side_b.clear();
        for (double bid : v) {
          (rng.next_bit() ? side_b : side_a).push_back(bid);
        }
        std::sort(side_a.begin(), side_a.end(), std::greater<>());
        std::sort(side_b.begin(), side_b.end(), std::greater<>());
        const double price_a = mp_cut(side_a).price;
        const double price_b = mp_cut(side_b).price;
        std::size_t winners_a = 0, winners_b = 0;
        for (double bid : side_a) winners_a += (bid >= price_b);
        for (double bid : side_b) winners_b += (bid >= price_a);
        const double sampled = static_cast<double>(winners_a) * price_b +
                               static_cast<double>(winners_b) * price_a;

        if (sampled > mp_revenue) dominance_total.fetch_add(1);

        double dn = static_cast<double>(n);
        rev_mp[t] = mp_revenue / dn;
        rev_rsop[t] = sampled / dn;
        if (sampled > 0.0) rev_ratio[t] = mp_revenue / sampled;
      });

      auto runtime = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();

      for (Metric m : metrics) {
        switch (m) {
          case Metric::rev_mp:
            result.rows.push_back(
                make_row(spec, n, m, reduce(rev_mp, false), 0, runtime));
            break;
          case Metric::rev_mp_trimmed:
            result.rows.push_back(
                make_row(spec, n, m, reduce_trimmed(rev_mp, 0.05), 0, runtime));
            break;
          case Metric::rev_rsop:
            result.rows.push_back(
                make_row(spec, n, m, reduce(rev_rsop, false), 0, runtime));
            break;
          case Metric::rev_ratio:
            result.rows.push_back(
                make_row(spec, n, m, reduce(rev_ratio, false), 0, runtime));
            break;
          default:
            break;
        }
      }
    }
  }

  result.diag_violations = diag_total.load();
  result.dominance_violations = dominance_total.load();
  result.audit_failures = audit_total.load();
  return result;
}

}  // namespace feesim
