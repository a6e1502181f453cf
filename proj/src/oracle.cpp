#include "feesim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "feesim/mechanisms.hpp"
#include "feesim/rng.hpp"

namespace feesim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Does a bid of w, inserted among the others, clear the resulting
// monopolistic price? Evaluated from first principles via mp_cut.
bool wins(double w, const BidVector& others) {
  std::vector<double> combined;
  combined.reserve(others.size() + 1);
  combined.push_back(w);
  combined.insert(combined.end(), others.begin(), others.end());
  std::sort(combined.begin(), combined.end(), std::greater<>());
  return mp_cut(combined).price <= w;
}

// Do u copies of w all clear the price?
bool wins_split(const std::vector<double>& splits, const BidVector& others) {
  std::vector<double> combined(others.begin(), others.end());
  combined.insert(combined.end(), splits.begin(), splits.end());
  std::sort(combined.begin(), combined.end(), std::greater<>());
  return mp_cut(combined).price <= splits.back();
}

}  // namespace

double oracle_p_strategic(const BidVector& others) {
  if (others.empty()) return 0.0;
  validate_bids(others);

  std::vector<double> c(others.begin(), others.end());
  std::sort(c.begin(), c.end(), std::greater<>());
  const std::size_t m = c.size();

  // Breakpoints of the winning predicate: sorted bid values and the
  // prefix-max ratios H_r / r at every insertion rank.
  std::vector<double> candidates;
  candidates.push_back(0.0);
  double prefix = 0.0;
  for (std::size_t r = 1; r <= m + 1; ++r) {
    if (r <= m) candidates.push_back(c[r - 1]);
    candidates.push_back(prefix / static_cast<double>(r));
    if (r <= m) prefix = std::max(prefix, static_cast<double>(r) * c[r - 1]);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  // A breakpoint is an exact infimum; the mechanism's own arithmetic can
  // reject it by a rounding hair, so each candidate is lifted to the
  // minimal representable bid that actually wins (mirroring the production
  // convention).
  double best = kInf;
  for (double w : candidates) {
    for (int i = 0; i < 32 && !wins(w, others); ++i) {
      w = std::nextafter(w, kInf);
    }
    if (w < best && wins(w, others)) best = w;
  }

  // Midpoints guard against a missing breakpoint: if the predicate dipped
  // between two candidates, the midpoint would expose it.
  for (std::size_t i = 0; i + 1 < candidates.size(); ++i) {
    double mid = 0.5 * (candidates[i] + candidates[i + 1]);
    if (mid < best && wins(mid, others)) best = mid;
  }
  return best;
}

double oracle_p_multi(const BidVector& others, int max_splits,
                      const GridSpec& grid) {
  if (max_splits < 1) throw std::invalid_argument("max_splits must be at least 1");
  if (grid.resolution < 1 || !(grid.bid_cap > 0.0)) {
    throw std::invalid_argument("grid requires resolution >= 1 and bid_cap > 0");
  }
  if (others.empty()) return 0.0;
  validate_bids(others);

  std::vector<double> values;
  const int steps = static_cast<int>(std::ceil(grid.bid_cap * grid.resolution));
  values.reserve(static_cast<std::size_t>(steps) + 1);
  for (int g = 0; g <= steps; ++g) {
    values.push_back(static_cast<double>(g) / grid.resolution);
  }

  double best = kInf;
  std::vector<double> splits;
  // Enumerate non-increasing split vectors over the grid, depth-first.
  auto recurse = [&](auto&& self, int remaining, std::size_t max_value_idx) -> void {
    if (!splits.empty()) {
      double cost = static_cast<double>(splits.size()) * splits.back();
      if (cost < best && wins_split(splits, others)) best = cost;
    }
    if (remaining == 0) return;
    for (std::size_t vi = 0; vi <= max_value_idx; ++vi) {
      splits.push_back(values[vi]);
      self(self, remaining - 1, vi);
      splits.pop_back();
    }
  };
  recurse(recurse, max_splits, values.size() - 1);
  return best;
}

double oracle_delta_max(const BidVector& bids) {
  validate_bids(bids);
  std::vector<double> sorted(bids.begin(), bids.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double price = mp_cut(sorted).price;

  double best = 0.0;
  BidVector others;
  others.reserve(bids.size() - 1);
  for (std::size_t i = 0; i < bids.size(); ++i) {
    others.clear();
    for (std::size_t j = 0; j < bids.size(); ++j) {
      if (j != i) others.push_back(bids[j]);
    }
    double strategic = oracle_p_strategic(others);
    if (bids[i] < strategic || price <= 0.0) continue;
    best = std::max(best, std::min(1.0, std::max(0.0, 1.0 - strategic / price)));
  }
  return best;
}

std::size_t oracle_rsop_dominance(std::size_t n_max, const GridSpec& grid) {
  if (grid.resolution < 1 || !(grid.bid_cap > 0.0)) {
    throw std::invalid_argument("grid requires resolution >= 1 and bid_cap > 0");
  }
  std::vector<double> values;
  for (int g = 1; g <= grid.resolution; ++g) {
    values.push_back(grid.bid_cap * g / grid.resolution);
  }

  std::size_t violations = 0;
  std::vector<double> bids;

  auto check_partitions = [&]() {
    std::vector<double> sorted(bids);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double mp_revenue = mp_cut(sorted).revenue;
    const std::size_t n = bids.size();
    std::vector<double> side_a, side_b;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      side_a.clear();
      side_b.clear();
      for (std::size_t i = 0; i < n; ++i) {
        ((mask >> i) & 1 ? side_b : side_a).push_back(bids[i]);
      }
      std::sort(side_a.begin(), side_a.end(), std::greater<>());
      std::sort(side_b.begin(), side_b.end(), std::greater<>());
      const double price_a = mp_cut(side_a).price;
      const double price_b = mp_cut(side_b).price;
      std::size_t winners_a = 0, winners_b = 0;
      for (double v : side_a) winners_a += (v >= price_b);
      for (double v : side_b) winners_b += (v >= price_a);
      double revenue = static_cast<double>(winners_a) * price_b +
                       static_cast<double>(winners_b) * price_a;
      if (revenue > mp_revenue) ++violations;
    }
  };

  // Non-increasing vectors only: both mechanisms are symmetric in the
  // users, and every partition of the multiset is still enumerated.
  auto gen = [&](auto&& self, std::size_t remaining, std::size_t max_idx) -> void {
    if (!bids.empty()) check_partitions();
    if (remaining == 0) return;
    for (std::size_t vi = 0; vi <= max_idx; ++vi) {
      bids.push_back(values[vi]);
      self(self, remaining - 1, vi);
      bids.pop_back();
    }
  };
  gen(gen, n_max, values.size() - 1);
  return violations;
}

std::size_t oracle_rsop_dominance_random(std::span<const Distribution> families,
                                         std::size_t instances,
                                         std::size_t n_max, std::uint64_t seed) {
  if (families.empty() || n_max < 1) {
    throw std::invalid_argument("need at least one family and n_max >= 1");
  }
  std::size_t violations = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    RngStream rng = RngStream::derive(seed, "dominance", n_max, i);
    const Distribution& dist = families[i % families.size()];
    std::size_t n = 1 + static_cast<std::size_t>(rng.next_u64() % n_max);
    BidVector bids = dist.sample(rng, n);
    std::vector<double> sorted(bids);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double mp_revenue = mp_cut(sorted).revenue;
    RSOPOutcome outcome = rsop_random(bids, rng);
    if (outcome.revenue > mp_revenue) ++violations;
  }
  return violations;
}

}  // namespace feesim
