#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "feesim/bids.hpp"
#include "feesim/distributions.hpp"

namespace feesim {

/// Brute-force references for differential testing. Not performance-tuned;
/// intended for n <= 50.

struct GridSpec {
  int resolution = 4;   // candidate points per unit interval
  double bid_cap = 4.0;

  double spacing() const { return 1.0 / resolution; }
};

/// Evaluates the winning predicate at every breakpoint of the inserted
/// bid (sorted values, prefix-max ratios, midpoints) and returns the
/// minimal winning candidate. Exact: the predicate can change only at
/// these points.
double oracle_p_strategic(const BidVector& others);

/// Exhaustive search over grid-quantized non-increasing split vectors.
/// An upper bound on the true optimum, tight to within grid spacing.
double oracle_p_multi(const BidVector& others, int max_splits,
                      const GridSpec& grid);

/// Recomputes every user's discount ratio from scratch via
/// oracle_p_strategic and returns the maximum.
double oracle_delta_max(const BidVector& bids);

/// Enumerates all bid multisets of size 1..n_max over the grid values and
/// ALL 2^n partitions, counting instances where the random-sampling
/// revenue exceeds the monopolistic revenue. Must return 0.
std::size_t oracle_rsop_dominance(std::size_t n_max, const GridSpec& grid);

/// Random-instance dominance check across distribution families.
/// Returns the violation count (must be 0).
std::size_t oracle_rsop_dominance_random(std::span<const Distribution> families,
                                         std::size_t instances,
                                         std::size_t n_max, std::uint64_t seed);

}  // namespace feesim
