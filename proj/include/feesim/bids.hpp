#pragma once

#include <cstddef>
#include <vector>

namespace feesim {

/// Raw user bids, indexed by user. Valid bids are finite, non-negative,
/// and there is at least one of them.
using BidVector = std::vector<double>;

/// Throws std::invalid_argument if the vector is empty or any bid is
/// negative, NaN or infinite.
void validate_bids(const BidVector& bids);

/// Bids sorted into non-increasing order together with the permutation
/// mapping sorted rank back to the input position.
struct SortedBids {
  std::vector<double> values;               // values[j] >= values[j+1]
  std::vector<std::size_t> original_index;  // sorted rank -> input position

  std::size_t size() const { return values.size(); }
};

/// Stable descending sort: equal bids keep their input order.
SortedBids sort_bids(const BidVector& bids);

}  // namespace feesim
