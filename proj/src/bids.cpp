#include "feesim/bids.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace feesim {

void validate_bids(const BidVector& bids) {
  if (bids.empty()) {
    throw std::invalid_argument("bid vector must contain at least one bid");
  }
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (!std::isfinite(bids[i]) || bids[i] < 0.0) {
      throw std::invalid_argument("bid " + std::to_string(i + 1) +
                                  " is not a finite non-negative value");
    }
  }
}

SortedBids sort_bids(const BidVector& bids) {
  validate_bids(bids);
  SortedBids out;
  out.original_index.resize(bids.size());
  std::iota(out.original_index.begin(), out.original_index.end(), std::size_t{0});
  std::stable_sort(out.original_index.begin(), out.original_index.end(),
                   [&](std::size_t a, std::size_t b) { return bids[a] > bids[b]; });
  out.values.reserve(bids.size());
  for (std::size_t idx : out.original_index) {
    out.values.push_back(bids[idx]);
  }
  return out;
}

}  // namespace feesim
