#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "feesim/bids.hpp"
#include "feesim/rng.hpp"

namespace feesim {

/// Revenue-maximizing single-price cut of a sorted bid sequence:
/// revenue = max_k k*b_k, k_star the largest maximizer, price = b_{k_star}.
/// An empty sequence yields {0, 0, 0}.
struct MPCut {
  double revenue = 0.0;
  std::size_t k_star = 0;
  double price = 0.0;
};

MPCut mp_cut(std::span<const double> sorted_desc);

struct MPOutcome {
  double revenue = 0.0;
  std::size_t k_star = 0;  // 1-based rank of the cutoff bid
  double price = 0.0;
  std::vector<std::size_t> winners;  // original user indices, |winners| == k_star
};

MPOutcome monopolistic_price(const BidVector& bids);
MPOutcome monopolistic_price(const SortedBids& sorted);

enum class Side : unsigned char { A, B };

struct RSOPOutcome {
  std::vector<Side> partition;  // per user
  double price_a = 0.0;         // monopolistic price of side A (0 if empty)
  double price_b = 0.0;
  std::vector<std::size_t> winners_a;  // side-A users with bid >= price_b
  std::vector<std::size_t> winners_b;  // side-B users with bid >= price_a
  double revenue = 0.0;  // |winners_a|*price_b + |winners_b|*price_a
};

/// Random-sampling auction with an explicit partition. Each side is priced
/// at its own monopolistic price and charged to the opposite side.
RSOPOutcome rsop(const BidVector& bids, const std::vector<Side>& partition);

/// Assigns each user to side A or B independently with probability 1/2,
/// then evaluates rsop.
RSOPOutcome rsop_random(const BidVector& bids, RngStream& rng);

struct FeeEntry {
  std::size_t user = 0;
  double fee = 0.0;
};

struct FeeSchedule {
  std::vector<FeeEntry> entries;
  double total = 0.0;  // sum of fees, accumulated in entry order
};

/// The min(capacity, n) highest bidders each pay their own bid.
/// Ties keep input order.
FeeSchedule pay_your_bid(const BidVector& bids, std::size_t capacity);

FeeSchedule to_fee_schedule(const MPOutcome& outcome);
FeeSchedule to_fee_schedule(const RSOPOutcome& outcome);

/// Shifts each winner's fee toward her bid by the fraction eps/(1+eps)
/// of her utility: p' = p + eps/(1+eps) * (v - p). Allocation is unchanged.
/// Requires 0 <= eps < 1 and every base fee <= the corresponding bid.
FeeSchedule m_epsilon_wrap(const FeeSchedule& base, const BidVector& bids,
                           double epsilon);

}  // namespace feesim
