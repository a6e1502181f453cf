#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "feesim/bids.hpp"
#include "feesim/mechanisms.hpp"

namespace feesim {

inline constexpr int kDefaultMaxSplits = 8;

/// Minimal bid with which a newcomer is still included by the
/// monopolistic-price cut, given the other users' bids. Returns 0 for
/// an empty set of others (a lone bidder wins at any bid).
double p_strategic(const BidVector& others);
double p_strategic_sorted(std::span<const double> others_desc);

/// Monopolistic price of the combined vector (user_bid, others).
double p_honest(double user_bid, const BidVector& others);

/// 1 - p_strategic/p_honest when the user could still win by shading,
/// otherwise 0. Clamped to [0, 1].
double discount_ratio(double user_bid, const BidVector& others);

struct MultiBidPrice {
  double price = 0.0;          // min over splits of u * v^(u)
  std::vector<double> split;   // one realizing split, non-increasing
};

/// Cheapest way to win by splitting one transaction into at most
/// max_splits separate bids, all of which must clear the price.
MultiBidPrice p_multi(const BidVector& others, int max_splits = kDefaultMaxSplits);
MultiBidPrice p_multi_sorted(std::span<const double> others_desc, int max_splits);

double discount_ratio_multi(double user_bid, const BidVector& others,
                            int max_splits);

/// Worst discount ratio over all users, via the highest-bidder shortcut.
double delta_max_fast(const BidVector& bids);
double delta_max_fast_sorted(std::span<const double> sorted_desc);

/// Worst discount ratio computed by scanning every user. O(n^2).
double delta_max_scan(const BidVector& bids);
double delta_max_scan_sorted(std::span<const double> sorted_desc);

/// Discount ratio of the user at the given sorted rank (0-based), with
/// `price` the monopolistic price of the full sorted vector.
double discount_ratio_at_rank(std::span<const double> sorted_desc,
                              std::size_t rank, double price);

struct OSBCheck {
  double eta = 0.0;
  double support_upper = 0.0;
  bool holds = false;
  std::optional<std::size_t> witness_rank;  // 1-based sorted rank
};

/// Structural condition on the sorted bid sequence that must hold whenever
/// the worst discount ratio reaches eta (bids supported on [0, D]).
/// Used as a runtime diagnostic. Requires 0 < eta < 1 and all bids <= D.
OSBCheck osb_check(const SortedBids& sorted, double eta, double D);
OSBCheck osb_check_sorted(std::span<const double> sorted_desc, double eta, double D);

struct DeviationReport {
  std::size_t user = 0;  // input position
  double p_honest = 0.0;
  double p_strategic = 0.0;
  double delta_single = 0.0;
  std::optional<double> p_multi;
  std::optional<double> delta_multi;
  std::vector<double> multi_split;
};

/// Full deviation analysis for one user; multi-bid figures are filled in
/// when max_splits is given.
DeviationReport analyze_deviation(const BidVector& bids, std::size_t user,
                                  std::optional<int> max_splits = std::nullopt);

}  // namespace feesim
