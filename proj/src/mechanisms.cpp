#include "feesim/mechanisms.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace feesim {

MPCut mp_cut(std::span<const double> sorted_desc) {
  MPCut cut;
  for (std::size_t k = 1; k <= sorted_desc.size(); ++k) {
    double candidate = static_cast<double>(k) * sorted_desc[k - 1];
    if (candidate >= cut.revenue) {  // ties go to the larger k
      cut.revenue = candidate;
      cut.k_star = k;
      cut.price = sorted_desc[k - 1];
    }
  }
  return cut;
}

MPOutcome monopolistic_price(const SortedBids& sorted) {
  MPCut cut = mp_cut(sorted.values);
  MPOutcome out;
  out.revenue = cut.revenue;
  out.k_star = cut.k_star;
  out.price = cut.price;
  out.winners.assign(sorted.original_index.begin(),
                     sorted.original_index.begin() +
                         static_cast<std::ptrdiff_t>(cut.k_star));
  return out;
}

MPOutcome monopolistic_price(const BidVector& bids) {
  return monopolistic_price(sort_bids(bids));
}

RSOPOutcome rsop(const BidVector& bids, const std::vector<Side>& partition) {
  validate_bids(bids);
  if (partition.size() != bids.size()) {
    throw std::invalid_argument("partition must label every user");
  }

  RSOPOutcome out;
  out.partition = partition;

  BidVector side_a, side_b;
  for (std::size_t i = 0; i < bids.size(); ++i) {
    (partition[i] == Side::A ? side_a : side_b).push_back(bids[i]);
  }

  auto side_price = [](BidVector& side) {
    if (side.empty()) return 0.0;
    std::sort(side.begin(), side.end(), std::greater<>());
    return mp_cut(side).price;
  };
  out.price_a = side_price(side_a);
  out.price_b = side_price(side_b);

  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (partition[i] == Side::A) {
      if (bids[i] >= out.price_b) out.winners_a.push_back(i);
    } else {
      if (bids[i] >= out.price_a) out.winners_b.push_back(i);
    }
  }
  out.revenue = static_cast<double>(out.winners_a.size()) * out.price_b +
                static_cast<double>(out.winners_b.size()) * out.price_a;
  return out;
}

RSOPOutcome rsop_random(const BidVector& bids, RngStream& rng) {
  validate_bids(bids);
  std::vector<Side> partition(bids.size());
  for (auto& side : partition) {
    side = rng.next_bit() ? Side::B : Side::A;
  }
  return rsop(bids, partition);
}

FeeSchedule pay_your_bid(const BidVector& bids, std::size_t capacity) {
  SortedBids sorted = sort_bids(bids);
  FeeSchedule schedule;
  std::size_t taken = std::min(capacity, sorted.size());
  schedule.entries.reserve(taken);
  for (std::size_t j = 0; j < taken; ++j) {
    schedule.entries.push_back({sorted.original_index[j], sorted.values[j]});
    schedule.total += sorted.values[j];
  }
  return schedule;
}

FeeSchedule to_fee_schedule(const MPOutcome& outcome) {
  FeeSchedule schedule;
  schedule.entries.reserve(outcome.winners.size());
  for (std::size_t user : outcome.winners) {
    schedule.entries.push_back({user, outcome.price});
    schedule.total += outcome.price;
  }
  return schedule;
}

FeeSchedule to_fee_schedule(const RSOPOutcome& outcome) {
  FeeSchedule schedule;
  schedule.entries.reserve(outcome.winners_a.size() + outcome.winners_b.size());
  for (std::size_t user : outcome.winners_a) {
    schedule.entries.push_back({user, outcome.price_b});
    schedule.total += outcome.price_b;
  }
  for (std::size_t user : outcome.winners_b) {
    schedule.entries.push_back({user, outcome.price_a});
    schedule.total += outcome.price_a;
  }
  return schedule;
}

FeeSchedule m_epsilon_wrap(const FeeSchedule& base, const BidVector& bids,
                           double epsilon) {
  validate_bids(bids);
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1)");
  }
  const double shift = epsilon / (1.0 + epsilon);
  FeeSchedule wrapped;
  wrapped.entries.reserve(base.entries.size());
  for (const FeeEntry& entry : base.entries) {
    if (entry.user >= bids.size()) {
      throw std::invalid_argument("fee entry for unknown user " +
                                  std::to_string(entry.user + 1));
    }
    double bid = bids[entry.user];
    if (entry.fee > bid) {
      throw std::invalid_argument("base fee exceeds bid for user " +
                                  std::to_string(entry.user + 1));
    }
    double fee = entry.fee + shift * (bid - entry.fee);
    wrapped.entries.push_back({entry.user, fee});
    wrapped.total += fee;
  }
  return wrapped;
}

}  // namespace feesim
