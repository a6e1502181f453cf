#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "feesim/mechanisms.hpp"
#include "feesim/oracle.hpp"
#include "feesim/rng.hpp"
#include "feesim/strategic.hpp"

using namespace feesim;

namespace {

BidVector random_bids(RngStream& rng, std::size_t n, double scale = 4.0) {
  BidVector bids(n);
  for (double& b : bids) b = scale * rng.next_unit();
  return bids;
}

BidVector random_grid_bids(RngStream& rng, std::size_t n, int resolution,
                           double cap) {
  BidVector bids(n);
  for (double& b : bids) {
    auto steps = static_cast<std::uint64_t>(cap * resolution) + 1;
    b = static_cast<double>(rng.next_u64() % steps) / resolution;
  }
  return bids;
}

}  // namespace

TEST_CASE("oracle_p_strategic: worked examples") {
  CHECK(oracle_p_strategic({4, 3, 1}) == 2.0);
  CHECK(oracle_p_strategic({1, 1}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(oracle_p_strategic({}) == 0.0);
}

TEST_CASE("oracle_p_strategic: exact agreement with the fast path") {
  RngStream rng(211);
  for (int trial = 0; trial < 3000; ++trial) {
    std::size_t n = 1 + rng.next_u64() % 10;
    BidVector others = trial % 2 == 0 ? random_grid_bids(rng, n, 4, 4.0)
                                      : random_bids(rng, n);
    INFO("trial ", trial);
    CHECK(oracle_p_strategic(others) == p_strategic(others));
  }
}

TEST_CASE("oracle_delta_max: worked examples") {
  CHECK(oracle_delta_max({10, 4, 3, 1}) == doctest::Approx(0.8));
  CHECK(oracle_delta_max({3, 3, 3}) == doctest::Approx(1.0 / 3.0));
  CHECK(oracle_delta_max({5, 0}) == 1.0);  // p_strategic = 0 degenerate edge
}

TEST_CASE("oracle_delta_max: agreement with both production paths") {
  RngStream rng(223);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 1 + rng.next_u64() % 30;
    BidVector bids = random_bids(rng, n);
    double reference = oracle_delta_max(bids);
    CHECK(delta_max_fast(bids) == reference);
    CHECK(delta_max_scan(bids) == reference);
  }
}

TEST_CASE("oracle_p_multi: worked examples") {
  GridSpec grid{4, 5.0};
  CHECK(oracle_p_multi({4, 3, 1}, 3, grid) == 2.0);
  CHECK(oracle_p_multi({}, 3, grid) == 0.0);
}

TEST_CASE("oracle_p_multi: bounds the production search") {
  RngStream rng(227);
  for (int trial = 0; trial < 150; ++trial) {
    std::size_t n = 1 + rng.next_u64() % 8;
    BidVector others = random_grid_bids(rng, n, 4, 3.0);
    MultiBidPrice production = p_multi(others, 3);
    GridSpec grid{4, 4.0};
    double reference = oracle_p_multi(others, 3, grid);
    // The oracle is an upper bound; production must not exceed it, and
    // production's own split must be feasible.
    CHECK(production.price <= reference + 1e-12);
    BidVector combined = others;
    combined.insert(combined.end(), production.split.begin(),
                    production.split.end());
    std::sort(combined.begin(), combined.end(), std::greater<>());
    CHECK(mp_cut(combined).price <= production.split.back());
  }
}

TEST_CASE("oracle_rsop_dominance: exhaustive small-scale enumeration") {
  CHECK(oracle_rsop_dominance(3, GridSpec{4, 4.0}) == 0);
  CHECK(oracle_rsop_dominance(1, GridSpec{4, 4.0}) == 0);
  CHECK(oracle_rsop_dominance(6, GridSpec{3, 3.0}) == 0);
}

TEST_CASE("oracle_rsop_dominance_random: mixed families") {
  std::vector<Distribution> families = {
      Distribution::uniform(0, 1),
      Distribution::inverse(),
      Distribution::inverse_truncated(10.0),
      Distribution::exponential(1.0),
      Distribution::discrete({{1, 0.5}, {2, 0.3}, {5, 0.2}}),
      Distribution::constant(3.0),
  };
  CHECK(oracle_rsop_dominance_random(families, 5000, 100, 99) == 0);
}

TEST_CASE("grid and argument validation") {
  CHECK_THROWS_AS(oracle_p_multi({1}, 0, GridSpec{4, 4.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(oracle_p_multi({1}, 2, GridSpec{0, 4.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(oracle_rsop_dominance(3, GridSpec{4, 0.0}),
                  std::invalid_argument);
  std::vector<Distribution> none;
  CHECK_THROWS_AS(oracle_rsop_dominance_random(none, 10, 10, 1),
                  std::invalid_argument);
}
