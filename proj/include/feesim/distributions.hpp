#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "feesim/bids.hpp"
#include "feesim/rng.hpp"

namespace feesim {

/// Immutable value-distribution family. Sampling is by CDF inversion from
/// a uniform variate on (0, 1], so a stream forced to u reproduces the
/// analytic quantile exactly.
class Distribution {
 public:
  enum class Family {
    inverse,            // tail 1/x on [1, inf)
    inverse_truncated,  // tail 1/x on [1, D), atom of mass 1/D at D
    uniform,
    exponential,
    discrete,
    constant,
  };

  static Distribution inverse();
  static Distribution inverse_truncated(double upper);
  static Distribution uniform(double lo, double hi);
  static Distribution exponential(double rate);
  // points: (value, probability); probabilities positive, summing to 1.
  static Distribution discrete(std::vector<std::pair<double, double>> points);
  static Distribution constant(double value);

  /// Parses the CLI grammar: `inverse`, `inverse_trunc:D=10`,
  /// `uniform:lo=0,hi=1`, `exp:rate=1`, `discrete:points=1@0.5;2@0.5`,
  /// `const:v=3`. Throws std::invalid_argument naming the offending token.
  static Distribution parse(const std::string& text);

  Family family() const { return family_; }

  /// Analytic quantile at u in (0, 1].
  double quantile(double u) const;

  double sample(RngStream& rng) const { return quantile(rng.next_unit()); }
  void sample(RngStream& rng, std::span<double> out) const;
  BidVector sample(RngStream& rng, std::size_t count) const;

  /// Pr{X > x}.
  double tail(double x) const;

  /// sup_x x * Pr{X >= x}; finite for every supported family.
  double r_f() const;

  /// Upper end of the support when bounded.
  std::optional<double> support_upper() const;
  bool bounded_support() const { return support_upper().has_value(); }

  /// Round-trips through parse().
  std::string spec_string() const;

 private:
  Distribution() = default;

  Family family_ = Family::inverse;
  double a_ = 0.0;  // D / lo / rate / value
  double b_ = 0.0;  // hi
  std::vector<std::pair<double, double>> points_;  // sorted by value
  std::vector<double> cumulative_;
};

}  // namespace feesim
