#include "feesim/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "feesim/report.hpp"

namespace feesim {
namespace {

[[noreturn]] void bad_spec(const std::string& token, const std::string& why) {
  throw std::invalid_argument("bad distribution token `" + token + "`: " + why);
}

double parse_number(const std::string& token) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    bad_spec(token, "not a number");
  }
  if (used != token.size()) bad_spec(token, "not a number");
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  if (!text.empty() && text.back() == sep) out.push_back("");
  return out;
}

// "key=value" -> value, or fail naming the token.
double keyed_number(const std::string& token, const std::string& key) {
  auto pos = token.find('=');
  if (pos == std::string::npos || token.substr(0, pos) != key) {
    bad_spec(token, "expected `" + key + "=<number>`");
  }
  return parse_number(token.substr(pos + 1));
}

}  // namespace

Distribution Distribution::inverse() {
  Distribution d;
  d.family_ = Family::inverse;
  return d;
}

Distribution Distribution::inverse_truncated(double upper) {
  if (!(upper > 1.0)) {
    throw std::invalid_argument("inverse_trunc requires D > 1");
  }
  Distribution d;
  d.family_ = Family::inverse_truncated;
  d.a_ = upper;
  return d;
}

Distribution Distribution::uniform(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && 0.0 <= lo && lo < hi)) {
    throw std::invalid_argument("uniform requires 0 <= lo < hi");
  }
  Distribution d;
  d.family_ = Family::uniform;
  d.a_ = lo;
  d.b_ = hi;
  return d;
}

Distribution Distribution::exponential(double rate) {
  if (!(rate > 0.0 && std::isfinite(rate))) {
    throw std::invalid_argument("exp requires rate > 0");
  }
  Distribution d;
  d.family_ = Family::exponential;
  d.a_ = rate;
  return d;
}

Distribution Distribution::discrete(std::vector<std::pair<double, double>> points) {
  if (points.empty()) {
    throw std::invalid_argument("discrete requires at least one point");
  }
  std::sort(points.begin(), points.end());
  double mass = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto [value, prob] = points[i];
    if (!(std::isfinite(value) && value >= 0.0)) {
      throw std::invalid_argument("discrete support points must be non-negative");
    }
    if (!(prob > 0.0)) {
      throw std::invalid_argument("discrete probabilities must be positive");
    }
    if (i > 0 && value == points[i - 1].first) {
      throw std::invalid_argument("discrete support points must be distinct");
    }
    mass += prob;
  }
  if (std::abs(mass - 1.0) > 1e-12) {
    throw std::invalid_argument("discrete probabilities must sum to 1");
  }
  Distribution d;
  d.family_ = Family::discrete;
  d.points_ = std::move(points);
  d.cumulative_.reserve(d.points_.size());
  double cum = 0.0;
  for (const auto& [value, prob] : d.points_) {
    cum += prob;
    d.cumulative_.push_back(cum);
  }
  d.cumulative_.back() = 1.0;
  return d;
}

Distribution Distribution::constant(double value) {
  if (!(std::isfinite(value) && value >= 0.0)) {
    throw std::invalid_argument("const requires a finite non-negative value");
  }
  Distribution d;
  d.family_ = Family::constant;
  d.a_ = value;
  return d;
}

Distribution Distribution::parse(const std::string& text) {
  auto colon = text.find(':');
  std::string name = text.substr(0, colon);
  std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);

  if (name == "inverse") {
    if (!args.empty()) bad_spec(args, "inverse takes no parameters");
    return inverse();
  }
  if (name == "inverse_trunc") {
    return inverse_truncated(keyed_number(args, "D"));
  }
  if (name == "uniform") {
    auto parts = split(args, ',');
    if (parts.size() != 2) bad_spec(args, "expected `lo=<x>,hi=<y>`");
    return uniform(keyed_number(parts[0], "lo"), keyed_number(parts[1], "hi"));
  }
  if (name == "exp") {
    return exponential(keyed_number(args, "rate"));
  }
  if (name == "discrete") {
    auto eq = args.find('=');
    if (eq == std::string::npos || args.substr(0, eq) != "points") {
      bad_spec(args, "expected `points=v@p;v@p;...`");
    }
    std::vector<std::pair<double, double>> points;
    for (const std::string& item : split(args.substr(eq + 1), ';')) {
      auto at = item.find('@');
      if (at == std::string::npos) bad_spec(item, "expected `<value>@<prob>`");
      points.emplace_back(parse_number(item.substr(0, at)),
                          parse_number(item.substr(at + 1)));
    }
    return discrete(std::move(points));
  }
  if (name == "const") {
    return constant(keyed_number(args, "v"));
  }
  bad_spec(name, "unknown distribution family");
}

double Distribution::quantile(double u) const {
  if (!(u > 0.0 && u <= 1.0)) {
    throw std::invalid_argument("quantile argument must lie in (0, 1]");
  }
  switch (family_) {
    case Family::inverse:
      return 1.0 / u;
    case Family::inverse_truncated:
      return (u <= 1.0 / a_) ? a_ : 1.0 / u;
    case Family::uniform:
      return a_ + (b_ - a_) * u;
    case Family::exponential:
      return -std::log(u) / a_;
    case Family::discrete: {
      // X = x_j for u in (cum_{j-1}, cum_j]
      auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
      return points_[static_cast<std::size_t>(it - cumulative_.begin())].first;
    }
    case Family::constant:
      return a_;
  }
  return 0.0;  // unreachable
}

void Distribution::sample(RngStream& rng, std::span<double> out) const {
  for (double& x : out) x = quantile(rng.next_unit());
}

BidVector Distribution::sample(RngStream& rng, std::size_t count) const {
  if (count < 1) throw std::invalid_argument("sample count must be at least 1");
  BidVector out(count);
  sample(rng, out);
  return out;
}

double Distribution::tail(double x) const {
  switch (family_) {
    case Family::inverse:
      return x < 1.0 ? 1.0 : 1.0 / x;
    case Family::inverse_truncated:
      if (x < 1.0) return 1.0;
      return x >= a_ ? 0.0 : 1.0 / x;
    case Family::uniform:
      if (x < a_) return 1.0;
      if (x >= b_) return 0.0;
      return (b_ - x) / (b_ - a_);
    case Family::exponential:
      return x < 0.0 ? 1.0 : std::exp(-a_ * x);
    case Family::discrete: {
      double mass = 0.0;
      for (const auto& [value, prob] : points_) {
        if (value > x) mass += prob;
      }
      return mass;
    }
    case Family::constant:
      return x < a_ ? 1.0 : 0.0;
  }
  return 0.0;  // unreachable
}

double Distribution::r_f() const {
  switch (family_) {
    case Family::inverse:
    case Family::inverse_truncated:
      // x * Pr{X >= x} = 1 on the whole support, including the atom.
      return 1.0;
    case Family::uniform: {
      double x = std::clamp(b_ / 2.0, a_, b_);
      return x * (b_ - x) / (b_ - a_);
    }
    case Family::exponential:
      return 1.0 / (a_ * std::exp(1.0));
    case Family::discrete: {
      double best = 0.0;
      double at_least = 1.0;  // Pr{X >= x_i}, points sorted ascending
      for (const auto& [value, prob] : points_) {
        best = std::max(best, value * at_least);
        at_least -= prob;
      }
      return best;
    }
    case Family::constant:
      return a_;
  }
  return 0.0;  // unreachable
}

std::optional<double> Distribution::support_upper() const {
  switch (family_) {
    case Family::inverse:
    case Family::exponential:
      return std::nullopt;
    case Family::inverse_truncated:
      return a_;
    case Family::uniform:
      return b_;
    case Family::discrete:
      return points_.back().first;
    case Family::constant:
      return a_;
  }
  return std::nullopt;  // unreachable
}

std::string Distribution::spec_string() const {
  switch (family_) {
    case Family::inverse:
      return "inverse";
    case Family::inverse_truncated:
      return "inverse_trunc:D=" + format_double(a_);
    case Family::uniform:
      return "uniform:lo=" + format_double(a_) + ",hi=" + format_double(b_);
    case Family::exponential:
      return "exp:rate=" + format_double(a_);
    case Family::discrete: {
      std::string out = "discrete:points=";
      for (std::size_t i = 0; i < points_.size(); ++i) {
        if (i) out += ';';
        out += format_double(points_[i].first) + "@" +
               format_double(points_[i].second);
      }
      return out;
    }
    case Family::constant:
      return "const:v=" + format_double(a_);
  }
  return "";  // unreachable
}

}  // namespace feesim
