#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace feesim {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_u64(std::uint64_t seed, std::uint64_t value) {
  std::uint64_t s = seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  return splitmix64(s);
}

inline std::uint64_t hash_str(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Deterministic random stream. Streams derived from the same
/// (seed, tag, n, index) tuple are identical on every platform:
/// std::mt19937_64 with a fixed 64-bit-to-double mapping, never
/// the implementation-defined std::uniform_real_distribution.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  static RngStream derive(std::uint64_t seed, std::string_view tag,
                          std::uint64_t n, std::uint64_t index) {
    std::uint64_t h = mix_u64(mix_u64(mix_u64(seed, hash_str(tag)), n), index);
    return RngStream(h);
  }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on (0, 1]; zero is excluded so 1/u is always finite.
  double next_unit() {
    return static_cast<double>((gen_() >> 11) + 1) * 0x1p-53;
  }

  bool next_bit() { return (gen_() & 1ULL) != 0; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace feesim
