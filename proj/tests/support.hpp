#pragma once

#include "ehhk/catalog.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace ehhk::testing {

inline const Catalog& catalog() {
  static const Catalog cat = load_catalog(default_catalog_path());
  return cat;
}

// SplitMix64: small, seedable, identical on every platform.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  long integer(long lo, long hi) { return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

 private:
  std::uint64_t s_;
};

inline std::vector<SpaceSpec> uniform_rows(std::size_t per_family = 3) {
  std::vector<SpaceSpec> out;
  for (auto& s : catalog().sample(per_family))
    if (s.flags.uniform_a) out.push_back(s);
  return out;
}

inline bool strict_yes(const SpaceSpec& s) {
  return (s.flags.uniform_a || s.flags.abelian_k) && existence_condition(s).strict;
}

}  // namespace ehhk::testing
