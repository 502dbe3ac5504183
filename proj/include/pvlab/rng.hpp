// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pvlab {

// splitmix64 finalizer, used both as a bit mixer and for stream seeding.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s);

// Hierarchical seed identifier. Children are derived by hashing
// parent state with the label, so replicate streams are independent of
// scheduling order and can be reproduced from the manifest path alone.
struct SeedPath {
  std::string path;
  std::uint64_t state = 0;

  SeedPath child(std::string_view label) const;

  static SeedPath root(std::uint64_t seed) { return {"root", mix64(seed)}; }
};

// xoshiro256** seeded by splitmix64 expansion of a 64-bit seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  explicit Rng(const SeedPath& sp) : Rng(sp.state) {}

  std::uint64_t next_u64();
  // uniform in [0,1)
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * next_double(); }
  std::uint64_t below(std::uint64_t n);
  double gaussian();
  // exact Poisson sampler (inversion for small means, PTRD otherwise)
  long long poisson(double mean);

 private:
  std::uint64_t s_[4];
  double cached_gauss_ = 0.0;
  bool has_cached_gauss_ = false;
};

}  // namespace pvlab
