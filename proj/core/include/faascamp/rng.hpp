#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace faascamp {

// Deterministic PRNG used everywhere randomness touches simulation output.
// splitmix64 core; std::mt19937 and <random> distributions are deliberately
// avoided because their output is not pinned across standard libraries and
// every run here must be byte-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // [0, n), rejection-sampled so every value is equally likely.
  std::uint64_t uniform(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // [lo, hi] inclusive.
  std::int64_t uniform_in(std::int64_t lo, std::int64_t hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<std::int64_t>(uniform(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Knuth's product method; means above 400 are split to keep the
  // running product away from double underflow.
  std::int64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 400.0) return poisson(mean / 2) + poisson(mean / 2);
    const double limit = std::exp(-mean);
    std::int64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= next_double();
    } while (p > limit);
    return k - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

  // Independent child stream; same (seed, tag) always yields the same child.
  Rng split(std::string_view tag, std::uint64_t salt = 0) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : tag) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    h ^= salt + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    Rng child(state_ ^ h);
    child.next_u64();
    return child;
  }

 private:
  std::uint64_t state_;
};

}  // namespace faascamp
