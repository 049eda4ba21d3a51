#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace genepool {

// Stateless 64-bit mixer, used for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded random source. The engine (mt19937_64) is bit-exact across standard
// library implementations; the bounded and real-valued draws are implemented
// here because std:: distributions are not portable, and reproducibility of
// whole runs from a single seed is part of the contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t index(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform in [0, 1) with 53 random bits.
  double real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return real() < p; }

  // Distinct pair (i, j), i != j, uniform over ordered pairs from [0, bound).
  std::pair<std::uint64_t, std::uint64_t> distinct_pair(std::uint64_t bound) {
    const std::uint64_t i = index(bound);
    std::uint64_t j = index(bound - 1);
    if (j >= i) ++j;
    return {i, j};
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Independent generator for a named side purpose. Pure function of the
  // original seed and the stream id: deriving never perturbs this stream.
  Rng derive(std::uint64_t stream) const {
    return Rng(splitmix64(seed_ ^ splitmix64(stream)));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace genepool
