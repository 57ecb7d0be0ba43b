#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace erl2 {

// Deterministic random source. The engine is mt19937_64 (bit-exact across
// platforms); all value transforms are implemented here rather than with
// std distributions so that streams are reproducible across standard
// library implementations. Independent substreams are derived from the
// originating seed with a splitmix64-style mix, which keeps parallel
// evaluation order-independent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be positive.
  int uniform_int(int n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return static_cast<int>(x % un);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller (no cached spare, so the stream
  // position is a pure function of the number of calls).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

  // Derived, statistically independent substream. Deriving with the same
  // labels always yields the same stream.
  Rng child(std::uint64_t a, std::uint64_t b = 0) const {
    std::uint64_t s = mix(seed_ + 0x9e3779b97f4a7c15ull * (a + 1));
    s = mix(s ^ (0xbf58476d1ce4e5b9ull * (b + 1)));
    return Rng(s);
  }

  Rng child(std::string_view label, std::uint64_t b = 0) const {
    return child(fnv1a(label), b);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    return h;
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace erl2
