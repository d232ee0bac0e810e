#ifndef L2X_RNG_HPP
#define L2X_RNG_HPP

#include <cstdint>
#include <string_view>

namespace l2x {

constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (mix64(b) + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

template <typename... Rest>
constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b,
                                     Rest... rest) {
  return hash_combine(hash_combine(a, b), rest...);
}

/// Counter-based generator: the value at (key, counter) is a pure function,
/// so independent streams are split off by deriving new keys and no draw
/// can perturb another stream.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t key = 0) : key_(key) {}

  constexpr std::uint64_t key() const { return key_; }

  constexpr CounterRng split(std::uint64_t tag) const {
    return CounterRng(hash_combine(key_, tag));
  }
  constexpr CounterRng split(std::string_view tag) const {
    return split(fnv1a64(tag));
  }

  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return mix64(key_ ^ mix64(counter));
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  constexpr bool operator==(const CounterRng&) const = default;

 private:
  std::uint64_t key_;
};

/// Sequential view over a CounterRng for consumers that draw in order.
class RngStream {
 public:
  constexpr explicit RngStream(CounterRng rng = CounterRng{}) : rng_(rng) {}

  constexpr double uniform() { return rng_.uniform(counter_++); }
  constexpr double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
  }
  /// Uniform integer in [0, n).
  constexpr std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) %
           (n == 0 ? 1 : n);
  }
  constexpr bool coin() { return uniform() < 0.5; }

  constexpr std::uint64_t counter() const { return counter_; }
  constexpr const CounterRng& source() const { return rng_; }
  constexpr bool operator==(const RngStream&) const = default;

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

}  // namespace l2x

#endif  // L2X_RNG_HPP
