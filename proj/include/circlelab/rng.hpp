#pragma once

#include <cstdint>

namespace circlelab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based generator: the value at (seed, counter) is independent of
/// call order, which keeps Monte Carlo runs reproducible under any threading.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return splitmix64(seed_ ^ splitmix64(counter));
  }
  /// Uniform in [0, 1).
  double uniform(std::uint64_t counter) const {
    return double(bits(counter) >> 11) * 0x1.0p-53;
  }
  /// Uniform in [a, b).
  double uniform(std::uint64_t counter, double a, double b) const {
    return a + (b - a) * uniform(counter);
  }
  /// Integer in [0, m).
  std::uint64_t below(std::uint64_t counter, std::uint64_t m) const {
    return bits(counter) % m;
  }

 private:
  std::uint64_t seed_;
};

}  // namespace circlelab
