#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace notecoder {

// Seeded random source. The std distributions are implementation-defined, so
// the few draws we need are derived directly from the engine output to keep
// corpora and models identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Child stream for (seed, index); used to give each parallel task its own generator.
  static Rng derive(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n). n must be > 0.
  std::size_t index(std::size_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Poisson draw (Knuth's method); fine for the small means used here.
  unsigned poisson(double mean);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace notecoder
