// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace dkt {

/// Deterministic random source. The bit stream is std::mt19937_64 (whose
/// 10000th output for the default seed is fixed by the C++ standard); all
/// derived distributions are implemented here so that results do not depend
/// on the standard library's distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller, one value per call).
  double normal();
  /// Uniform integer in [0, n), rejection sampled. n must be > 0.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Independent streams split off one master seed.
enum class SeedStream : std::uint64_t {
  kStudentInit = 1,
  kShuffle = 2,
  kGenerator = 3,
  kTeacherInit = 4,
  kTeacherShuffle = 5,
};

/// splitmix64 finaliser, as published with xoshiro.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

std::uint64_t derive_seed(std::uint64_t master, SeedStream stream) noexcept;
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

}  // namespace dkt
