// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace dab {

// Seed splitting. Every random stream in the project is derived from one
// root seed by hashing a label path into it:
//
//   derive(seed, label) = splitmix64(seed ^ fnv1a64(label))
//
// Labels are short ASCII strings such as "existence/random" or
// "instance/<id>". Integer keys are mixed with splitmix64 directly.
std::uint64_t fnv1a64(std::string_view text);
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key);

/// Portable random stream. std::mt19937_64 output is fixed by the
/// standard; the distributions on top of it are not, so the few we need
/// are written out here to keep results identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform01();

  /// Standard normal via Box-Muller (no cached second variate).
  double normal();

  /// Distinct indices from [0, population), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t population,
                                                      std::size_t count);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dab
