#pragma once

// Portable, seed-stable random utilities. The standard distributions are
// implementation-defined, so sampling is done here on top of the raw
// 64-bit engine to keep outputs identical across standard libraries.

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "linkassess/error.hpp"

namespace linkassess {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Combine a base seed with stream coordinates (e.g. r-index, run-index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ (a + 0x632be59bd9b4e019ULL)) ^ (b + 0x8cb92ba72f3d8dd7ULL));
}

/// FNV-1a over bytes.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(values[i - 1], values[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    shuffle(std::span<T>(values));
  }

  /// `count` distinct values from [0, universe), in ascending order (Floyd's algorithm).
  std::vector<std::uint64_t> sample_without_replacement(std::uint64_t universe, std::uint64_t count) {
    if (count > universe) throw InvalidArgument("cannot sample more items than the universe holds");
    std::vector<std::uint64_t> out;
    if (count == 0) return out;
    if (count * 2 >= universe) {
      std::vector<std::uint64_t> all(universe);
      for (std::uint64_t i = 0; i < universe; ++i) all[i] = i;
      // partial Fisher-Yates
      for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t j = i + uniform_index(universe - i);
        std::swap(all[i], all[j]);
      }
      out.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
    } else {
      std::unordered_set<std::uint64_t> chosen;
      chosen.reserve(count * 2);
      for (std::uint64_t j = universe - count; j < universe; ++j) {
        std::uint64_t t = uniform_index(j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
      }
      out.assign(chosen.begin(), chosen.end());
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace linkassess
