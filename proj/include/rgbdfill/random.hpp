// Copyright 2026 The rgbdfill Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace rgbdfill {

constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream key from a parent seed and a label.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) {
  return mix64(seed ^ mix64(label + 0x632be59bd9b4e019ULL));
}

/// Uniform in (0, 1), never exactly 0 or 1.
inline double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Counter-based standard normal: the value at `index` depends only on
/// (key, index), so any slice can be generated in any order or in parallel.
inline double counter_normal(std::uint64_t key, std::uint64_t index) {
  const std::uint64_t a = mix64(key ^ mix64(2 * index));
  const std::uint64_t b = mix64(key ^ mix64(2 * index + 1));
  const double u1 = to_open_unit(a);
  const double u2 = to_open_unit(b);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Sequential generator. Each draw advances a counter; normals come from
/// counter_normal so a block of n draws can be filled in parallel.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(mix64(seed)) {}

  std::uint64_t next_u64() { return mix64(key_ ^ mix64(counter_++)); }
  double uniform() { return to_open_unit(next_u64()); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }
  double normal() { return counter_normal(key_ ^ 0x5bd1e995ULL, counter_++); }

  void fill_normal(std::span<double> out) {
    const std::uint64_t base = counter_;
    const std::uint64_t key = key_ ^ 0x5bd1e995ULL;
    const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (n > 4096)
    for (std::int64_t i = 0; i < n; ++i) out[i] = counter_normal(key, base + static_cast<std::uint64_t>(i));
    counter_ += out.size();
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rgbdfill
