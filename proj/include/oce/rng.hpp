// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace oce {

/// Seeded random stream. One instance per worker; never shared across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in the closed interval [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform index in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  double uniform01();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Independent stream seed for (master seed, stream index), via splitmix64.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace oce
