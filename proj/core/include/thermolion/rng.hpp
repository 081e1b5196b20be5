// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "thermolion/flat_tensor.hpp"

namespace thermolion {

/// Deterministic 64-bit generator with independent streams.
///
/// Each (seed, stream_id) pair names a splitmix64 sequence whose initial
/// state is derived by mixing both values, so streams can be handed to
/// independent consumers (one per parameter tensor) without coordination.
/// The raw 64-bit output is pure integer arithmetic and bit-identical
/// across platforms. A stream is single-consumer: never share one across
/// concurrent callers.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  /// Uniform in [0,1) with 53 random mantissa bits.
  double next_unit();

  /// Standard normal via the Marsaglia polar transform (spare cached).
  double next_gaussian();

  /// Unbiased integer in [0, bound) via multiply-shift rejection.
  std::uint64_t next_below(std::uint64_t bound);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// n Gaussian samples as a 1-d tensor. stddev = 0 yields `mean` exactly,
/// consuming no randomness. Negative stddev is rejected.
FlatTensor gaussian(RngStream& rng, std::size_t n, double mean, double stddev);

/// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffle_indices(RngStream& rng, std::size_t n);

}  // namespace thermolion
