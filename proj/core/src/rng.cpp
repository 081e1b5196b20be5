// SPDX-License-Identifier: Apache-2.0
#include "thermolion/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace thermolion {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant)
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  // Mix both identifiers twice so nearby (seed, stream) pairs land far apart.
  state_ = mix64(mix64(seed + kGolden) ^ mix64(~stream_id));
}

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RngStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_unit() - 1.0;
    v = 2.0 * next_unit() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double k = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * k;
  has_spare_ = true;
  return u * k;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be > 0");
  // Lemire's nearly-divisionless unbiased bounded sampling.
  unsigned __int128 m =
      static_cast<unsigned __int128>(next_u64()) * bound;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (lo < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * bound;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

FlatTensor gaussian(RngStream& rng, std::size_t n, double mean, double stddev) {
  if (stddev < 0.0)
    throw std::invalid_argument("gaussian: negative stddev " +
                                std::to_string(stddev));
  FlatTensor out("gaussian", {n});
  if (stddev == 0.0) {
    for (double& x : out.data) x = mean;
    return out;
  }
  for (double& x : out.data) x = mean + stddev * rng.next_gaussian();
  return out;
}

std::vector<std::size_t> shuffle_indices(RngStream& rng, std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace thermolion
