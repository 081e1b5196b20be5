// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace thermolion {

/// IDX image payload normalized to [-1,1]: pixel byte p maps to
/// p/127.5 - 1 exactly at the byte endpoints.
struct IdxImageData {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // count * rows * cols, row-major
};

double normalize_pixel(std::uint8_t p);

/// Parses a big-endian IDX image file (magic 0x00000803). Files ending in
/// ".gz" are transparently decompressed. Wrong magic and truncated
/// payloads are rejected without partial results.
IdxImageData load_idx_images(const std::string& path);

/// Parses a big-endian IDX label file (magic 0x00000801). Label bytes
/// must be < num_classes.
std::vector<int> load_idx_labels(const std::string& path, int num_classes = 10);

void write_idx_images(const std::string& path, std::size_t count,
                      std::size_t rows, std::size_t cols,
                      std::span<const std::uint8_t> pixels);

void write_idx_labels(const std::string& path,
                      std::span<const std::uint8_t> labels);

}  // namespace thermolion
