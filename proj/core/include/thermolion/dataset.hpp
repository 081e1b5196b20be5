// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "thermolion/problems.hpp"
#include "thermolion/rng.hpp"

namespace thermolion {

/// Immutable sample store: n rows of dim pixels in [-1,1] with class
/// labels in [0, num_classes).
struct Dataset {
  std::vector<double> images;  // n * dim, row-major
  std::vector<int> labels;
  std::size_t n = 0;
  std::size_t dim = 0;
  int num_classes = 0;

  void validate() const;

  /// Whole-set view (zero copy).
  Batch as_batch() const {
    return Batch{std::span(images), std::span(labels), n, dim};
  }
};

struct BatchPlan {
  std::size_t batch_size = 1024;
  bool drop_last = false;
};

/// First min(k, n) samples in original order; k >= 1.
Dataset take_first(const Dataset& ds, std::size_t k);

/// One epoch of batch index lists: a fresh shuffle of 0..n-1 cut into
/// batch_size chunks; the final short batch is kept unless drop_last.
std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n,
                                                    const BatchPlan& plan,
                                                    RngStream& rng);

/// Copies the rows named by `idx` into the scratch buffers and returns a
/// Batch viewing them.
Batch gather(const Dataset& ds, std::span<const std::size_t> idx,
             std::vector<double>& image_scratch, std::vector<int>& label_scratch);

/// Gaussian class clusters with unit covariance; class k's mean sits on
/// axis (k mod dim) at +/-separation, sign flipping on each wrap. Pixels
/// are clamped to [-1,1].
Dataset synth_blobs(RngStream& rng, std::size_t per_class, int num_classes,
                    std::size_t dim, double separation);

/// Paired IDX files as a validated Dataset (counts must match).
Dataset load_mnist(const std::string& images_path,
                   const std::string& labels_path);

}  // namespace thermolion
