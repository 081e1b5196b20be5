// SPDX-License-Identifier: Apache-2.0
#include "thermolion/dataset.hpp"

#include <algorithm>
#include <stdexcept>

#include "thermolion/idx.hpp"

namespace thermolion {

void Dataset::validate() const {
  if (images.size() != n * dim)
    throw std::invalid_argument("Dataset: image buffer size mismatch");
  if (labels.size() != n)
    throw std::invalid_argument("Dataset: label count " +
                                std::to_string(labels.size()) + " != rows " +
                                std::to_string(n));
  if (num_classes <= 0)
    throw std::invalid_argument("Dataset: num_classes must be positive");
  for (double p : images)
    if (!(p >= -1.0 && p <= 1.0))
      throw std::invalid_argument("Dataset: pixel outside [-1,1]");
  for (int y : labels)
    if (y < 0 || y >= num_classes)
      throw std::invalid_argument("Dataset: label " + std::to_string(y) +
                                  " outside [0," + std::to_string(num_classes) + ")");
}

Dataset take_first(const Dataset& ds, std::size_t k) {
  if (k == 0) throw std::invalid_argument("take_first: k must be >= 1");
  const std::size_t m = std::min(k, ds.n);
  Dataset out;
  out.n = m;
  out.dim = ds.dim;
  out.num_classes = ds.num_classes;
  out.images.assign(ds.images.begin(),
                    ds.images.begin() + static_cast<std::ptrdiff_t>(m * ds.dim));
  out.labels.assign(ds.labels.begin(),
                    ds.labels.begin() + static_cast<std::ptrdiff_t>(m));
  return out;
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n,
                                                    const BatchPlan& plan,
                                                    RngStream& rng) {
  if (plan.batch_size == 0)
    throw std::invalid_argument("epoch_batches: batch_size must be >= 1");
  const std::vector<std::size_t> order = shuffle_indices(rng, n);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += plan.batch_size) {
    const std::size_t end = std::min(n, start + plan.batch_size);
    if (plan.drop_last && end - start < plan.batch_size) break;
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

Batch gather(const Dataset& ds, std::span<const std::size_t> idx,
             std::vector<double>& image_scratch,
             std::vector<int>& label_scratch) {
  image_scratch.resize(idx.size() * ds.dim);
  label_scratch.resize(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const double* src = ds.images.data() + idx[r] * ds.dim;
    std::copy(src, src + ds.dim, image_scratch.data() + r * ds.dim);
    label_scratch[r] = ds.labels[idx[r]];
  }
  return Batch{std::span(image_scratch), std::span(label_scratch), idx.size(),
               ds.dim};
}

Dataset synth_blobs(RngStream& rng, std::size_t per_class, int num_classes,
                    std::size_t dim, double separation) {
  if (per_class == 0 || num_classes <= 0 || dim == 0)
    throw std::invalid_argument("synth_blobs: counts must be positive");
  if (separation < 0.0)
    throw std::invalid_argument("synth_blobs: negative separation");

  Dataset ds;
  ds.n = per_class * static_cast<std::size_t>(num_classes);
  ds.dim = dim;
  ds.num_classes = num_classes;
  ds.images.resize(ds.n * dim);
  ds.labels.resize(ds.n);

  std::size_t row = 0;
  for (int k = 0; k < num_classes; ++k) {
    const std::size_t axis = static_cast<std::size_t>(k) % dim;
    const double mean = (static_cast<std::size_t>(k) / dim) % 2 == 0
                            ? separation
                            : -separation;
    for (std::size_t s = 0; s < per_class; ++s, ++row) {
      double* px = ds.images.data() + row * dim;
      for (std::size_t d = 0; d < dim; ++d) {
        double x = rng.next_gaussian();
        if (d == axis) x += mean;
        px[d] = std::clamp(x, -1.0, 1.0);
      }
      ds.labels[row] = k;
    }
  }
  return ds;
}

Dataset load_mnist(const std::string& images_path,
                   const std::string& labels_path) {
  IdxImageData imgs = load_idx_images(images_path);
  std::vector<int> labels = load_idx_labels(labels_path, 10);
  if (labels.size() != imgs.count)
    throw std::runtime_error("IDX pair mismatch: " + std::to_string(imgs.count) +
                             " images vs " + std::to_string(labels.size()) +
                             " labels");
  Dataset ds;
  ds.n = imgs.count;
  ds.dim = imgs.rows * imgs.cols;
  ds.num_classes = 10;
  ds.images = std::move(imgs.values);
  ds.labels = std::move(labels);
  ds.validate();
  return ds;
}

}  // namespace thermolion
