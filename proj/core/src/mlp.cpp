// SPDX-License-Identifier: Apache-2.0
#include "thermolion/mlp.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace thermolion {

namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using MapConstMat = Eigen::Map<const RowMat>;

void check_batch(const MlpDims& dims, const Batch& batch) {
  if (batch.n == 0) throw std::invalid_argument("mlp: empty batch");
  if (batch.dim != dims.in)
    throw std::invalid_argument("mlp: batch dim " + std::to_string(batch.dim) +
                                " != input dim " + std::to_string(dims.in));
  if (batch.images.size() != batch.n * batch.dim)
    throw std::invalid_argument("mlp: image buffer size mismatch");
  if (batch.labels.size() != batch.n)
    throw std::invalid_argument("mlp: label count mismatch");
  for (int y : batch.labels)
    if (y < 0 || static_cast<std::size_t>(y) >= dims.classes)
      throw std::invalid_argument("mlp: label " + std::to_string(y) +
                                  " out of range [0," +
                                  std::to_string(dims.classes) + ")");
}

void check_params(const MlpDims& dims, std::span<const FlatTensor> params) {
  if (params.size() != 4)
    throw std::invalid_argument("mlp: expected 4 parameter tensors");
  const std::size_t sizes[4] = {dims.in * dims.hidden, dims.hidden,
                                dims.hidden * dims.classes, dims.classes};
  for (int i = 0; i < 4; ++i)
    if (params[i].size() != sizes[i])
      throw std::invalid_argument("mlp: parameter '" + params[i].name +
                                  "' has wrong size");
}

// Rowwise stabilized softmax + cross-entropy. probs may be null when only
// the loss is needed.
double softmax_ce(std::span<const double> logits, std::span<const int> labels,
                  std::size_t n, std::size_t classes, double* probs) {
  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double* z = logits.data() + r * classes;
    double zmax = z[0];
    for (std::size_t c = 1; c < classes; ++c) zmax = std::max(zmax, z[c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) sum += std::exp(z[c] - zmax);
    const double lse = zmax + std::log(sum);
    loss += lse - z[labels[r]];
    if (probs != nullptr) {
      for (std::size_t c = 0; c < classes; ++c)
        probs[r * classes + c] = std::exp(z[c] - lse);
    }
  }
  return loss / static_cast<double>(n);
}

}  // namespace

double softmax_cross_entropy(std::span<const double> logits,
                             std::span<const int> labels, std::size_t n,
                             std::size_t classes) {
  if (n == 0) throw std::invalid_argument("softmax_cross_entropy: empty batch");
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= classes)
      throw std::invalid_argument("softmax_cross_entropy: label out of range");
  return softmax_ce(logits, labels, n, classes, nullptr);
}

std::vector<double> softmax_rows(std::span<const double> logits, std::size_t n,
                                 std::size_t classes) {
  std::vector<double> probs(n * classes);
  std::vector<int> dummy(n, 0);
  softmax_ce(logits, dummy, n, classes, probs.data());
  return probs;
}

std::vector<FlatTensor> mlp_init(const MlpDims& dims, RngStream& rng) {
  FlatTensor w1 = gaussian(rng, dims.in * dims.hidden, 0.0,
                           std::sqrt(2.0 / static_cast<double>(dims.in)));
  w1.name = "W1";
  w1.shape = {dims.in, dims.hidden};
  FlatTensor b1("b1", {dims.hidden});
  FlatTensor w2 = gaussian(rng, dims.hidden * dims.classes, 0.0,
                           std::sqrt(2.0 / static_cast<double>(dims.hidden)));
  w2.name = "W2";
  w2.shape = {dims.hidden, dims.classes};
  FlatTensor b2("b2", {dims.classes});
  return {std::move(w1), std::move(b1), std::move(w2), std::move(b2)};
}

double mlp_eval(const MlpDims& dims, std::span<const FlatTensor> params,
                const Batch& batch, std::vector<FlatTensor>& grads) {
  check_batch(dims, batch);
  check_params(dims, params);

  const auto n = static_cast<Eigen::Index>(batch.n);
  const auto in = static_cast<Eigen::Index>(dims.in);
  const auto hid = static_cast<Eigen::Index>(dims.hidden);
  const auto cls = static_cast<Eigen::Index>(dims.classes);

  MapConstMat x(batch.images.data(), n, in);
  MapConstMat w1(params[0].data.data(), in, hid);
  MapConstMat w2(params[2].data.data(), hid, cls);
  const auto& b1 = params[1].data;
  const auto& b2 = params[3].data;

  RowMat z1 = x * w1;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < hid; ++c) z1(r, c) += b1[c];
  RowMat h = z1.cwiseMax(0.0);
  RowMat z2 = h * w2;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < cls; ++c) z2(r, c) += b2[c];

  std::vector<double> probs(batch.n * dims.classes);
  const double loss = softmax_ce({z2.data(), probs.size()}, batch.labels,
                                 batch.n, dims.classes, probs.data());

  // dZ2 = (P - onehot) / n
  MapMat dz2(probs.data(), n, cls);
  for (Eigen::Index r = 0; r < n; ++r) dz2(r, batch.labels[r]) -= 1.0;
  dz2 /= static_cast<double>(n);

  grads.resize(4);
  for (int i = 0; i < 4; ++i) {
    grads[i].name = params[i].name;
    grads[i].shape = params[i].shape;
    grads[i].data.assign(params[i].size(), 0.0);
  }

  MapMat dw2(grads[2].data.data(), hid, cls);
  dw2 = h.transpose() * dz2;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < cls; ++c) grads[3].data[c] += dz2(r, c);

  RowMat dh = dz2 * w2.transpose();
  // ReLU cuts the path where the preactivation was nonpositive
  RowMat dz1 = (z1.array() > 0.0).select(dh, 0.0);

  MapMat dw1(grads[0].data.data(), in, hid);
  dw1 = x.transpose() * dz1;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < hid; ++c) grads[1].data[c] += dz1(r, c);

  return loss;
}

double mlp_accuracy(const MlpDims& dims, std::span<const FlatTensor> params,
                    const Batch& batch) {
  check_batch(dims, batch);
  check_params(dims, params);

  const auto n = static_cast<Eigen::Index>(batch.n);
  const auto in = static_cast<Eigen::Index>(dims.in);
  const auto hid = static_cast<Eigen::Index>(dims.hidden);
  const auto cls = static_cast<Eigen::Index>(dims.classes);

  MapConstMat x(batch.images.data(), n, in);
  MapConstMat w1(params[0].data.data(), in, hid);
  MapConstMat w2(params[2].data.data(), hid, cls);

  RowMat z1 = x * w1;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < hid; ++c) z1(r, c) += params[1].data[c];
  RowMat z2 = z1.cwiseMax(0.0) * w2;

  std::size_t correct = 0;
  for (Eigen::Index r = 0; r < n; ++r) {
    Eigen::Index best = 0;
    double best_z = z2(r, 0) + params[3].data[0];
    for (Eigen::Index c = 1; c < cls; ++c) {
      const double z = z2(r, c) + params[3].data[c];
      if (z > best_z) {  // ties break toward the lowest class index
        best_z = z;
        best = c;
      }
    }
    if (best == batch.labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.n);
}

MlpObjective::MlpObjective(MlpDims dims) : dims_(dims) {
  manifest_ = {{"W1", {dims_.in, dims_.hidden}},
               {"b1", {dims_.hidden}},
               {"W2", {dims_.hidden, dims_.classes}},
               {"b2", {dims_.classes}}};
}

double MlpObjective::eval(std::span<const FlatTensor> params,
                          const Batch& batch, RngStream*,
                          std::vector<FlatTensor>& grads) const {
  return mlp_eval(dims_, params, batch, grads);
}

std::vector<FlatTensor> MlpObjective::init_params(RngStream& rng) const {
  return mlp_init(dims_, rng);
}

double MlpObjective::accuracy(std::span<const FlatTensor> params,
                              const Batch& batch) const {
  return mlp_accuracy(dims_, params, batch);
}

}  // namespace thermolion
