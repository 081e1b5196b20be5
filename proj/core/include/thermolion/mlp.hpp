// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "thermolion/problems.hpp"

namespace thermolion {

/// Two-layer rectifier classifier: affine -> ReLU -> affine -> softmax-CE.
struct MlpDims {
  std::size_t in = 784;
  std::size_t hidden = 256;
  std::size_t classes = 10;
};

/// He-initialized parameters [W1, b1, W2, b2]: weights ~ N(0, 2/fan_in),
/// biases zero. W1 is [in x hidden], W2 is [hidden x classes], row-major.
std::vector<FlatTensor> mlp_init(const MlpDims& dims, RngStream& rng);

/// Mean softmax cross-entropy over the batch plus gradients by manual
/// backprop. The log-sum-exp is stabilized by a rowwise max shift.
double mlp_eval(const MlpDims& dims, std::span<const FlatTensor> params,
                const Batch& batch, std::vector<FlatTensor>& grads);

double mlp_accuracy(const MlpDims& dims, std::span<const FlatTensor> params,
                    const Batch& batch);

/// Mean cross-entropy of row-major [n x classes] logits against labels;
/// exposed for direct testing of the loss head.
double softmax_cross_entropy(std::span<const double> logits,
                             std::span<const int> labels, std::size_t n,
                             std::size_t classes);

/// Rowwise softmax of [n x classes] logits (stabilized).
std::vector<double> softmax_rows(std::span<const double> logits, std::size_t n,
                                 std::size_t classes);

class MlpObjective final : public Objective {
 public:
  explicit MlpObjective(MlpDims dims);

  const std::vector<ParamSpec>& manifest() const override { return manifest_; }
  double eval(std::span<const FlatTensor> params, const Batch& batch,
              RngStream* noise_rng, std::vector<FlatTensor>& grads) const override;
  std::vector<FlatTensor> init_params(RngStream& rng) const override;
  bool classification() const override { return true; }
  double accuracy(std::span<const FlatTensor> params,
                  const Batch& batch) const override;

  const MlpDims& dims() const { return dims_; }

 private:
  MlpDims dims_;
  std::vector<ParamSpec> manifest_;
};

}  // namespace thermolion
