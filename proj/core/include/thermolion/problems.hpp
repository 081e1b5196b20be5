// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "thermolion/flat_tensor.hpp"
#include "thermolion/rng.hpp"

namespace thermolion {

/// Non-owning view of one mini-batch: n rows of dim pixels in [-1,1],
/// plus class labels for classification objectives (empty otherwise).
struct Batch {
  std::span<const double> images;
  std::span<const int> labels;
  std::size_t n = 0;
  std::size_t dim = 0;
};

struct ParamSpec {
  std::string name;
  std::vector<std::size_t> shape;
};

/// A differentiable objective with exact hand-derived gradients.
///
/// eval fills `grads` (shapes per manifest) and returns the loss. Passing
/// noise_rng == nullptr requests the noise-free channel; evaluation is
/// then a pure function of (params, batch), which the finite-difference
/// checker relies on.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual const std::vector<ParamSpec>& manifest() const = 0;

  virtual double eval(std::span<const FlatTensor> params, const Batch& batch,
                      RngStream* noise_rng,
                      std::vector<FlatTensor>& grads) const = 0;

  virtual std::vector<FlatTensor> init_params(RngStream& rng) const = 0;

  virtual bool classification() const { return false; }

  /// Fraction of argmax-correct predictions; classification only.
  virtual double accuracy(std::span<const FlatTensor> params,
                          const Batch& batch) const;
};

/// loss = 1/2 sum h_i theta_i^2 (reported noise-free); grad = h.theta + xi
/// with xi ~ N(0, noise_std^2) when a stream is supplied.
double quadratic_eval(const FlatTensor& h, const FlatTensor& theta,
                      double noise_std, RngStream* noise_rng,
                      FlatTensor& grad);

/// Classic Rosenbrock (a=1, b=100) on a 2-vector.
double rosenbrock_eval(const FlatTensor& theta, FlatTensor& grad);

class QuadraticObjective final : public Objective {
 public:
  /// h entries must be strictly positive.
  QuadraticObjective(FlatTensor h, double noise_std);

  const std::vector<ParamSpec>& manifest() const override { return manifest_; }
  double eval(std::span<const FlatTensor> params, const Batch& batch,
              RngStream* noise_rng, std::vector<FlatTensor>& grads) const override;
  /// Unit-norm random start.
  std::vector<FlatTensor> init_params(RngStream& rng) const override;

  const FlatTensor& curvatures() const { return h_; }

 private:
  FlatTensor h_;
  double noise_std_;
  std::vector<ParamSpec> manifest_;
};

class RosenbrockObjective final : public Objective {
 public:
  RosenbrockObjective(double x0 = -1.2, double y0 = 1.0);

  const std::vector<ParamSpec>& manifest() const override { return manifest_; }
  double eval(std::span<const FlatTensor> params, const Batch& batch,
              RngStream* noise_rng, std::vector<FlatTensor>& grads) const override;
  std::vector<FlatTensor> init_params(RngStream& rng) const override;

 private:
  double x0_, y0_;
  std::vector<ParamSpec> manifest_;
};

}  // namespace thermolion
