// SPDX-License-Identifier: Apache-2.0
#include "thermolion/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace thermolion {

double Objective::accuracy(std::span<const FlatTensor>, const Batch&) const {
  throw std::logic_error("accuracy: not a classification objective");
}

double quadratic_eval(const FlatTensor& h, const FlatTensor& theta,
                      double noise_std, RngStream* noise_rng,
                      FlatTensor& grad) {
  require_same_shape(h, theta, "quadratic_eval");
  if (noise_std < 0.0)
    throw std::invalid_argument("quadratic_eval: negative noise_std");
  for (double c : h.data)
    if (!(c > 0.0))
      throw std::invalid_argument("quadratic_eval: nonpositive curvature");

  grad = theta;
  double loss = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    loss += 0.5 * h[i] * theta[i] * theta[i];
    grad[i] = h[i] * theta[i];
  }
  if (noise_rng != nullptr && noise_std > 0.0) {
    for (std::size_t i = 0; i < grad.size(); ++i)
      grad[i] += noise_std * noise_rng->next_gaussian();
  }
  return loss;
}

double rosenbrock_eval(const FlatTensor& theta, FlatTensor& grad) {
  if (theta.size() != 2)
    throw std::invalid_argument("rosenbrock_eval: expected 2 entries, got " +
                                std::to_string(theta.size()));
  const double x = theta[0];
  const double y = theta[1];
  const double r = y - x * x;
  grad = theta;
  grad[0] = -2.0 * (1.0 - x) - 400.0 * x * r;
  grad[1] = 200.0 * r;
  return (1.0 - x) * (1.0 - x) + 100.0 * r * r;
}

QuadraticObjective::QuadraticObjective(FlatTensor h, double noise_std)
    : h_(std::move(h)), noise_std_(noise_std) {
  if (noise_std_ < 0.0)
    throw std::invalid_argument("QuadraticObjective: negative noise_std");
  for (double c : h_.data)
    if (!(c > 0.0))
      throw std::invalid_argument("QuadraticObjective: nonpositive curvature");
  manifest_ = {{"theta", h_.shape}};
}

double QuadraticObjective::eval(std::span<const FlatTensor> params,
                                const Batch&, RngStream* noise_rng,
                                std::vector<FlatTensor>& grads) const {
  grads.resize(1);
  return quadratic_eval(h_, params[0], noise_std_, noise_rng, grads[0]);
}

std::vector<FlatTensor> QuadraticObjective::init_params(RngStream& rng) const {
  FlatTensor theta = gaussian(rng, h_.size(), 0.0, 1.0);
  theta.name = "theta";
  theta.shape = h_.shape;
  double norm = 0.0;
  for (double x : theta.data) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (double& x : theta.data) x /= norm;
  return {theta};
}

RosenbrockObjective::RosenbrockObjective(double x0, double y0)
    : x0_(x0), y0_(y0) {
  manifest_ = {{"theta", {2}}};
}

double RosenbrockObjective::eval(std::span<const FlatTensor> params,
                                 const Batch&, RngStream*,
                                 std::vector<FlatTensor>& grads) const {
  grads.resize(1);
  return rosenbrock_eval(params[0], grads[0]);
}

std::vector<FlatTensor> RosenbrockObjective::init_params(RngStream&) const {
  return {FlatTensor("theta", {2}, {x0_, y0_})};
}

}  // namespace thermolion
