// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace thermolion {

/// Named, shaped, flat array of 64-bit reals. Data is row-major and its
/// length always equals the product of the shape.
struct FlatTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> data;

  FlatTensor() = default;

  /// Zero-filled tensor. Every dimension must be >= 1.
  FlatTensor(std::string name, std::vector<std::size_t> shape);

  /// Tensor with explicit data; length must match the shape product and
  /// every entry must be finite.
  FlatTensor(std::string name, std::vector<std::size_t> shape,
             std::vector<double> data);

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  double operator[](std::size_t i) const { return data[i]; }
  double& operator[](std::size_t i) { return data[i]; }

  bool same_shape(const FlatTensor& other) const { return shape == other.shape; }
};

/// Product of the dimensions; 0 for an empty shape list.
std::size_t shape_product(std::span<const std::size_t> shape);

std::string shape_to_string(std::span<const std::size_t> shape);

/// Throws std::invalid_argument naming both shapes when they differ.
void require_same_shape(const FlatTensor& a, const FlatTensor& b,
                        const char* context);

bool all_finite(const FlatTensor& a);

/// Arithmetic mean of all entries. Rejects empty tensors.
double mean(const FlatTensor& a);

/// Three-valued sign: -1 / 0 / +1 per entry.
FlatTensor sign(const FlatTensor& a);

double sign_of(double x);

template <class F>
FlatTensor elementwise_map(const FlatTensor& a, F&& f) {
  FlatTensor out = a;
  for (double& x : out.data) x = f(x);
  return out;
}

template <class F>
FlatTensor elementwise_zip(const FlatTensor& a, const FlatTensor& b, F&& f) {
  require_same_shape(a, b, "elementwise_zip");
  FlatTensor out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = f(a.data[i], b.data[i]);
  return out;
}

}  // namespace thermolion
