// SPDX-License-Identifier: Apache-2.0
#include "thermolion/flat_tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace thermolion {

std::size_t shape_product(std::span<const std::size_t> shape) {
  if (shape.empty()) return 0;
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_to_string(std::span<const std::size_t> shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ",";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

static void check_dims(const std::vector<std::size_t>& shape) {
  for (std::size_t d : shape)
    if (d == 0)
      throw std::invalid_argument("FlatTensor: zero dimension in shape " +
                                  shape_to_string(shape));
}

FlatTensor::FlatTensor(std::string name_, std::vector<std::size_t> shape_)
    : name(std::move(name_)), shape(std::move(shape_)) {
  check_dims(shape);
  data.assign(shape_product(shape), 0.0);
}

FlatTensor::FlatTensor(std::string name_, std::vector<std::size_t> shape_,
                       std::vector<double> data_)
    : name(std::move(name_)), shape(std::move(shape_)), data(std::move(data_)) {
  check_dims(shape);
  if (data.size() != shape_product(shape))
    throw std::invalid_argument(
        "FlatTensor '" + name + "': data length " + std::to_string(data.size()) +
        " does not match shape " + shape_to_string(shape));
  if (!all_finite(*this))
    throw std::invalid_argument("FlatTensor '" + name + "': non-finite entry");
}

void require_same_shape(const FlatTensor& a, const FlatTensor& b,
                        const char* context) {
  if (a.shape != b.shape)
    throw std::invalid_argument(std::string(context) + ": shape mismatch " +
                                shape_to_string(a.shape) + " vs " +
                                shape_to_string(b.shape));
}

bool all_finite(const FlatTensor& a) {
  for (double x : a.data)
    if (!std::isfinite(x)) return false;
  return true;
}

double mean(const FlatTensor& a) {
  if (a.empty()) throw std::invalid_argument("mean: empty tensor");
  double s = 0.0;
  for (double x : a.data) s += x;
  return s / static_cast<double>(a.size());
}

double sign_of(double x) {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  return 0.0;
}

FlatTensor sign(const FlatTensor& a) {
  return elementwise_map(a, sign_of);
}

}  // namespace thermolion
