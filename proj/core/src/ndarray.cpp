// SPDX-License-Identifier: Apache-2.0
#include "sciexp/ndarray.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "sciexp/error.hpp"

namespace sciexp {

std::size_t shape_size(const Shape& shape) noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

NdArray::NdArray(Shape shape, std::vector<Complex> data, bool is_complex)
    : shape_(std::move(shape)), data_(std::move(data)), is_complex_(is_complex) {
  if (shape_size(shape_) != data_.size()) {
    throw Error(ErrorKind::shape, "array data length " + std::to_string(data_.size()) +
                                      " does not match shape " + shape_string());
  }
}

NdArray NdArray::zeros(Shape shape, bool is_complex) {
  auto n = shape_size(shape);
  return NdArray(std::move(shape), std::vector<Complex>(n), is_complex);
}

NdArray NdArray::from_real(Shape shape, std::span<const double> values) {
  std::vector<Complex> data(values.begin(), values.end());
  return NdArray(std::move(shape), std::move(data), false);
}

NdArray NdArray::from_real(std::span<const double> values) {
  return from_real(Shape{values.size()}, values);
}

NdArray NdArray::from_complex(Shape shape, std::span<const Complex> values) {
  return NdArray(std::move(shape), std::vector<Complex>(values.begin(), values.end()), true);
}

std::vector<double> NdArray::real_values(double tol) const {
  std::vector<double> out;
  out.reserve(data_.size());
  for (const auto& z : data_) {
    if (std::abs(z.imag()) > tol) {
      throw Error(ErrorKind::invalid_argument, "expected a real array but found complex entries");
    }
    out.push_back(z.real());
  }
  return out;
}

void NdArray::demote_if_real() {
  if (!is_complex_) return;
  for (const auto& z : data_) {
    if (z.imag() != 0.0) return;
  }
  is_complex_ = false;
}

bool NdArray::all_finite() const noexcept {
  for (const auto& z : data_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

std::string NdArray::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

}  // namespace sciexp
