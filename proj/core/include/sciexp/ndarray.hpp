// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace sciexp {

using Complex = std::complex<double>;
using Shape = std::vector<std::size_t>;

/// Dense row-major n-d array of complex numbers with a real/complex dtype
/// tag. Real arrays keep zero imaginary parts.
class NdArray {
 public:
  NdArray() = default;
  NdArray(Shape shape, std::vector<Complex> data, bool is_complex);

  static NdArray zeros(Shape shape, bool is_complex = false);
  static NdArray from_real(Shape shape, std::span<const double> values);
  static NdArray from_real(std::span<const double> values);
  static NdArray from_complex(Shape shape, std::span<const Complex> values);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t ndim() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_complex() const noexcept { return is_complex_; }
  void set_complex(bool flag) noexcept { is_complex_ = flag; }

  std::span<const Complex> data() const noexcept { return data_; }
  std::span<Complex> data() noexcept { return data_; }
  Complex& operator[](std::size_t i) { return data_[i]; }
  const Complex& operator[](std::size_t i) const { return data_[i]; }

  /// Real parts; throws if any imaginary part exceeds `tol` in magnitude.
  std::vector<double> real_values(double tol = 0.0) const;

  /// Drops the complex tag when every imaginary part is exactly zero.
  void demote_if_real();

  bool all_finite() const noexcept;
  std::string shape_string() const;

  friend bool operator==(const NdArray&, const NdArray&) = default;

 private:
  Shape shape_;
  std::vector<Complex> data_;
  bool is_complex_ = false;
};

std::size_t shape_size(const Shape& shape) noexcept;

}  // namespace sciexp
