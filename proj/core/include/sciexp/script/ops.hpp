// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sciexp/error.hpp"
#include "sciexp/script/ast.hpp"
#include "sciexp/script/value.hpp"

namespace sciexp::script {

[[noreturn]] void raise(ErrorKind kind, const std::string& message);
[[noreturn]] void type_error(const std::string& message);

bool truthy(const Value& v);

/// Python int conversion for indices: ints, bools, and integral floats.
std::int64_t to_index(const Value& v);
double to_double(const Value& v);
Complex to_complex(const Value& v);

/// Converts numbers, nested sequences, arrays, and operators to a dense array.
NdArray to_array(const Value& v);
/// 0-d arrays collapse to Python scalars.
Value wrap_array(NdArray a);

NdArray operator_to_dense(const numerics::SparseOperator& m);
numerics::SparseOperator dense_to_operator(const NdArray& a);

Value binary(BinaryOp op, const Value& a, const Value& b);
Value unary(UnaryOp op, const Value& a);
Value compare(CompareOp op, const Value& a, const Value& b);
bool values_equal(const Value& a, const Value& b);

Value get_item(const Value& base, const Value& index);
/// Returns the updated container: lists and dicts mutate in place, arrays are
/// copied.
Value set_item(const Value& base, const Value& index, const Value& v);

/// Elementwise scatter used by `arr.at[idx].op(v)`.
enum class ScatterOp { set, add, multiply, divide, power, min, max };
NdArray scatter(const NdArray& base, const Value& index, const NdArray& values, ScatterOp op);

std::vector<Value> iterate(const Value& v);
std::int64_t length(const Value& v);

std::string repr(const Value& v);
std::string str(const Value& v);

/// Broadcast shape of two shapes; throws a shape error when incompatible.
Shape broadcast_shapes(const Shape& a, const Shape& b);
NdArray broadcast_to(const NdArray& a, const Shape& shape);

/// Elementwise map with separate real and complex kernels. Real inputs use
/// the real kernel (numpy semantics: sqrt(-1.0) is nan).
template <class RealFn, class ComplexFn>
Value map_elementwise(const Value& v, RealFn real_fn, ComplexFn complex_fn) {
  if (v.is<Complex>()) return Value(complex_fn(v.as<Complex>()));
  if (v.is_number()) return Value(static_cast<double>(real_fn(to_double(v))));
  NdArray a = to_array(v);
  if (a.is_complex()) {
    for (auto& z : a.data()) z = complex_fn(z);
  } else {
    for (auto& z : a.data()) z = Complex(real_fn(z.real()), 0.0);
  }
  return wrap_array(std::move(a));
}

NdArray matmul(const NdArray& a, const NdArray& b);

}  // namespace sciexp::script
