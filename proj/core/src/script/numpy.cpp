// SPDX-License-Identifier: Apache-2.0
// jax.numpy / numpy surface for the script interpreter.
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "script/builtins.hpp"
#include "sciexp/numerics/split_step.hpp"

namespace sciexp::script {

using numerics::SparseOperator;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::vector<std::size_t> strides(const Shape& shape) {
  std::vector<std::size_t> st(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) st[i - 1] = st[i] * shape[i];
  return st;
}

Value shape_tuple(const Shape& s) {
  std::vector<Value> items;
  for (auto d : s) items.emplace_back(static_cast<std::int64_t>(d));
  return Value::tuple(std::move(items));
}

const std::string& builtin_name(const Value& v) { return v.as<std::shared_ptr<BuiltinObj>>()->name; }

NdArray new_array(Interpreter& in, Shape shape, bool cplx) {
  in.check_size(shape_size(shape));
  return NdArray::zeros(std::move(shape), cplx);
}

NdArray real_array(const NdArray& a) {
  NdArray r = NdArray::zeros(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = Complex(a[i].real(), 0.0);
  return r;
}

// ---- reductions -----------------------------------------------------------

enum class Red { sum, prod, mean, max, min, any, all, argmax, argmin, std, var };

bool less_lex(Complex a, Complex b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); }

Value reduce(const Value& v, const Value& axis_v, Red kind, double ddof = 0.0) {
  if (v.is_operator() && axis_v.is_none() && kind == Red::sum) {
    Complex s(0.0, 0.0);
    const auto& m = *v.as<OperatorPtr>();
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SparseOperator::InnerIterator it(m, k); it; ++it) s += it.value();
    }
    return Value(s);
  }
  NdArray a = to_array(v);
  std::size_t pre = 1, n = a.size(), post = 1;
  Shape out_shape;
  if (auto ax = axis_arg(axis_v, a.ndim())) {
    auto axis = static_cast<std::size_t>(*ax);
    for (std::size_t i = 0; i < axis; ++i) pre *= a.shape()[i];
    n = a.shape()[axis];
    for (std::size_t i = axis + 1; i < a.ndim(); ++i) post *= a.shape()[i];
    out_shape = a.shape();
    out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  }
  bool cplx_out = a.is_complex() && (kind == Red::sum || kind == Red::prod || kind == Red::mean ||
                                     kind == Red::max || kind == Red::min);
  if (n == 0 && (kind == Red::max || kind == Red::min || kind == Red::argmax || kind == Red::argmin)) {
    raise(ErrorKind::script, "ValueError: zero-size array to reduction operation which has no identity");
  }
  NdArray out = NdArray::zeros(out_shape, cplx_out);
  for (std::size_t o = 0; o < pre; ++o) {
    for (std::size_t i = 0; i < post; ++i) {
      auto at = [&](std::size_t j) { return a[(o * n + j) * post + i]; };
      Complex r(0.0, 0.0);
      switch (kind) {
        case Red::sum:
          for (std::size_t j = 0; j < n; ++j) r += at(j);
          break;
        case Red::prod:
          r = 1.0;
          for (std::size_t j = 0; j < n; ++j) r *= at(j);
          break;
        case Red::mean:
          for (std::size_t j = 0; j < n; ++j) r += at(j);
          r /= static_cast<double>(n);
          break;
        case Red::max:
        case Red::min: {
          r = at(0);
          for (std::size_t j = 1; j < n; ++j) {
            Complex x = at(j);
            if (std::isnan(x.real())) {
              r = x;
              break;
            }
            if (kind == Red::max ? less_lex(r, x) : less_lex(x, r)) r = x;
          }
          break;
        }
        case Red::any:
        case Red::all: {
          bool acc = kind == Red::all;
          for (std::size_t j = 0; j < n; ++j) {
            bool nz = at(j) != Complex(0.0, 0.0);
            acc = kind == Red::all ? (acc && nz) : (acc || nz);
          }
          r = acc ? 1.0 : 0.0;
          break;
        }
        case Red::argmax:
        case Red::argmin: {
          std::size_t best = 0;
          for (std::size_t j = 1; j < n; ++j) {
            if (kind == Red::argmax ? less_lex(at(best), at(j)) : less_lex(at(j), at(best))) best = j;
          }
          r = static_cast<double>(best);
          break;
        }
        case Red::std:
        case Red::var: {
          Complex mean(0.0, 0.0);
          for (std::size_t j = 0; j < n; ++j) mean += at(j);
          mean /= static_cast<double>(n);
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += std::norm(at(j) - mean);
          double var = acc / (static_cast<double>(n) - ddof);
          r = kind == Red::var ? var : std::sqrt(var);
          break;
        }
      }
      out[o * post + i] = r;
    }
  }
  if (kind == Red::argmax || kind == Red::argmin) {
    if (out.ndim() == 0) return Value(static_cast<std::int64_t>(out[0].real()));
  }
  if (kind == Red::any || kind == Red::all) {
    if (out.ndim() == 0) return Value(out[0].real() != 0.0);
  }
  return wrap_array(std::move(out));
}

Value cumulative(const Value& v, const Value& axis_v, bool product) {
  NdArray a = to_array(v);
  if (axis_v.is_none()) a = NdArray(Shape{a.size()}, std::vector<Complex>(a.data().begin(), a.data().end()), a.is_complex());
  auto axis = static_cast<std::size_t>(axis_arg(axis_v, a.ndim()).value_or(0));
  std::size_t pre = 1, post = 1, n = a.shape()[axis];
  for (std::size_t i = 0; i < axis; ++i) pre *= a.shape()[i];
  for (std::size_t i = axis + 1; i < a.ndim(); ++i) post *= a.shape()[i];
  for (std::size_t o = 0; o < pre; ++o) {
    for (std::size_t i = 0; i < post; ++i) {
      for (std::size_t j = 1; j < n; ++j) {
        auto& cur = a[(o * n + j) * post + i];
        auto prev = a[(o * n + j - 1) * post + i];
        cur = product ? cur * prev : cur + prev;
      }
    }
  }
  return Value(std::move(a));
}

// ---- shape manipulation ---------------------------------------------------

NdArray reshape(const NdArray& a, Shape shape, const std::vector<bool>& infer) {
  std::size_t known = 1;
  int infer_at = -1;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (infer[i]) {
      if (infer_at >= 0) raise(ErrorKind::shape, "ValueError: can only specify one unknown dimension");
      infer_at = static_cast<int>(i);
    } else {
      known *= shape[i];
    }
  }
  if (infer_at >= 0) {
    if (known == 0 || a.size() % known != 0) {
      raise(ErrorKind::shape, "ValueError: cannot reshape array of size " + std::to_string(a.size()));
    }
    shape[static_cast<std::size_t>(infer_at)] = a.size() / known;
  }
  if (shape_size(shape) != a.size()) {
    raise(ErrorKind::shape, "ValueError: cannot reshape array of size " + std::to_string(a.size()) + " into shape " +
                                NdArray::zeros(shape).shape_string());
  }
  return NdArray(std::move(shape), std::vector<Complex>(a.data().begin(), a.data().end()), a.is_complex());
}

NdArray reshape_value(const NdArray& a, const std::vector<Value>& dims) {
  std::vector<Value> flat;
  for (const auto& d : dims) {
    if (d.is_sequence()) {
      for (const auto& x : sequence_items(d)) flat.push_back(x);
    } else {
      flat.push_back(d);
    }
  }
  Shape shape;
  std::vector<bool> infer;
  for (const auto& d : flat) {
    std::int64_t x = to_index(d);
    infer.push_back(x == -1);
    shape.push_back(x < 0 ? 0 : static_cast<std::size_t>(x));
  }
  return reshape(a, std::move(shape), infer);
}

NdArray transpose_array(const NdArray& a, std::vector<std::size_t> perm) {
  std::size_t nd = a.ndim();
  if (perm.empty()) {
    perm.resize(nd);
    for (std::size_t i = 0; i < nd; ++i) perm[i] = nd - 1 - i;
  }
  if (perm.size() != nd) raise(ErrorKind::shape, "ValueError: axes don't match array");
  Shape out_shape(nd);
  auto st = strides(a.shape());
  std::vector<std::size_t> src_st(nd);
  for (std::size_t i = 0; i < nd; ++i) {
    out_shape[i] = a.shape()[perm[i]];
    src_st[i] = st[perm[i]];
  }
  NdArray out = NdArray::zeros(out_shape, a.is_complex());
  std::vector<std::size_t> idx(nd, 0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::size_t off = 0;
    for (std::size_t d = 0; d < nd; ++d) off += idx[d] * src_st[d];
    out[k] = a[off];
    for (std::size_t d = nd; d-- > 0;) {
      if (++idx[d] < out_shape[d]) break;
      idx[d] = 0;
    }
  }
  return out;
}

NdArray concatenate(const std::vector<NdArray>& parts, int axis_in) {
  if (parts.empty()) raise(ErrorKind::script, "ValueError: need at least one array to concatenate");
  std::size_t nd = parts[0].ndim();
  if (nd == 0) raise(ErrorKind::shape, "ValueError: zero-dimensional arrays cannot be concatenated");
  int ax = axis_in < 0 ? axis_in + static_cast<int>(nd) : axis_in;
  if (ax < 0 || static_cast<std::size_t>(ax) >= nd) raise(ErrorKind::shape, "AxisError: axis out of bounds");
  auto axis = static_cast<std::size_t>(ax);
  Shape out_shape = parts[0].shape();
  out_shape[axis] = 0;
  bool cplx = false;
  for (const auto& p : parts) {
    if (p.ndim() != nd) raise(ErrorKind::shape, "ValueError: all the input arrays must have same number of dimensions");
    for (std::size_t d = 0; d < nd; ++d) {
      if (d != axis && p.shape()[d] != parts[0].shape()[d]) {
        raise(ErrorKind::shape, "ValueError: all the input array dimensions except for the concatenation axis must match exactly");
      }
    }
    out_shape[axis] += p.shape()[axis];
    cplx = cplx || p.is_complex();
  }
  std::size_t pre = 1;
  for (std::size_t d = 0; d < axis; ++d) pre *= out_shape[d];
  std::vector<Complex> data;
  data.reserve(shape_size(out_shape));
  for (std::size_t o = 0; o < pre; ++o) {
    for (const auto& p : parts) {
      std::size_t block = p.size() / std::max<std::size_t>(pre, 1);
      auto begin = p.data().begin() + static_cast<std::ptrdiff_t>(o * block);
      data.insert(data.end(), begin, begin + static_cast<std::ptrdiff_t>(block));
    }
  }
  return NdArray(std::move(out_shape), std::move(data), cplx);
}

NdArray expand_dims(const NdArray& a, int axis) {
  Shape s = a.shape();
  int nd = static_cast<int>(s.size()) + 1;
  if (axis < 0) axis += nd;
  if (axis < 0 || axis >= nd) raise(ErrorKind::shape, "AxisError: axis out of bounds");
  s.insert(s.begin() + axis, 1);
  return NdArray(std::move(s), std::vector<Complex>(a.data().begin(), a.data().end()), a.is_complex());
}

std::vector<NdArray> array_list(const Value& v) {
  std::vector<NdArray> out;
  if (v.is_array()) {
    for (const auto& row : iterate(v)) out.push_back(to_array(row));
    return out;
  }
  for (const auto& item : iterate(v)) out.push_back(to_array(item));
  return out;
}

NdArray roll(const NdArray& a, std::int64_t shift, const Value& axis_v) {
  if (axis_v.is_none()) {
    NdArray out = a;
    auto n = static_cast<std::int64_t>(a.size());
    if (n == 0) return out;
    for (std::int64_t j = 0; j < n; ++j) out[static_cast<std::size_t>(((j + shift) % n + n) % n)] = a[static_cast<std::size_t>(j)];
    return out;
  }
  auto axis = static_cast<std::size_t>(*axis_arg(axis_v, a.ndim()));
  std::size_t pre = 1, post = 1;
  auto n = static_cast<std::int64_t>(a.shape()[axis]);
  for (std::size_t i = 0; i < axis; ++i) pre *= a.shape()[i];
  for (std::size_t i = axis + 1; i < a.ndim(); ++i) post *= a.shape()[i];
  NdArray out = a;
  for (std::size_t o = 0; o < pre; ++o) {
    for (std::int64_t j = 0; j < n; ++j) {
      auto dst = static_cast<std::size_t>(((j + shift) % n + n) % n);
      for (std::size_t i = 0; i < post; ++i) {
        out[(o * static_cast<std::size_t>(n) + dst) * post + i] = a[(o * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)) * post + i];
      }
    }
  }
  return out;
}

NdArray diff(const NdArray& a, std::int64_t times, const Value& axis_v) {
  NdArray cur = a;
  for (std::int64_t t = 0; t < times; ++t) {
    auto axis = static_cast<std::size_t>(axis_arg(axis_v.is_none() ? Value(-1) : axis_v, cur.ndim()).value());
    std::size_t pre = 1, post = 1, n = cur.shape()[axis];
    if (n == 0) return cur;
    for (std::size_t i = 0; i < axis; ++i) pre *= cur.shape()[i];
    for (std::size_t i = axis + 1; i < cur.ndim(); ++i) post *= cur.shape()[i];
    Shape s = cur.shape();
    s[axis] = n - 1;
    NdArray out = NdArray::zeros(s, cur.is_complex());
    for (std::size_t o = 0; o < pre; ++o) {
      for (std::size_t j = 0; j + 1 < n; ++j) {
        for (std::size_t i = 0; i < post; ++i) {
          out[(o * (n - 1) + j) * post + i] = cur[(o * n + j + 1) * post + i] - cur[(o * n + j) * post + i];
        }
      }
    }
    cur = std::move(out);
  }
  return cur;
}

SparseOperator sparse_kron(const SparseOperator& a, const SparseOperator& b) {
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ka = 0; ka < a.outerSize(); ++ka) {
    for (SparseOperator::InnerIterator ia(a, ka); ia; ++ia) {
      for (int kb = 0; kb < b.outerSize(); ++kb) {
        for (SparseOperator::InnerIterator ib(b, kb); ib; ++ib) {
          trips.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                             static_cast<int>(ia.col() * b.cols() + ib.col()), ia.value() * ib.value());
        }
      }
    }
  }
  SparseOperator out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

NdArray dense_kron(NdArray a, NdArray b) {
  auto as2d = [](NdArray& x) {
    if (x.ndim() == 0) x = reshape(x, {1, 1}, {false, false});
    if (x.ndim() == 1) x = reshape(x, {1, x.size()}, {false, false});
  };
  bool vec = a.ndim() <= 1 && b.ndim() <= 1;
  as2d(a);
  as2d(b);
  if (a.ndim() != 2 || b.ndim() != 2) type_error("kron: only 1-D and 2-D operands are supported");
  std::size_t ar = a.shape()[0], ac = a.shape()[1], br = b.shape()[0], bc = b.shape()[1];
  NdArray out = NdArray::zeros({ar * br, ac * bc}, a.is_complex() || b.is_complex());
  for (std::size_t i = 0; i < ar; ++i)
    for (std::size_t j = 0; j < ac; ++j)
      for (std::size_t k = 0; k < br; ++k)
        for (std::size_t l = 0; l < bc; ++l) out[(i * br + k) * (ac * bc) + j * bc + l] = a[i * ac + j] * b[k * bc + l];
  if (vec) out = reshape(out, {out.size()}, {false});
  return out;
}

SparseOperator sparse_identity(std::size_t n) {
  SparseOperator m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setIdentity();
  return m;
}

Value conj_value(const Value& v) {
  if (v.is_operator()) return Value(SparseOperator(v.as<OperatorPtr>()->conjugate()));
  return map_elementwise(v, [](double x) { return x; }, [](Complex z) { return std::conj(z); });
}

Value transpose_value(const Value& v, std::vector<std::size_t> perm = {}) {
  if (v.is_operator()) return Value(SparseOperator(v.as<OperatorPtr>()->transpose()));
  NdArray a = to_array(v);
  if (a.ndim() < 2 && perm.empty()) return wrap_array(std::move(a));
  return Value(transpose_array(a, std::move(perm)));
}

Value real_part(const Value& v) {
  if (v.is_operator()) {
    SparseOperator m = *v.as<OperatorPtr>();
    for (int k = 0; k < m.outerSize(); ++k)
      for (SparseOperator::InnerIterator it(m, k); it; ++it) it.valueRef() = it.value().real();
    return Value(std::move(m));
  }
  if (v.is_number() && !v.is<Complex>()) return Value(to_double(v));
  if (v.is<Complex>()) return Value(v.as<Complex>().real());
  return wrap_array(real_array(to_array(v)));
}

Value imag_part(const Value& v) {
  if (v.is_operator()) {
    SparseOperator m = *v.as<OperatorPtr>();
    for (int k = 0; k < m.outerSize(); ++k)
      for (SparseOperator::InnerIterator it(m, k); it; ++it) it.valueRef() = it.value().imag();
    return Value(std::move(m));
  }
  if (v.is_number() && !v.is<Complex>()) return Value(0.0);
  if (v.is<Complex>()) return Value(v.as<Complex>().imag());
  NdArray a = to_array(v);
  NdArray r = NdArray::zeros(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = Complex(a[i].imag(), 0.0);
  return wrap_array(std::move(r));
}

Value abs_value(const Value& v) {
  if (v.is<std::int64_t>() || v.is<bool>()) return Value(static_cast<std::int64_t>(std::llabs(to_index(v))));
  if (v.is<double>()) return Value(std::abs(v.as<double>()));
  if (v.is<Complex>()) return Value(std::abs(v.as<Complex>()));
  NdArray a = to_array(v);
  NdArray r = NdArray::zeros(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = Complex(std::abs(a[i]), 0.0);
  return wrap_array(std::move(r));
}

Value dot(const Value& a, const Value& b) {
  if (a.is_operator() || b.is_operator()) return binary(BinaryOp::matmul, a, b);
  NdArray x = to_array(a), y = to_array(b);
  if (x.ndim() == 0 || y.ndim() == 0) return binary(BinaryOp::mul, a, b);
  if (x.ndim() == 1 && y.ndim() == 1) {
    if (x.size() != y.size()) raise(ErrorKind::shape, "ValueError: shapes not aligned for dot");
    Complex s(0.0, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return (x.is_complex() || y.is_complex()) ? Value(s) : Value(s.real());
  }
  return wrap_array(matmul(x, y));
}

NdArray where3(const NdArray& c, const NdArray& x, const NdArray& y) {
  Shape s = broadcast_shapes(broadcast_shapes(c.shape(), x.shape()), y.shape());
  NdArray cc = broadcast_to(c, s), xx = broadcast_to(x, s), yy = broadcast_to(y, s);
  NdArray out = NdArray::zeros(s, x.is_complex() || y.is_complex());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = cc[i] != Complex(0.0, 0.0) ? xx[i] : yy[i];
  return out;
}

double round_half_even(double x, std::int64_t decimals) {
  if (decimals == 0) return std::nearbyint(x);
  double scale = std::pow(10.0, static_cast<double>(decimals));
  return std::nearbyint(x * scale) / scale;
}

template <class R, class C>
void unary(Members& m, const std::string& prefix, const std::string& name, R r, C c) {
  def(m, prefix, name, [r, c](Interpreter&, Args& a) { return map_elementwise(a.required(0, "x"), r, c); });
}

void binary_fn(Members& m, const std::string& prefix, const std::string& name, BinaryOp op) {
  def(m, prefix, name, [op](Interpreter&, Args& a) { return binary(op, a.required(0, "x1"), a.required(1, "x2")); });
}

template <class F>
void binary_elementwise(Members& m, const std::string& prefix, const std::string& name, F f) {
  def(m, prefix, name, [f](Interpreter&, Args& a) {
    const Value& va = a.required(0, "x1");
    const Value& vb = a.required(1, "x2");
    NdArray x = to_array(va), y = to_array(vb);
    Shape s = broadcast_shapes(x.shape(), y.shape());
    NdArray xx = broadcast_to(x, s), yy = broadcast_to(y, s);
    NdArray out = NdArray::zeros(s);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(f(xx[i].real(), yy[i].real()), 0.0);
    return wrap_array(std::move(out));
  });
}

NdArray linspace(double start, double stop, std::size_t num, bool endpoint) {
  NdArray out = NdArray::zeros({num});
  if (num == 0) return out;
  double div = endpoint ? static_cast<double>(num - 1) : static_cast<double>(num);
  double step = div > 0 ? (stop - start) / div : 0.0;
  for (std::size_t i = 0; i < num; ++i) out[i] = Complex(static_cast<double>(i) * step + start, 0.0);
  if (endpoint && num > 1) out[num - 1] = Complex(stop, 0.0);
  return out;
}

Value make_dtype_caster(const std::string& prefix, const std::string& name, DType d) {
  return Value::builtin(prefix + "." + name, [d](Interpreter&, std::vector<Value>& pos, Kwargs&) -> Value {
    if (pos.empty()) return Value(0.0);
    const Value& v = pos[0];
    if (v.is_number()) {
      if (d.complex) return Value(to_complex(v));
      if (d.boolean) return Value(truthy(v));
      if (d.integer) return Value(static_cast<std::int64_t>(std::trunc(to_double(v))));
      return Value(to_double(v));
    }
    return wrap_array(apply_dtype(to_array(v), d));
  });
}

}  // namespace

std::optional<DType> parse_dtype(const Value& v) {
  std::string name;
  if (v.is_none()) return std::nullopt;
  if (v.is<std::string>()) {
    name = v.as<std::string>();
  } else if (v.is<std::shared_ptr<BuiltinObj>>()) {
    name = builtin_name(v);
    auto dot = name.rfind('.');
    if (dot != std::string::npos) name = name.substr(dot + 1);
  } else {
    type_error("data type not understood: " + repr(v));
  }
  DType d;
  if (name.rfind("complex", 0) == 0) {
    d.complex = true;
  } else if (name.rfind("int", 0) == 0 || name.rfind("uint", 0) == 0) {
    d.integer = true;
  } else if (name.rfind("bool", 0) == 0) {
    d.boolean = true;
  } else if (name.rfind("float", 0) != 0 && name != "double") {
    type_error("data type '" + name + "' not understood");
  }
  return d;
}

NdArray apply_dtype(NdArray a, const DType& d) {
  if (d.complex) {
    a.set_complex(true);
    return a;
  }
  for (auto& z : a.data()) {
    double x = z.real();
    if (d.integer) x = std::trunc(x);
    if (d.boolean) x = z != Complex(0.0, 0.0) ? 1.0 : 0.0;
    z = Complex(x, 0.0);
  }
  a.set_complex(false);
  return a;
}

std::optional<int> axis_arg(const Value& v, std::size_t ndim) {
  if (v.is_none()) return std::nullopt;
  auto ax = to_index(v);
  auto nd = static_cast<std::int64_t>(ndim);
  if (ax < -nd || ax >= nd) {
    raise(ErrorKind::shape, "AxisError: axis " + std::to_string(ax) + " is out of bounds for array of dimension " +
                                std::to_string(ndim));
  }
  return static_cast<int>(ax < 0 ? ax + nd : ax);
}

Shape shape_arg(const Value& v) {
  Shape s;
  if (v.is_sequence() || v.is_array()) {
    for (const auto& d : iterate(v)) {
      auto x = to_index(d);
      if (x < 0) raise(ErrorKind::shape, "ValueError: negative dimensions are not allowed");
      s.push_back(static_cast<std::size_t>(x));
    }
    return s;
  }
  auto x = to_index(v);
  if (x < 0) raise(ErrorKind::shape, "ValueError: negative dimensions are not allowed");
  s.push_back(static_cast<std::size_t>(x));
  return s;
}

void add_numpy_members(Members& m, const std::string& p) {
  m["pi"] = Value(kPi);
  m["e"] = Value(std::exp(1.0));
  m["inf"] = Value(std::numeric_limits<double>::infinity());
  m["nan"] = Value(std::numeric_limits<double>::quiet_NaN());
  m["newaxis"] = Value();
  for (const char* n : {"complex64", "complex128", "complex_", "cdouble", "csingle"}) {
    m[n] = make_dtype_caster(p, n, DType{true, false, false});
  }
  for (const char* n : {"float32", "float64", "float_", "double", "single"}) {
    m[n] = make_dtype_caster(p, n, DType{false, false, false});
  }
  for (const char* n : {"int32", "int64", "int_", "int8", "int16", "uint8"}) {
    m[n] = make_dtype_caster(p, n, DType{false, true, false});
  }
  m["bool_"] = make_dtype_caster(p, "bool_", DType{false, false, true});

  // creation
  auto array_fn = [](Interpreter& in, Args& a) {
    const Value& v = a.required(0, "object");
    NdArray arr = to_array(v);
    in.check_size(arr.size());
    if (auto d = parse_dtype(a.optional(1, "dtype"))) arr = apply_dtype(std::move(arr), *d);
    return Value(std::move(arr));
  };
  def(m, p, "array", array_fn);
  def(m, p, "asarray", array_fn);
  auto filled = [](double fill) {
    return [fill](Interpreter& in, Args& a) {
      auto d = parse_dtype(a.optional(1, "dtype"));
      NdArray arr = new_array(in, shape_arg(a.required(0, "shape")), d && d->complex);
      for (auto& z : arr.data()) z = fill;
      return Value(std::move(arr));
    };
  };
  def(m, p, "zeros", filled(0.0));
  def(m, p, "empty", filled(0.0));
  def(m, p, "ones", filled(1.0));
  auto like = [](double fill) {
    return [fill](Interpreter& in, Args& a) {
      NdArray src = to_array(a.required(0, "a"));
      auto d = parse_dtype(a.optional(1, "dtype"));
      NdArray arr = new_array(in, src.shape(), d ? d->complex : src.is_complex());
      for (auto& z : arr.data()) z = fill;
      return Value(std::move(arr));
    };
  };
  def(m, p, "zeros_like", like(0.0));
  def(m, p, "empty_like", like(0.0));
  def(m, p, "ones_like", like(1.0));
  def(m, p, "full", [](Interpreter& in, Args& a) {
    Complex fill = to_complex(a.required(1, "fill_value"));
    auto d = parse_dtype(a.optional(2, "dtype"));
    bool cplx = d ? d->complex : fill.imag() != 0.0 || a.required(1, "fill_value").is<Complex>();
    NdArray arr = new_array(in, shape_arg(a.required(0, "shape")), cplx);
    for (auto& z : arr.data()) z = fill;
    return Value(std::move(arr));
  });
  def(m, p, "full_like", [](Interpreter& in, Args& a) {
    NdArray src = to_array(a.required(0, "a"));
    Complex fill = to_complex(a.required(1, "fill_value"));
    NdArray arr = new_array(in, src.shape(), src.is_complex() || fill.imag() != 0.0);
    for (auto& z : arr.data()) z = fill;
    return Value(std::move(arr));
  });
  auto eye = [](Interpreter& in, Args& a) -> Value {
    auto n = static_cast<std::size_t>(to_index(a.required(0, "N")));
    std::size_t cols = a.present(1, "M") ? static_cast<std::size_t>(to_index(a.optional(1, "M"))) : n;
    std::int64_t k = a.present(2, "k") ? to_index(a.optional(2, "k")) : 0;
    in.check_size(n);
    if (cols == n && k == 0) return Value(sparse_identity(n));
    NdArray arr = new_array(in, {n, cols}, false);
    for (std::size_t i = 0; i < n; ++i) {
      std::int64_t j = static_cast<std::int64_t>(i) + k;
      if (j >= 0 && static_cast<std::size_t>(j) < cols) arr[i * cols + static_cast<std::size_t>(j)] = 1.0;
    }
    return Value(std::move(arr));
  };
  def(m, p, "eye", eye);
  def(m, p, "identity", eye);
  def(m, p, "arange", [](Interpreter& in, Args& a) {
    double start = 0.0, stop, step = 1.0;
    if (a.present(1, "stop")) {
      start = to_double(a.required(0, "start"));
      stop = to_double(a.required(1, "stop"));
      if (a.present(2, "step")) step = to_double(a.required(2, "step"));
    } else {
      stop = to_double(a.required(0, "stop"));
    }
    if (step == 0.0) raise(ErrorKind::script, "ValueError: arange step cannot be zero");
    double count = std::ceil((stop - start) / step);
    auto n = static_cast<std::size_t>(std::max(count, 0.0));
    NdArray arr = new_array(in, {n}, false);
    for (std::size_t i = 0; i < n; ++i) arr[i] = start + static_cast<double>(i) * step;
    return Value(std::move(arr));
  });
  def(m, p, "linspace", [](Interpreter& in, Args& a) {
    std::size_t num = a.present(2, "num") ? static_cast<std::size_t>(to_index(a.required(2, "num"))) : 50;
    bool endpoint = truthy(a.optional(3, "endpoint", Value(true)));
    in.check_size(num);
    return Value(linspace(to_double(a.required(0, "start")), to_double(a.required(1, "stop")), num, endpoint));
  });
  def(m, p, "diag", [](Interpreter&, Args& a) {
    NdArray v = to_array(a.required(0, "v"));
    if (v.ndim() == 1) {
      std::size_t n = v.size();
      NdArray out = NdArray::zeros({n, n}, v.is_complex());
      for (std::size_t i = 0; i < n; ++i) out[i * n + i] = v[i];
      return Value(std::move(out));
    }
    if (v.ndim() != 2) raise(ErrorKind::shape, "ValueError: diag requires a 1-D or 2-D input");
    std::size_t n = std::min(v.shape()[0], v.shape()[1]);
    NdArray out = NdArray::zeros({n}, v.is_complex());
    for (std::size_t i = 0; i < n; ++i) out[i] = v[i * v.shape()[1] + i];
    return Value(std::move(out));
  });

  // elementwise math
  unary(m, p, "exp", [](double x) { return std::exp(x); }, [](Complex z) { return std::exp(z); });
  unary(m, p, "exp2", [](double x) { return std::exp2(x); }, [](Complex z) { return std::pow(Complex(2.0, 0.0), z); });
  unary(m, p, "expm1", [](double x) { return std::expm1(x); }, [](Complex z) { return std::exp(z) - 1.0; });
  unary(m, p, "log", [](double x) { return std::log(x); }, [](Complex z) { return std::log(z); });
  unary(m, p, "log10", [](double x) { return std::log10(x); }, [](Complex z) { return std::log10(z); });
  unary(m, p, "log2", [](double x) { return std::log2(x); }, [](Complex z) { return std::log(z) / std::log(2.0); });
  unary(m, p, "log1p", [](double x) { return std::log1p(x); }, [](Complex z) { return std::log(1.0 + z); });
  unary(m, p, "sqrt", [](double x) { return std::sqrt(x); }, [](Complex z) { return std::sqrt(z); });
  unary(m, p, "cbrt", [](double x) { return std::cbrt(x); }, [](Complex z) { return std::pow(z, 1.0 / 3.0); });
  unary(m, p, "sin", [](double x) { return std::sin(x); }, [](Complex z) { return std::sin(z); });
  unary(m, p, "cos", [](double x) { return std::cos(x); }, [](Complex z) { return std::cos(z); });
  unary(m, p, "tan", [](double x) { return std::tan(x); }, [](Complex z) { return std::tan(z); });
  unary(m, p, "arcsin", [](double x) { return std::asin(x); }, [](Complex z) { return std::asin(z); });
  unary(m, p, "arccos", [](double x) { return std::acos(x); }, [](Complex z) { return std::acos(z); });
  unary(m, p, "arctan", [](double x) { return std::atan(x); }, [](Complex z) { return std::atan(z); });
  unary(m, p, "sinh", [](double x) { return std::sinh(x); }, [](Complex z) { return std::sinh(z); });
  unary(m, p, "cosh", [](double x) { return std::cosh(x); }, [](Complex z) { return std::cosh(z); });
  unary(m, p, "tanh", [](double x) { return std::tanh(x); }, [](Complex z) { return std::tanh(z); });
  unary(m, p, "arcsinh", [](double x) { return std::asinh(x); }, [](Complex z) { return std::asinh(z); });
  unary(m, p, "arccosh", [](double x) { return std::acosh(x); }, [](Complex z) { return std::acosh(z); });
  unary(m, p, "arctanh", [](double x) { return std::atanh(x); }, [](Complex z) { return std::atanh(z); });
  m["asin"] = m["arcsin"];
  m["acos"] = m["arccos"];
  m["atan"] = m["arctan"];
  unary(m, p, "square", [](double x) { return x * x; }, [](Complex z) { return z * z; });
  unary(m, p, "negative", [](double x) { return -x; }, [](Complex z) { return -z; });
  unary(m, p, "floor", [](double x) { return std::floor(x); }, [](Complex) -> Complex { type_error("floor of complex"); });
  unary(m, p, "ceil", [](double x) { return std::ceil(x); }, [](Complex) -> Complex { type_error("ceil of complex"); });
  unary(m, p, "sign", [](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : (x == 0 ? 0.0 : x)); },
        [](Complex z) { return z == Complex(0.0, 0.0) ? z : z / std::abs(z); });
  unary(m, p, "sinc", [](double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); },
        [](Complex z) { return z == Complex(0.0, 0.0) ? Complex(1.0, 0.0) : std::sin(kPi * z) / (kPi * z); });
  def(m, p, "isfinite", [](Interpreter&, Args& a) {
    return compare(CompareOp::eq, map_elementwise(a.required(0, "x"), [](double x) { return std::isfinite(x) ? 1.0 : 0.0; },
                                                 [](Complex z) { return Complex(std::isfinite(z.real()) && std::isfinite(z.imag()) ? 1.0 : 0.0, 0.0); }),
                   Value(1.0));
  });
  def(m, p, "isnan", [](Interpreter&, Args& a) {
    return compare(CompareOp::eq, map_elementwise(a.required(0, "x"), [](double x) { return std::isnan(x) ? 1.0 : 0.0; },
                                                 [](Complex z) { return Complex(std::isnan(z.real()) || std::isnan(z.imag()) ? 1.0 : 0.0, 0.0); }),
                   Value(1.0));
  });
  def(m, p, "abs", [](Interpreter&, Args& a) { return abs_value(a.required(0, "x")); });
  m["absolute"] = m["abs"];
  def(m, p, "conj", [](Interpreter&, Args& a) { return conj_value(a.required(0, "x")); });
  m["conjugate"] = m["conj"];
  def(m, p, "real", [](Interpreter&, Args& a) { return real_part(a.required(0, "val")); });
  def(m, p, "imag", [](Interpreter&, Args& a) { return imag_part(a.required(0, "val")); });
  def(m, p, "angle", [](Interpreter&, Args& a) {
    const Value& v = a.required(0, "z");
    NdArray x = to_array(v);
    NdArray out = NdArray::zeros(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::arg(x[i]);
    return wrap_array(std::move(out));
  });
  def(m, p, "round", [](Interpreter&, Args& a) {
    std::int64_t dec = a.present(1, "decimals") ? to_index(a.required(1, "decimals")) : 0;
    return map_elementwise(
        a.required(0, "a"), [dec](double x) { return round_half_even(x, dec); },
        [dec](Complex z) { return Complex(round_half_even(z.real(), dec), round_half_even(z.imag(), dec)); });
  });
  m["around"] = m["round"];

  binary_fn(m, p, "add", BinaryOp::add);
  binary_fn(m, p, "subtract", BinaryOp::sub);
  binary_fn(m, p, "multiply", BinaryOp::mul);
  binary_fn(m, p, "divide", BinaryOp::div);
  binary_fn(m, p, "true_divide", BinaryOp::div);
  binary_fn(m, p, "power", BinaryOp::pow);
  binary_fn(m, p, "mod", BinaryOp::mod);
  binary_fn(m, p, "remainder", BinaryOp::mod);
  binary_fn(m, p, "floor_divide", BinaryOp::floordiv);
  binary_fn(m, p, "matmul", BinaryOp::matmul);
  binary_elementwise(m, p, "arctan2", [](double y, double x) { return std::atan2(y, x); });
  m["atan2"] = m["arctan2"];
  binary_elementwise(m, p, "hypot", [](double x, double y) { return std::hypot(x, y); });
  binary_elementwise(m, p, "maximum", [](double x, double y) { return std::isnan(x) || std::isnan(y) ? std::nan("") : std::max(x, y); });
  binary_elementwise(m, p, "minimum", [](double x, double y) { return std::isnan(x) || std::isnan(y) ? std::nan("") : std::min(x, y); });
  binary_elementwise(m, p, "fmod", [](double x, double y) { return std::fmod(x, y); });
  binary_elementwise(m, p, "heaviside", [](double x, double h0) { return x < 0 ? 0.0 : (x > 0 ? 1.0 : h0); });
  binary_elementwise(m, p, "logical_and", [](double x, double y) { return (x != 0 && y != 0) ? 1.0 : 0.0; });
  binary_elementwise(m, p, "logical_or", [](double x, double y) { return (x != 0 || y != 0) ? 1.0 : 0.0; });
  def(m, p, "logical_not", [](Interpreter&, Args& a) { return unary(UnaryOp::invert, compare(CompareOp::ne, a.required(0, "x"), Value(0.0))); });
  def(m, p, "clip", [](Interpreter&, Args& a) {
    Value v = a.required(0, "a");
    if (a.present(1, "a_min")) {
      NdArray lo = to_array(a.required(1, "a_min"));
      NdArray x = to_array(v);
      Shape s = broadcast_shapes(x.shape(), lo.shape());
      NdArray xx = broadcast_to(x, s), ll = broadcast_to(lo, s);
      for (std::size_t i = 0; i < xx.size(); ++i) xx[i] = Complex(std::max(xx[i].real(), ll[i].real()), 0.0);
      v = wrap_array(std::move(xx));
    }
    if (a.present(2, "a_max")) {
      NdArray hi = to_array(a.required(2, "a_max"));
      NdArray x = to_array(v);
      Shape s = broadcast_shapes(x.shape(), hi.shape());
      NdArray xx = broadcast_to(x, s), hh = broadcast_to(hi, s);
      for (std::size_t i = 0; i < xx.size(); ++i) xx[i] = Complex(std::min(xx[i].real(), hh[i].real()), 0.0);
      v = wrap_array(std::move(xx));
    }
    return v;
  });
  def(m, p, "where", [](Interpreter&, Args& a) -> Value {
    const Value& c = a.required(0, "condition");
    if (!a.present(1, "x")) {
      NdArray cond = to_array(c);
      if (cond.ndim() != 1) type_error("where(condition) supports only 1-D conditions");
      NdArray idx = NdArray::zeros({0});
      std::vector<Complex> data;
      for (std::size_t i = 0; i < cond.size(); ++i) {
        if (cond[i] != Complex(0.0, 0.0)) data.emplace_back(static_cast<double>(i), 0.0);
      }
      Shape s{data.size()};
      return Value::tuple({Value(NdArray(s, std::move(data), false))});
    }
    return wrap_array(where3(to_array(c), to_array(a.required(1, "x")), to_array(a.required(2, "y"))));
  });
  def(m, p, "isclose", [](Interpreter&, Args& a) {
    NdArray x = to_array(a.required(0, "a")), y = to_array(a.required(1, "b"));
    double rtol = a.present(2, "rtol") ? to_double(a.required(2, "rtol")) : 1e-5;
    double atol = a.present(3, "atol") ? to_double(a.required(3, "atol")) : 1e-8;
    Shape s = broadcast_shapes(x.shape(), y.shape());
    NdArray xx = broadcast_to(x, s), yy = broadcast_to(y, s);
    NdArray out = NdArray::zeros(s);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(xx[i] - yy[i]) <= atol + rtol * std::abs(yy[i]) ? 1.0 : 0.0;
    return wrap_array(std::move(out));
  });
  def(m, p, "allclose", [](Interpreter&, Args& a) {
    NdArray x = to_array(a.required(0, "a")), y = to_array(a.required(1, "b"));
    double rtol = a.present(2, "rtol") ? to_double(a.required(2, "rtol")) : 1e-5;
    double atol = a.present(3, "atol") ? to_double(a.required(3, "atol")) : 1e-8;
    Shape s = broadcast_shapes(x.shape(), y.shape());
    NdArray xx = broadcast_to(x, s), yy = broadcast_to(y, s);
    for (std::size_t i = 0; i < xx.size(); ++i) {
      if (!(std::abs(xx[i] - yy[i]) <= atol + rtol * std::abs(yy[i]))) return Value(false);
    }
    return Value(true);
  });

  // reductions
  auto reduction = [&](const std::string& name, Red kind) {
    def(m, p, name, [kind](Interpreter&, Args& a) {
      double ddof = a.present(3, "ddof") ? to_double(a.required(3, "ddof")) : 0.0;
      return reduce(a.required(0, "a"), a.optional(1, "axis"), kind, ddof);
    });
  };
  reduction("sum", Red::sum);
  reduction("prod", Red::prod);
  reduction("mean", Red::mean);
  reduction("max", Red::max);
  reduction("amax", Red::max);
  reduction("min", Red::min);
  reduction("amin", Red::min);
  reduction("any", Red::any);
  reduction("all", Red::all);
  reduction("argmax", Red::argmax);
  reduction("argmin", Red::argmin);
  reduction("std", Red::std);
  reduction("var", Red::var);
  def(m, p, "cumsum", [](Interpreter&, Args& a) { return cumulative(a.required(0, "a"), a.optional(1, "axis"), false); });
  def(m, p, "cumprod", [](Interpreter&, Args& a) { return cumulative(a.required(0, "a"), a.optional(1, "axis"), true); });

  // shapes and linear algebra
  def(m, p, "shape", [](Interpreter&, Args& a) {
    const Value& v = a.required(0, "a");
    if (v.is_operator()) return shape_tuple({static_cast<std::size_t>(v.as<OperatorPtr>()->rows()), static_cast<std::size_t>(v.as<OperatorPtr>()->cols())});
    return shape_tuple(to_array(v).shape());
  });
  def(m, p, "size", [](Interpreter&, Args& a) { return Value(static_cast<std::int64_t>(to_array(a.required(0, "a")).size())); });
  def(m, p, "ndim", [](Interpreter&, Args& a) { return Value(static_cast<std::int64_t>(to_array(a.required(0, "a")).ndim())); });
  def(m, p, "reshape", [](Interpreter&, Args& a) {
    return Value(reshape_value(to_array(a.required(0, "a")), {a.required(1, "newshape")}));
  });
  def(m, p, "ravel", [](Interpreter&, Args& a) {
    NdArray x = to_array(a.required(0, "a"));
    return Value(reshape(x, {x.size()}, {false}));
  });
  def(m, p, "transpose", [](Interpreter&, Args& a) {
    std::vector<std::size_t> perm;
    if (a.present(1, "axes")) {
      for (const auto& x : iterate(a.required(1, "axes"))) perm.push_back(static_cast<std::size_t>(to_index(x)));
    }
    return transpose_value(a.required(0, "a"), std::move(perm));
  });
  def(m, p, "concatenate", [](Interpreter&, Args& a) {
    int axis = a.present(1, "axis") ? static_cast<int>(to_index(a.required(1, "axis"))) : 0;
    return Value(concatenate(array_list(a.required(0, "arrays")), axis));
  });
  def(m, p, "stack", [](Interpreter&, Args& a) {
    int axis = a.present(1, "axis") ? static_cast<int>(to_index(a.required(1, "axis"))) : 0;
    auto parts = array_list(a.required(0, "arrays"));
    if (parts.empty()) raise(ErrorKind::script, "ValueError: need at least one array to stack");
    for (std::size_t i = 1; i < parts.size(); ++i) {
      if (parts[i].shape() != parts[0].shape()) raise(ErrorKind::shape, "ValueError: all input arrays must have the same shape");
    }
    for (auto& part : parts) part = expand_dims(part, axis);
    return Value(concatenate(parts, axis));
  });
  def(m, p, "hstack", [](Interpreter&, Args& a) {
    auto parts = array_list(a.required(0, "tup"));
    for (auto& part : parts) {
      if (part.ndim() == 0) part = expand_dims(part, 0);
    }
    return Value(concatenate(parts, parts.empty() || parts[0].ndim() == 1 ? 0 : 1));
  });
  def(m, p, "vstack", [](Interpreter&, Args& a) {
    auto parts = array_list(a.required(0, "tup"));
    for (auto& part : parts) {
      while (part.ndim() < 2) part = expand_dims(part, 0);
    }
    return Value(concatenate(parts, 0));
  });
  def(m, p, "expand_dims", [](Interpreter&, Args& a) {
    return Value(expand_dims(to_array(a.required(0, "a")), static_cast<int>(to_index(a.required(1, "axis")))));
  });
  def(m, p, "squeeze", [](Interpreter&, Args& a) {
    NdArray x = to_array(a.required(0, "a"));
    Shape s;
    for (auto d : x.shape()) {
      if (d != 1) s.push_back(d);
    }
    return wrap_array(reshape(x, s, std::vector<bool>(s.size(), false)));
  });
  def(m, p, "roll", [](Interpreter&, Args& a) {
    return Value(roll(to_array(a.required(0, "a")), to_index(a.required(1, "shift")), a.optional(2, "axis")));
  });
  def(m, p, "flip", [](Interpreter&, Args& a) {
    NdArray x = to_array(a.required(0, "m"));
    std::vector<Value> idx;
    auto axis = axis_arg(a.optional(1, "axis"), x.ndim());
    for (std::size_t d = 0; d < x.ndim(); ++d) {
      SliceObj s;
      if (!axis || static_cast<std::size_t>(*axis) == d) s.step = -1;
      idx.emplace_back(s);
    }
    return get_item(Value(std::move(x)), Value::tuple(std::move(idx)));
  });
  def(m, p, "diff", [](Interpreter&, Args& a) {
    std::int64_t n = a.present(1, "n") ? to_index(a.required(1, "n")) : 1;
    return Value(diff(to_array(a.required(0, "a")), n, a.optional(2, "axis")));
  });
  def(m, p, "outer", [](Interpreter&, Args& a) {
    NdArray x = to_array(a.required(0, "a")), y = to_array(a.required(1, "b"));
    NdArray out = NdArray::zeros({x.size(), y.size()}, x.is_complex() || y.is_complex());
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j) out[i * y.size() + j] = x[i] * y[j];
    return Value(std::move(out));
  });
  def(m, p, "dot", [](Interpreter&, Args& a) { return dot(a.required(0, "a"), a.required(1, "b")); });
  def(m, p, "inner", [](Interpreter&, Args& a) { return dot(a.required(0, "a"), a.required(1, "b")); });
  def(m, p, "vdot", [](Interpreter&, Args& a) {
    NdArray x = to_array(a.required(0, "a")), y = to_array(a.required(1, "b"));
    if (x.size() != y.size()) raise(ErrorKind::shape, "ValueError: vdot: vectors have different lengths");
    Complex s(0.0, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return (x.is_complex() || y.is_complex()) ? Value(s) : Value(s.real());
  });
  def(m, p, "kron", [](Interpreter& in, Args& a) -> Value {
    const Value& x = a.required(0, "a");
    const Value& y = a.required(1, "b");
    if (x.is_operator() || y.is_operator()) {
      auto sx = x.is_operator() ? *x.as<OperatorPtr>() : dense_to_operator(to_array(x));
      auto sy = y.is_operator() ? *y.as<OperatorPtr>() : dense_to_operator(to_array(y));
      in.check_size(static_cast<std::size_t>(sx.rows() * sy.rows()));
      return Value(sparse_kron(sx, sy));
    }
    NdArray ax = to_array(x), ay = to_array(y);
    in.check_size(ax.size() * ay.size());
    return Value(dense_kron(std::move(ax), std::move(ay)));
  });
  def(m, p, "trace", [](Interpreter&, Args& a) -> Value {
    const Value& v = a.required(0, "a");
    Complex s(0.0, 0.0);
    bool cplx = true;
    if (v.is_operator()) {
      const auto& op = *v.as<OperatorPtr>();
      for (int k = 0; k < op.outerSize(); ++k)
        for (SparseOperator::InnerIterator it(op, k); it; ++it)
          if (it.row() == it.col()) s += it.value();
    } else {
      NdArray x = to_array(v);
      if (x.ndim() != 2) raise(ErrorKind::shape, "ValueError: trace requires a 2-D array");
      for (std::size_t i = 0; i < std::min(x.shape()[0], x.shape()[1]); ++i) s += x[i * x.shape()[1] + i];
      cplx = x.is_complex();
    }
    return cplx ? Value(s) : Value(s.real());
  });
  def(m, p, "sort", [](Interpreter&, Args& a) {
    NdArray x = to_array(a.required(0, "a"));
    if (x.ndim() != 1) type_error("sort supports only 1-D arrays");
    std::sort(x.data().begin(), x.data().end(), less_lex);
    return Value(std::move(x));
  });
  def(m, p, "argsort", [](Interpreter&, Args& a) {
    NdArray x = to_array(a.required(0, "a"));
    if (x.ndim() != 1) type_error("argsort supports only 1-D arrays");
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return less_lex(x[i], x[j]); });
    NdArray out = NdArray::zeros({x.size()});
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = static_cast<double>(idx[i]);
    return Value(std::move(out));
  });
  def(m, p, "meshgrid", [](Interpreter&, Args& a) {
    if (a.count() != 2) type_error("meshgrid supports exactly two inputs");
    NdArray x = to_array(a.positional()[0]), y = to_array(a.positional()[1]);
    std::size_t nx = x.size(), ny = y.size();
    NdArray gx = NdArray::zeros({ny, nx}, x.is_complex()), gy = NdArray::zeros({ny, nx}, y.is_complex());
    for (std::size_t i = 0; i < ny; ++i)
      for (std::size_t j = 0; j < nx; ++j) {
        gx[i * nx + j] = x[j];
        gy[i * nx + j] = y[i];
      }
    return Value::list({Value(std::move(gx)), Value(std::move(gy))});
  });
}

Members numpy_linalg_members(const std::string& p) {
  Members m;
  def(m, p, "norm", [](Interpreter&, Args& a) -> Value {
    const Value& v = a.required(0, "x");
    double s = 0.0;
    if (v.is_operator()) {
      const auto& op = *v.as<OperatorPtr>();
      for (int k = 0; k < op.outerSize(); ++k)
        for (SparseOperator::InnerIterator it(op, k); it; ++it) s += std::norm(it.value());
      return Value(std::sqrt(s));
    }
    NdArray x = to_array(v);
    Value ord = a.optional(1, "ord");
    if (!ord.is_none() && x.ndim() == 1) {
      double o = to_double(ord);
      if (std::isinf(o)) {
        double best = 0.0;
        for (const auto& z : x.data()) best = std::max(best, std::abs(z));
        return Value(best);
      }
      for (const auto& z : x.data()) s += std::pow(std::abs(z), o);
      return Value(std::pow(s, 1.0 / o));
    }
    for (const auto& z : x.data()) s += std::norm(z);
    return Value(std::sqrt(s));
  });
  return m;
}

Members numpy_fft_members(const std::string& p) {
  Members m;
  auto transform = [](bool inverse) {
    return [inverse](Interpreter&, Args& a) {
      NdArray x = to_array(a.required(0, "a"));
      if (x.ndim() == 0) raise(ErrorKind::shape, "ValueError: fft requires at least 1-D input");
      std::size_t n = x.shape().back();
      NdArray out = NdArray::zeros(x.shape(), true);
      for (std::size_t row = 0; row < x.size() / std::max<std::size_t>(n, 1); ++row) {
        std::span<const Complex> in(x.data().data() + row * n, n);
        std::span<Complex> dst(out.data().data() + row * n, n);
        if (inverse) {
          numerics::fft_inverse(in, dst);
        } else {
          numerics::fft_forward(in, dst);
        }
      }
      return Value(std::move(out));
    };
  };
  def(m, p, "fft", transform(false));
  def(m, p, "ifft", transform(true));
  def(m, p, "fftfreq", [](Interpreter&, Args& a) {
    auto n = static_cast<std::size_t>(to_index(a.required(0, "n")));
    double d = a.present(1, "d") ? to_double(a.required(1, "d")) : 1.0;
    NdArray out = NdArray::zeros({n});
    auto ni = static_cast<std::int64_t>(n);
    for (std::int64_t i = 0; i < ni; ++i) {
      std::int64_t f = i <= (ni - 1) / 2 ? i : i - ni;
      out[static_cast<std::size_t>(i)] = static_cast<double>(f) / (d * static_cast<double>(n));
    }
    return Value(std::move(out));
  });
  def(m, p, "fftshift", [](Interpreter&, Args& a) {
    NdArray x = to_array(a.required(0, "x"));
    return Value(roll(x, static_cast<std::int64_t>(x.size() / 2), Value()));
  });
  def(m, p, "ifftshift", [](Interpreter&, Args& a) {
    NdArray x = to_array(a.required(0, "x"));
    return Value(roll(x, -static_cast<std::int64_t>(x.size() / 2), Value()));
  });
  return m;
}

Members math_members(const std::string& p, bool complex_math) {
  Members all;
  add_numpy_members(all, p);
  Members m;
  for (const char* n : {"pi", "e", "inf", "nan", "exp", "log", "log10", "log2", "log1p", "expm1", "sqrt", "sin", "cos",
                        "tan", "asin", "acos", "atan", "atan2", "sinh", "cosh", "tanh", "floor", "ceil", "hypot"}) {
    if (all.count(n)) m[n] = all[n];
  }
  m["asinh"] = all["arcsinh"];
  m["acosh"] = all["arccosh"];
  m["atanh"] = all["arctanh"];
  m["fabs"] = all["abs"];
  m["tau"] = Value(2.0 * kPi);
  def(m, p, "isclose", [](Interpreter&, Args& a) {
    Complex x = to_complex(a.required(0, "a")), y = to_complex(a.required(1, "b"));
    double rtol = a.present(2, "rel_tol") ? to_double(a.required(2, "rel_tol")) : 1e-9;
    double atol = a.present(3, "abs_tol") ? to_double(a.required(3, "abs_tol")) : 0.0;
    return Value(std::abs(x - y) <= std::max(rtol * std::max(std::abs(x), std::abs(y)), atol));
  });
  def(m, p, "pow", [](Interpreter&, Args& a) {
    return Value(std::pow(to_double(a.required(0, "x")), to_double(a.required(1, "y"))));
  });
  def(m, p, "isfinite", [](Interpreter&, Args& a) { return Value(std::isfinite(to_double(a.required(0, "x")))); });
  def(m, p, "isnan", [](Interpreter&, Args& a) { return Value(std::isnan(to_double(a.required(0, "x")))); });
  if (complex_math) {
    auto wrap = [&](const char* name, Complex (*f)(const Complex&)) {
      def(m, p, name, [f](Interpreter&, Args& a) { return Value(f(to_complex(a.required(0, "z")))); });
    };
    wrap("exp", [](const Complex& z) { return std::exp(z); });
    wrap("sqrt", [](const Complex& z) { return std::sqrt(z); });
    wrap("log", [](const Complex& z) { return std::log(z); });
    wrap("sin", [](const Complex& z) { return std::sin(z); });
    wrap("cos", [](const Complex& z) { return std::cos(z); });
    def(m, p, "phase", [](Interpreter&, Args& a) { return Value(std::arg(to_complex(a.required(0, "z")))); });
  }
  return m;
}

std::optional<Value> array_attribute(Interpreter& interp, const Value& self, const std::string& name) {
  (void)interp;
  auto bind = [&](auto fn) -> Value {
    std::string n = name;
    return Value::builtin(n, [self, fn, n](Interpreter& in, std::vector<Value>& pos, Kwargs& kw) -> Value {
      Args a(n, pos, kw);
      return fn(in, self, a);
    });
  };

  if (self.is_operator()) {
    const auto& op = *self.as<OperatorPtr>();
    if (name == "shape") return shape_tuple({static_cast<std::size_t>(op.rows()), static_cast<std::size_t>(op.cols())});
    if (name == "ndim") return Value(2);
    if (name == "nse") return Value(static_cast<std::int64_t>(op.nonZeros()));
    if (name == "dtype") return Value("complex64");
    if (name == "T") return transpose_value(self);
    if (name == "real") return real_part(self);
    if (name == "imag") return imag_part(self);
    if (name == "todense" || name == "toarray")
      return bind([](Interpreter&, const Value& s, Args&) { return Value(operator_to_dense(*s.as<OperatorPtr>())); });
    if (name == "conj" || name == "conjugate") return bind([](Interpreter&, const Value& s, Args&) { return conj_value(s); });
    if (name == "transpose") return bind([](Interpreter&, const Value& s, Args&) { return transpose_value(s); });
    if (name == "astype" || name == "sum_duplicates" || name == "block_until_ready")
      return bind([](Interpreter&, const Value& s, Args&) { return s; });
    if (name == "dot") return bind([](Interpreter&, const Value& s, Args& a) { return binary(BinaryOp::matmul, s, a.required(0, "other")); });
    if (name == "sum")
      return bind([](Interpreter&, const Value& s, Args& a) { return reduce(s, a.optional(0, "axis"), Red::sum); });
    return std::nullopt;
  }

  bool scalar = self.is_number();
  if (!scalar && !self.is_array()) return std::nullopt;
  if (name == "real") return real_part(self);
  if (name == "imag") return imag_part(self);
  if (name == "shape") return shape_tuple(scalar ? Shape{} : self.as<ArrayPtr>()->shape());
  if (name == "ndim") return Value(static_cast<std::int64_t>(scalar ? 0 : self.as<ArrayPtr>()->ndim()));
  if (name == "size") return Value(static_cast<std::int64_t>(scalar ? 1 : self.as<ArrayPtr>()->size()));
  if (name == "dtype") {
    bool cplx = scalar ? self.is<Complex>() : self.as<ArrayPtr>()->is_complex();
    return Value(cplx ? "complex64" : "float32");
  }
  if (name == "T") return transpose_value(self);
  if (name == "at") {
    if (scalar) return std::nullopt;
    auto at = std::make_shared<AtObj>();
    at->base = self.as<ArrayPtr>();
    return Value(std::move(at));
  }
  if (name == "conj" || name == "conjugate") return bind([](Interpreter&, const Value& s, Args&) { return conj_value(s); });
  if (name == "copy" || name == "block_until_ready") return bind([](Interpreter&, const Value& s, Args&) { return s; });
  if (name == "item")
    return bind([](Interpreter&, const Value& s, Args&) -> Value {
      if (s.is_number()) return s;
      const auto& a = *s.as<ArrayPtr>();
      if (a.size() != 1) raise(ErrorKind::script, "ValueError: can only convert an array of size 1 to a Python scalar");
      return a.is_complex() ? Value(a[0]) : Value(a[0].real());
    });
  if (name == "astype")
    return bind([](Interpreter&, const Value& s, Args& a) {
      auto d = parse_dtype(a.required(0, "dtype"));
      return wrap_array(apply_dtype(to_array(s), *d));
    });
  if (name == "reshape")
    return bind([](Interpreter&, const Value& s, Args& a) { return Value(reshape_value(to_array(s), a.positional())); });
  if (name == "flatten" || name == "ravel")
    return bind([](Interpreter&, const Value& s, Args&) {
      NdArray x = to_array(s);
      return Value(reshape(x, {x.size()}, {false}));
    });
  if (name == "transpose")
    return bind([](Interpreter&, const Value& s, Args& a) {
      std::vector<std::size_t> perm;
      for (const auto& v : a.positional()) {
        if (v.is_sequence()) {
          for (const auto& x : sequence_items(v)) perm.push_back(static_cast<std::size_t>(to_index(x)));
        } else {
          perm.push_back(static_cast<std::size_t>(to_index(v)));
        }
      }
      return transpose_value(s, std::move(perm));
    });
  if (name == "squeeze")
    return bind([](Interpreter&, const Value& s, Args&) {
      NdArray x = to_array(s);
      Shape sh;
      for (auto d : x.shape()) {
        if (d != 1) sh.push_back(d);
      }
      return wrap_array(reshape(x, sh, std::vector<bool>(sh.size(), false)));
    });
  if (name == "dot") return bind([](Interpreter&, const Value& s, Args& a) { return dot(s, a.required(0, "b")); });
  if (name == "tolist")
    return bind([](Interpreter&, const Value& s, Args&) -> Value {
      std::function<Value(const Value&)> conv = [&](const Value& v) -> Value {
        if (!v.is_array()) return v;
        std::vector<Value> items;
        for (const auto& row : iterate(v)) items.push_back(conv(row));
        return Value::list(std::move(items));
      };
      return conv(s);
    });
  if (name == "clip")
    return bind([](Interpreter& in, const Value& s, Args& a) {
      std::vector<Value> pos{s, a.optional(0, "min"), a.optional(1, "max")};
      Kwargs kw;
      Members tmp;
      add_numpy_members(tmp, "jax.numpy");
      return in.call(tmp["clip"], std::move(pos), std::move(kw));
    });
  if (name == "round")
    return bind([](Interpreter&, const Value& s, Args& a) {
      std::int64_t dec = a.present(0, "decimals") ? to_index(a.required(0, "decimals")) : 0;
      return map_elementwise(
          s, [dec](double x) { return round_half_even(x, dec); },
          [dec](Complex z) { return Complex(round_half_even(z.real(), dec), round_half_even(z.imag(), dec)); });
    });
  static const std::pair<const char*, Red> reductions[] = {
      {"sum", Red::sum}, {"prod", Red::prod}, {"mean", Red::mean},     {"max", Red::max},       {"min", Red::min},
      {"any", Red::any}, {"all", Red::all},   {"argmax", Red::argmax}, {"argmin", Red::argmin}, {"std", Red::std},
      {"var", Red::var}};
  for (const auto& [n, kind] : reductions) {
    if (name == n) {
      Red k = kind;
      return bind([k](Interpreter&, const Value& s, Args& a) {
        double ddof = a.present(2, "ddof") ? to_double(a.required(2, "ddof")) : 0.0;
        return reduce(s, a.optional(0, "axis"), k, ddof);
      });
    }
  }
  if (name == "cumsum")
    return bind([](Interpreter&, const Value& s, Args& a) { return cumulative(s, a.optional(0, "axis"), false); });
  if (name == "cumprod")
    return bind([](Interpreter&, const Value& s, Args& a) { return cumulative(s, a.optional(0, "axis"), true); });
  return std::nullopt;
}

}  // namespace sciexp::script
