// SPDX-License-Identifier: Apache-2.0
#include "sciexp/script/ops.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace sciexp::script {

using numerics::SparseOperator;

void raise(ErrorKind kind, const std::string& message) { throw Error(kind, message); }
void type_error(const std::string& message) { raise(ErrorKind::script, "TypeError: " + message); }

namespace {

using ListPtr = std::shared_ptr<ListObj>;
using TuplePtr = std::shared_ptr<TupleObj>;
using DictPtr = std::shared_ptr<DictObj>;

bool is_int_like(const Value& v) { return v.is<std::int64_t>() || v.is<bool>(); }

std::int64_t as_int(const Value& v) {
  if (v.is<bool>()) return v.as<bool>() ? 1 : 0;
  return v.as<std::int64_t>();
}

std::string format_double(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  std::string s(buf, ptr);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::string format_complex(Complex z) {
  std::string im = format_double(z.imag());
  if (im.size() > 2 && im.substr(im.size() - 2) == ".0") im.resize(im.size() - 2);
  if (z.real() == 0.0 && !std::signbit(z.real())) return im + "j";
  std::string re = format_double(z.real());
  if (re.size() > 2 && re.substr(re.size() - 2) == ".0") re.resize(re.size() - 2);
  return "(" + re + (z.imag() >= 0 || std::isnan(z.imag()) ? "+" : "") + im + "j)";
}

double py_floor_mod(double a, double b) {
  double m = std::fmod(a, b);
  if (m != 0.0 && ((m < 0) != (b < 0))) m += b;
  return m;
}

std::int64_t py_int_floordiv(std::int64_t a, std::int64_t b) {
  if (b == 0) raise(ErrorKind::script, "ZeroDivisionError: integer division or modulo by zero");
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t py_int_mod(std::int64_t a, std::int64_t b) { return a - py_int_floordiv(a, b) * b; }

const char* op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::floordiv: return "//";
    case BinaryOp::mod: return "%";
    case BinaryOp::pow: return "**";
    case BinaryOp::matmul: return "@";
    case BinaryOp::bit_and: return "&";
    case BinaryOp::bit_or: return "|";
    case BinaryOp::bit_xor: return "^";
  }
  return "?";
}

[[noreturn]] void unsupported(BinaryOp op, const Value& a, const Value& b) {
  type_error(std::string("unsupported operand type(s) for ") + op_symbol(op) + ": '" + a.type_name() + "' and '" +
             b.type_name() + "'");
}

Complex complex_pow(Complex a, Complex b) {
  if (b.imag() == 0.0) {
    double e = b.real();
    if (e == std::floor(e) && std::abs(e) <= 64) {
      auto n = static_cast<long>(std::abs(e));
      Complex result(1.0, 0.0), base = a;
      while (n) {
        if (n & 1) result *= base;
        base *= base;
        n >>= 1;
      }
      return e < 0 ? Complex(1.0, 0.0) / result : result;
    }
    if (a.imag() == 0.0 && a.real() >= 0.0) return Complex(std::pow(a.real(), e), 0.0);
  }
  if (a == Complex(0.0, 0.0)) return b == Complex(0.0, 0.0) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
  return std::pow(a, b);
}

// Scalar kernel shared by scalar and array paths.
struct Kernel {
  BinaryOp op;

  double real(double a, double b) const {
    switch (op) {
      case BinaryOp::add: return a + b;
      case BinaryOp::sub: return a - b;
      case BinaryOp::mul: return a * b;
      case BinaryOp::div: return a / b;
      case BinaryOp::floordiv: return std::floor(a / b);
      case BinaryOp::mod: return b == 0.0 ? std::numeric_limits<double>::quiet_NaN() : py_floor_mod(a, b);
      case BinaryOp::pow: return std::pow(a, b);
      case BinaryOp::bit_and: return (a != 0.0 && b != 0.0) ? 1.0 : 0.0;
      case BinaryOp::bit_or: return (a != 0.0 || b != 0.0) ? 1.0 : 0.0;
      case BinaryOp::bit_xor: return ((a != 0.0) != (b != 0.0)) ? 1.0 : 0.0;
      case BinaryOp::matmul: break;
    }
    return 0.0;
  }

  Complex complex(Complex a, Complex b) const {
    switch (op) {
      case BinaryOp::add: return a + b;
      case BinaryOp::sub: return a - b;
      case BinaryOp::mul: return a * b;
      case BinaryOp::div: return a / b;
      case BinaryOp::pow: return complex_pow(a, b);
      default: type_error(std::string("operator ") + op_symbol(op) + " is not defined for complex values");
    }
  }
};

Value python_scalar_binary(BinaryOp op, const Value& a, const Value& b) {
  if (a.is<Complex>() || b.is<Complex>()) {
    if (op == BinaryOp::floordiv || op == BinaryOp::mod || op == BinaryOp::bit_and || op == BinaryOp::bit_or ||
        op == BinaryOp::bit_xor) {
      unsupported(op, a, b);
    }
    Complex x = to_complex(a), y = to_complex(b);
    if (op == BinaryOp::div && y == Complex(0.0, 0.0)) raise(ErrorKind::script, "ZeroDivisionError: complex division by zero");
    return Value(Kernel{op}.complex(x, y));
  }
  if (is_int_like(a) && is_int_like(b)) {
    std::int64_t x = as_int(a), y = as_int(b);
    switch (op) {
      case BinaryOp::add: return Value(x + y);
      case BinaryOp::sub: return Value(x - y);
      case BinaryOp::mul: return Value(x * y);
      case BinaryOp::div:
        if (y == 0) raise(ErrorKind::script, "ZeroDivisionError: division by zero");
        return Value(static_cast<double>(x) / static_cast<double>(y));
      case BinaryOp::floordiv: return Value(py_int_floordiv(x, y));
      case BinaryOp::mod: return Value(py_int_mod(x, y));
      case BinaryOp::pow:
        if (y >= 0) {
          std::int64_t r = 1, base = x;
          for (std::int64_t e = y; e; e >>= 1) {
            if (e & 1) r *= base;
            base *= base;
          }
          return Value(r);
        }
        return Value(std::pow(static_cast<double>(x), static_cast<double>(y)));
      case BinaryOp::bit_and:
        if (a.is<bool>() && b.is<bool>()) return Value(static_cast<bool>(x & y));
        return Value(x & y);
      case BinaryOp::bit_or:
        if (a.is<bool>() && b.is<bool>()) return Value(static_cast<bool>(x | y));
        return Value(x | y);
      case BinaryOp::bit_xor:
        if (a.is<bool>() && b.is<bool>()) return Value(static_cast<bool>(x ^ y));
        return Value(x ^ y);
      case BinaryOp::matmul: unsupported(op, a, b);
    }
  }
  if (op == BinaryOp::bit_and || op == BinaryOp::bit_or || op == BinaryOp::bit_xor || op == BinaryOp::matmul) {
    unsupported(op, a, b);
  }
  double x = to_double(a), y = to_double(b);
  if ((op == BinaryOp::div || op == BinaryOp::floordiv || op == BinaryOp::mod) && y == 0.0) {
    raise(ErrorKind::script, "ZeroDivisionError: float division by zero");
  }
  if (op == BinaryOp::pow && x < 0 && y != std::floor(y)) {
    return Value(complex_pow(Complex(x, 0.0), Complex(y, 0.0)));
  }
  return Value(Kernel{op}.real(x, y));
}

NdArray elementwise(BinaryOp op, const NdArray& a, const NdArray& b) {
  Kernel k{op};
  bool cplx = a.is_complex() || b.is_complex();
  if (cplx && (op == BinaryOp::floordiv || op == BinaryOp::mod || op == BinaryOp::bit_and ||
               op == BinaryOp::bit_or || op == BinaryOp::bit_xor)) {
    type_error(std::string("operator ") + op_symbol(op) + " is not defined for complex arrays");
  }
  auto apply = [&](Complex x, Complex y) {
    return cplx ? k.complex(x, y) : Complex(k.real(x.real(), y.real()), 0.0);
  };
  if (a.shape() == b.shape()) {
    NdArray out = NdArray::zeros(a.shape(), cplx);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = apply(a[i], b[i]);
    return out;
  }
  if (b.size() == 1 && b.ndim() <= a.ndim()) {
    NdArray out = NdArray::zeros(a.shape(), cplx);
    Complex y = b[0];
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = apply(a[i], y);
    return out;
  }
  if (a.size() == 1 && a.ndim() <= b.ndim()) {
    NdArray out = NdArray::zeros(b.shape(), cplx);
    Complex x = a[0];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = apply(x, b[i]);
    return out;
  }
  Shape shape = broadcast_shapes(a.shape(), b.shape());
  NdArray aa = broadcast_to(a, shape), bb = broadcast_to(b, shape);
  NdArray out = NdArray::zeros(shape, cplx);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = apply(aa[i], bb[i]);
  return out;
}

Value operator_binary(BinaryOp op, const Value& a, const Value& b) {
  auto as_op = [](const Value& v) -> const SparseOperator& { return *v.as<OperatorPtr>(); };
  auto check_same = [](const SparseOperator& x, const SparseOperator& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
      raise(ErrorKind::shape, "ValueError: incompatible operator shapes (" + std::to_string(x.rows()) + ", " +
                                  std::to_string(x.cols()) + ") and (" + std::to_string(y.rows()) + ", " +
                                  std::to_string(y.cols()) + ")");
    }
  };
  bool ao = a.is_operator(), bo = b.is_operator();
  if (ao && bo) {
    const auto& x = as_op(a);
    const auto& y = as_op(b);
    switch (op) {
      case BinaryOp::add: check_same(x, y); return Value(SparseOperator(x + y));
      case BinaryOp::sub: check_same(x, y); return Value(SparseOperator(x - y));
      case BinaryOp::matmul:
        if (x.cols() != y.rows()) check_same(x, y);
        return Value(SparseOperator((x * y).pruned()));
      case BinaryOp::mul: check_same(x, y); return Value(SparseOperator(x.cwiseProduct(y)));
      default: unsupported(op, a, b);
    }
  }
  const Value& opv = ao ? a : b;
  const Value& other = ao ? b : a;
  const auto& m = as_op(opv);
  if (other.is_number()) {
    Complex c = to_complex(other);
    switch (op) {
      case BinaryOp::mul: return Value(SparseOperator(m * c));
      case BinaryOp::div:
        if (ao) return Value(SparseOperator(m / c));
        break;
      case BinaryOp::add:
      case BinaryOp::sub:
        if (c == Complex(0.0, 0.0)) {
          if (op == BinaryOp::sub && !ao) return Value(SparseOperator(-m));
          return opv;
        }
        return wrap_array(elementwise(op, ao ? operator_to_dense(m) : to_array(a), ao ? to_array(b) : operator_to_dense(m)));
      case BinaryOp::pow:
        if (ao && c.imag() == 0.0 && c.real() > 0.0) {
          SparseOperator r = m;
          for (int k = 0; k < r.outerSize(); ++k) {
            for (SparseOperator::InnerIterator it(r, k); it; ++it) it.valueRef() = complex_pow(it.value(), c);
          }
          return Value(std::move(r));
        }
        break;
      default: break;
    }
    unsupported(op, a, b);
  }
  if (other.is_array() || other.is_sequence()) {
    NdArray d = to_array(other);
    if (op == BinaryOp::matmul) {
      if (ao) {
        if (d.ndim() == 1 || d.ndim() == 2) {
          if (static_cast<std::size_t>(m.cols()) != d.shape()[0]) {
            raise(ErrorKind::shape, "ValueError: matmul dimension mismatch: operator has " +
                                        std::to_string(m.cols()) + " columns, array has shape " + d.shape_string());
          }
          std::size_t cols = d.ndim() == 1 ? 1 : d.shape()[1];
          Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> dm(
              d.data().data(), static_cast<Eigen::Index>(d.shape()[0]), static_cast<Eigen::Index>(cols));
          Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = m * dm;
          Shape s = d.ndim() == 1 ? Shape{static_cast<std::size_t>(m.rows())}
                                  : Shape{static_cast<std::size_t>(m.rows()), cols};
          return Value(NdArray(s, std::vector<Complex>(r.data(), r.data() + r.size()), true));
        }
      } else {
        return Value(matmul(d, operator_to_dense(m)));
      }
      unsupported(op, a, b);
    }
    if ((op == BinaryOp::add || op == BinaryOp::sub) && d.ndim() == 2) {
      SparseOperator ds = dense_to_operator(d);
      check_same(m, ds);
      if (op == BinaryOp::add) return Value(SparseOperator(m + ds));
      return Value(SparseOperator(ao ? SparseOperator(m - ds) : SparseOperator(ds - m)));
    }
    NdArray md = operator_to_dense(m);
    return wrap_array(ao ? elementwise(op, md, d) : elementwise(op, d, md));
  }
  unsupported(op, a, b);
}

bool is_arraylike_operand(const Value& v) { return v.is_array() || v.is_number(); }

// Decoded subscript for one axis.
struct AxisSel {
  bool keep = true;
  bool newaxis = false;
  std::size_t axis = 0;  // source axis (unused for newaxis)
  std::vector<std::size_t> idx;
};

std::vector<std::size_t> slice_positions(const SliceObj& s, std::size_t len) {
  std::int64_t n = static_cast<std::int64_t>(len);
  std::int64_t step = s.step.value_or(1);
  if (step == 0) raise(ErrorKind::script, "ValueError: slice step cannot be zero");
  std::int64_t start, stop;
  if (step > 0) {
    start = s.start ? *s.start : 0;
    stop = s.stop ? *s.stop : n;
    if (start < 0) start = std::max<std::int64_t>(start + n, 0);
    if (stop < 0) stop = std::max<std::int64_t>(stop + n, 0);
    start = std::min(start, n);
    stop = std::min(stop, n);
  } else {
    start = s.start ? *s.start : n - 1;
    stop = s.stop ? *s.stop : -n - 1;
    if (start < 0) start += n;
    if (stop < 0) stop += n;
    start = std::min(start, n - 1);
    stop = std::max<std::int64_t>(stop, -1);
  }
  std::vector<std::size_t> out;
  if (step > 0) {
    for (std::int64_t i = start; i < stop; i += step) out.push_back(static_cast<std::size_t>(i));
  } else {
    for (std::int64_t i = start; i > stop; i += step) out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

std::size_t normalize_index(std::int64_t i, std::size_t len, std::size_t axis) {
  std::int64_t n = static_cast<std::int64_t>(len);
  if (i < -n || i >= n) {
    raise(ErrorKind::index, "IndexError: index " + std::to_string(i) + " is out of bounds for axis " +
                                std::to_string(axis) + " with size " + std::to_string(len));
  }
  return static_cast<std::size_t>(i < 0 ? i + n : i);
}

bool is_index_scalar(const Value& v) {
  if (is_int_like(v)) return true;
  if (v.is<double>()) return std::floor(v.as<double>()) == v.as<double>();
  return false;
}

// Full boolean mask over all dims -> flat selection.
std::optional<std::vector<std::size_t>> full_mask(const NdArray& a, const Value& index) {
  if (!index.is_array()) return std::nullopt;
  const auto& m = *index.as<ArrayPtr>();
  if (m.ndim() < 2 || m.shape() != a.shape()) return std::nullopt;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] != Complex(0.0, 0.0)) out.push_back(i);
  }
  return out;
}

std::vector<AxisSel> decode_index(const Shape& shape, const Value& index, Shape& out_shape) {
  std::vector<Value> parts;
  if (index.is<TuplePtr>()) {
    parts = index.as<TuplePtr>()->items;
  } else {
    parts.push_back(index);
  }
  std::vector<AxisSel> sels;
  std::size_t axis = 0;
  int advanced = 0;
  for (const auto& p : parts) {
    AxisSel sel;
    if (p.is_none()) {
      sel.newaxis = true;
      sel.idx = {0};
      sels.push_back(std::move(sel));
      continue;
    }
    if (axis >= shape.size()) {
      raise(ErrorKind::index, "IndexError: too many indices for array: array is " + std::to_string(shape.size()) +
                                  "-dimensional");
    }
    sel.axis = axis;
    if (is_index_scalar(p)) {
      sel.keep = false;
      sel.idx = {normalize_index(to_index(p), shape[axis], axis)};
    } else if (p.is<SliceObj>()) {
      sel.idx = slice_positions(p.as<SliceObj>(), shape[axis]);
    } else if (p.is_array() || p.is_sequence()) {
      NdArray ia = to_array(p);
      if (ia.ndim() != 1) raise(ErrorKind::index, "IndexError: only 1-d integer or boolean index arrays are supported");
      if (++advanced > 1) raise(ErrorKind::index, "IndexError: at most one advanced index is supported");
      bool is_mask = false;
      if (p.is_sequence()) {
        const auto& items = sequence_items(p);
        is_mask = !items.empty() && std::all_of(items.begin(), items.end(), [](const Value& v) { return v.is<bool>(); });
      }
      if (is_mask || (p.is_array() && ia.size() == shape[axis] && ia.size() > 0 &&
                      std::all_of(ia.data().begin(), ia.data().end(),
                                  [](Complex z) { return z == Complex(0.0, 0.0) || z == Complex(1.0, 0.0); }) &&
                      std::any_of(ia.data().begin(), ia.data().end(), [](Complex z) { return z == Complex(0.0, 0.0); }))) {
        // Treat 0/1 arrays of matching length containing a zero as boolean masks.
        if (ia.size() != shape[axis]) {
          raise(ErrorKind::index, "IndexError: boolean index did not match indexed array along axis " +
                                      std::to_string(axis));
        }
        for (std::size_t i = 0; i < ia.size(); ++i) {
          if (ia[i] != Complex(0.0, 0.0)) sel.idx.push_back(i);
        }
      } else {
        for (const auto& z : ia.data()) {
          double d = z.real();
          if (d != std::floor(d) || z.imag() != 0.0) {
            raise(ErrorKind::index, "IndexError: arrays used as indices must be of integer type");
          }
          sel.idx.push_back(normalize_index(static_cast<std::int64_t>(d), shape[axis], axis));
        }
      }
    } else {
      raise(ErrorKind::index, "IndexError: invalid index of type " + p.type_name());
    }
    sels.push_back(std::move(sel));
    ++axis;
  }
  for (; axis < shape.size(); ++axis) {
    AxisSel sel;
    sel.axis = axis;
    sel.idx.resize(shape[axis]);
    for (std::size_t i = 0; i < shape[axis]; ++i) sel.idx[i] = i;
    sels.push_back(std::move(sel));
  }
  out_shape.clear();
  for (const auto& s : sels) {
    if (s.keep) out_shape.push_back(s.idx.size());
  }
  return sels;
}

std::vector<std::size_t> strides_of(const Shape& shape) {
  std::vector<std::size_t> st(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) st[i - 1] = st[i] * shape[i];
  return st;
}

// Source offsets for every output element, in output row-major order.
std::vector<std::size_t> gather_offsets(const NdArray& a, const Value& index, Shape& out_shape) {
  if (auto mask = full_mask(a, index)) {
    out_shape = {mask->size()};
    return *mask;
  }
  auto sels = decode_index(a.shape(), index, out_shape);
  auto st = strides_of(a.shape());
  std::vector<std::size_t> offsets{0};
  for (const auto& s : sels) {
    std::vector<std::size_t> next;
    next.reserve(offsets.size() * s.idx.size());
    std::size_t stride = s.newaxis ? 0 : st[s.axis];
    for (std::size_t base : offsets) {
      for (std::size_t i : s.idx) next.push_back(base + i * stride);
    }
    offsets = std::move(next);
  }
  return offsets;
}

Value sequence_get(const std::vector<Value>& items, const Value& index, bool tuple) {
  if (index.is<SliceObj>()) {
    auto pos = slice_positions(index.as<SliceObj>(), items.size());
    std::vector<Value> out;
    out.reserve(pos.size());
    for (auto p : pos) out.push_back(items[p]);
    return tuple ? Value::tuple(std::move(out)) : Value::list(std::move(out));
  }
  if (!is_index_scalar(index)) {
    type_error(std::string(tuple ? "tuple" : "list") + " indices must be integers or slices, not " + index.type_name());
  }
  std::int64_t i = to_index(index);
  std::int64_t n = static_cast<std::int64_t>(items.size());
  if (i < -n || i >= n) raise(ErrorKind::index, std::string("IndexError: ") + (tuple ? "tuple" : "list") + " index out of range");
  return items[static_cast<std::size_t>(i < 0 ? i + n : i)];
}

}  // namespace

bool truthy(const Value& v) {
  if (v.is_none()) return false;
  if (v.is<bool>()) return v.as<bool>();
  if (v.is<std::int64_t>()) return v.as<std::int64_t>() != 0;
  if (v.is<double>()) return v.as<double>() != 0.0;
  if (v.is<Complex>()) return v.as<Complex>() != Complex(0.0, 0.0);
  if (v.is<std::string>()) return !v.as<std::string>().empty();
  if (v.is_sequence()) return !sequence_items(v).empty();
  if (v.is<DictPtr>()) return !v.as<DictPtr>()->items.empty();
  if (v.is<RangeObj>()) return v.as<RangeObj>().length() > 0;
  if (v.is_array()) {
    const auto& a = *v.as<ArrayPtr>();
    if (a.size() != 1) {
      raise(ErrorKind::script,
            "ValueError: The truth value of an array with more than one element is ambiguous. Use a.any() or a.all()");
    }
    return a[0] != Complex(0.0, 0.0);
  }
  return true;
}

std::int64_t to_index(const Value& v) {
  if (is_int_like(v)) return as_int(v);
  if (v.is<double>()) {
    double d = v.as<double>();
    if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  if (v.is_array() && v.as<ArrayPtr>()->size() == 1) return to_index(wrap_array(*v.as<ArrayPtr>()));
  type_error("'" + v.type_name() + "' object cannot be interpreted as an integer");
}

double to_double(const Value& v) {
  if (v.is<double>()) return v.as<double>();
  if (is_int_like(v)) return static_cast<double>(as_int(v));
  if (v.is<Complex>()) {
    if (v.as<Complex>().imag() == 0.0) return v.as<Complex>().real();
    type_error("can't convert complex to float");
  }
  if (v.is_array() && v.as<ArrayPtr>()->size() == 1) {
    const auto& z = (*v.as<ArrayPtr>())[0];
    if (z.imag() != 0.0) type_error("can't convert complex to float");
    return z.real();
  }
  if (v.is<std::string>()) {
    const auto& s = v.as<std::string>();
    char* end = nullptr;
    double d = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && *end == '\0') return d;
    raise(ErrorKind::script, "ValueError: could not convert string to float: '" + s + "'");
  }
  type_error("float() argument must be a number, not '" + v.type_name() + "'");
}

Complex to_complex(const Value& v) {
  if (v.is<Complex>()) return v.as<Complex>();
  if (v.is_array() && v.as<ArrayPtr>()->size() == 1) return (*v.as<ArrayPtr>())[0];
  return Complex(to_double(v), 0.0);
}

NdArray to_array(const Value& v) {
  if (v.is_array()) return *v.as<ArrayPtr>();
  if (v.is<Complex>()) return NdArray(Shape{}, {v.as<Complex>()}, true);
  if (v.is_number()) return NdArray(Shape{}, {Complex(to_double(v), 0.0)}, false);
  if (v.is_operator()) return operator_to_dense(*v.as<OperatorPtr>());
  if (v.is_sequence() || v.is<RangeObj>()) {
    std::vector<Value> items = v.is<RangeObj>() ? iterate(v) : sequence_items(v);
    if (items.empty()) return NdArray(Shape{0}, {}, false);
    std::vector<NdArray> parts;
    parts.reserve(items.size());
    for (const auto& item : items) parts.push_back(to_array(item));
    const Shape& inner = parts.front().shape();
    bool cplx = false;
    for (const auto& p : parts) {
      if (p.shape() != inner) {
        raise(ErrorKind::shape, "ValueError: setting an array element with a sequence. The requested array has an "
                                "inhomogeneous shape");
      }
      cplx = cplx || p.is_complex();
    }
    Shape shape{items.size()};
    shape.insert(shape.end(), inner.begin(), inner.end());
    std::vector<Complex> data;
    data.reserve(shape_size(shape));
    for (const auto& p : parts) data.insert(data.end(), p.data().begin(), p.data().end());
    return NdArray(std::move(shape), std::move(data), cplx);
  }
  type_error("cannot convert '" + v.type_name() + "' to an array");
}

Value wrap_array(NdArray a) {
  if (a.ndim() == 0) {
    if (a.is_complex()) return Value(a[0]);
    return Value(a[0].real());
  }
  return Value(std::move(a));
}

NdArray operator_to_dense(const SparseOperator& m) {
  auto rows = static_cast<std::size_t>(m.rows());
  auto cols = static_cast<std::size_t>(m.cols());
  NdArray out = NdArray::zeros({rows, cols}, true);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(m, k); it; ++it) {
      out[static_cast<std::size_t>(it.row()) * cols + static_cast<std::size_t>(it.col())] += it.value();
    }
  }
  return out;
}

SparseOperator dense_to_operator(const NdArray& a) {
  if (a.ndim() != 2) raise(ErrorKind::shape, "ValueError: expected a 2D matrix, got shape " + a.shape_string());
  std::vector<Eigen::Triplet<Complex>> trips;
  std::size_t cols = a.shape()[1];
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != Complex(0.0, 0.0)) {
      trips.emplace_back(static_cast<int>(i / cols), static_cast<int>(i % cols), a[i]);
    }
  }
  SparseOperator m(static_cast<Eigen::Index>(a.shape()[0]), static_cast<Eigen::Index>(cols));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Shape broadcast_shapes(const Shape& a, const Shape& b) {
  std::size_t n = std::max(a.size(), b.size());
  Shape out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t da = i < n - a.size() ? 1 : a[i - (n - a.size())];
    std::size_t db = i < n - b.size() ? 1 : b[i - (n - b.size())];
    if (da != db && da != 1 && db != 1) {
      NdArray ta = NdArray::zeros(a), tb = NdArray::zeros(b);
      raise(ErrorKind::shape, "ValueError: operands could not be broadcast together with shapes " +
                                  ta.shape_string() + " " + tb.shape_string());
    }
    out[i] = da == 1 ? db : da;
  }
  return out;
}

NdArray broadcast_to(const NdArray& a, const Shape& shape) {
  if (a.shape() == shape) return a;
  Shape full = broadcast_shapes(a.shape(), shape);
  if (full != shape) {
    raise(ErrorKind::shape, "ValueError: cannot broadcast shape " + a.shape_string() + " to " +
                                NdArray::zeros(shape).shape_string());
  }
  std::size_t n = shape.size();
  std::size_t off = n - a.ndim();
  auto src_st = strides_of(a.shape());
  std::vector<std::size_t> st(n, 0);
  for (std::size_t i = 0; i < a.ndim(); ++i) st[i + off] = a.shape()[i] == 1 ? 0 : src_st[i];
  NdArray out = NdArray::zeros(shape, a.is_complex());
  std::vector<std::size_t> idx(n, 0);
  std::size_t src = 0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = a[src];
    for (std::size_t d = n; d-- > 0;) {
      if (++idx[d] < shape[d]) {
        src += st[d];
        break;
      }
      src -= st[d] * (shape[d] - 1);
      idx[d] = 0;
    }
  }
  return out;
}

NdArray matmul(const NdArray& a, const NdArray& b) {
  if (a.ndim() == 0 || b.ndim() == 0) type_error("matmul: input operand does not have enough dimensions");
  if (a.ndim() > 2 || b.ndim() > 2) type_error("matmul: only 1-D and 2-D operands are supported");
  std::size_t m = a.ndim() == 2 ? a.shape()[0] : 1;
  std::size_t k = a.shape().back();
  std::size_t kb = b.shape()[0];
  std::size_t n = b.ndim() == 2 ? b.shape()[1] : 1;
  if (k != kb) {
    raise(ErrorKind::shape, "ValueError: matmul: mismatch in contracted dimension (shapes " + a.shape_string() +
                                " and " + b.shape_string() + ")");
  }
  bool cplx = a.is_complex() || b.is_complex();
  std::vector<Complex> out(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      Complex aip = a[i * k + p];
      if (aip == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aip * b[p * n + j];
    }
  }
  Shape shape;
  if (a.ndim() == 2) shape.push_back(m);
  if (b.ndim() == 2) shape.push_back(n);
  NdArray r(shape, std::move(out), cplx);
  if (!cplx) {
    for (auto& z : r.data()) z = Complex(z.real(), 0.0);
  }
  return r;
}

Value binary(BinaryOp op, const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) return python_scalar_binary(op, a, b);
  if (a.is_operator() || b.is_operator()) return operator_binary(op, a, b);
  if (op == BinaryOp::add) {
    if (a.is<std::string>() && b.is<std::string>()) return Value(a.as<std::string>() + b.as<std::string>());
    if (a.is<ListPtr>() && b.is<ListPtr>()) {
      auto items = a.as<ListPtr>()->items;
      const auto& more = b.as<ListPtr>()->items;
      items.insert(items.end(), more.begin(), more.end());
      return Value::list(std::move(items));
    }
    if (a.is<TuplePtr>() && b.is<TuplePtr>()) {
      auto items = a.as<TuplePtr>()->items;
      const auto& more = b.as<TuplePtr>()->items;
      items.insert(items.end(), more.begin(), more.end());
      return Value::tuple(std::move(items));
    }
  }
  if (op == BinaryOp::mul && (a.is_sequence() || a.is<std::string>()) && is_int_like(b)) {
    return binary(op, b, a);
  }
  if (op == BinaryOp::mul && is_int_like(a) && (b.is_sequence() || b.is<std::string>())) {
    std::int64_t n = std::max<std::int64_t>(as_int(a), 0);
    if (b.is<std::string>()) {
      std::string out;
      for (std::int64_t i = 0; i < n; ++i) out += b.as<std::string>();
      return Value(std::move(out));
    }
    const auto& items = sequence_items(b);
    std::vector<Value> out;
    for (std::int64_t i = 0; i < n; ++i) out.insert(out.end(), items.begin(), items.end());
    return b.is<ListPtr>() ? Value::list(std::move(out)) : Value::tuple(std::move(out));
  }
  if (op == BinaryOp::mod && a.is<std::string>()) type_error("%-formatting of strings is not supported");
  bool a_ok = is_arraylike_operand(a) || a.is_sequence();
  bool b_ok = is_arraylike_operand(b) || b.is_sequence();
  if (a_ok && b_ok && (a.is_array() || b.is_array())) {
    NdArray x = to_array(a), y = to_array(b);
    if (op == BinaryOp::matmul) return wrap_array(matmul(x, y));
    return wrap_array(elementwise(op, x, y));
  }
  unsupported(op, a, b);
}

Value unary(UnaryOp op, const Value& a) {
  if (op == UnaryOp::not_) return Value(!truthy(a));
  if (a.is_operator()) {
    if (op == UnaryOp::neg) return Value(SparseOperator(-*a.as<OperatorPtr>()));
    if (op == UnaryOp::pos) return a;
  }
  if (op == UnaryOp::invert) {
    if (a.is<bool>()) return Value(!a.as<bool>());
    if (a.is<std::int64_t>()) return Value(~a.as<std::int64_t>());
    if (a.is_array()) {
      NdArray r = *a.as<ArrayPtr>();
      for (auto& z : r.data()) z = Complex(z == Complex(0.0, 0.0) ? 1.0 : 0.0, 0.0);
      return Value(std::move(r));
    }
    type_error("bad operand type for unary ~: '" + a.type_name() + "'");
  }
  if (a.is<bool>() || a.is<std::int64_t>()) {
    std::int64_t v = as_int(a);
    return Value(op == UnaryOp::neg ? -v : v);
  }
  if (a.is<double>()) return Value(op == UnaryOp::neg ? -a.as<double>() : a.as<double>());
  if (a.is<Complex>()) return Value(op == UnaryOp::neg ? -a.as<Complex>() : a.as<Complex>());
  if (a.is_array()) {
    if (op == UnaryOp::pos) return a;
    NdArray r = *a.as<ArrayPtr>();
    for (auto& z : r.data()) z = -z;
    return Value(std::move(r));
  }
  type_error(std::string("bad operand type for unary ") + (op == UnaryOp::neg ? "-" : "+") + ": '" + a.type_name() + "'");
}

bool values_equal(const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) return to_complex(a) == to_complex(b);
  if (a.is_none() || b.is_none()) return a.is_none() && b.is_none();
  if (a.is<std::string>() && b.is<std::string>()) return a.as<std::string>() == b.as<std::string>();
  if (a.is_sequence() && b.is_sequence()) {
    if (a.is<ListPtr>() != b.is<ListPtr>()) return false;
    const auto& x = sequence_items(a);
    const auto& y = sequence_items(b);
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!values_equal(x[i], y[i])) return false;
    }
    return true;
  }
  if (a.is<RangeObj>() && b.is<RangeObj>()) {
    return values_equal(Value::list(iterate(a)), Value::list(iterate(b)));
  }
  if (a.is<DictPtr>() && b.is<DictPtr>()) {
    const auto& x = a.as<DictPtr>()->items;
    const auto& y = *b.as<DictPtr>();
    if (x.size() != y.items.size()) return false;
    for (const auto& [k, v] : x) {
      const Value* other = y.find(k);
      if (!other || !values_equal(v, *other)) return false;
    }
    return true;
  }
  return a.storage().index() == b.storage().index() && &a == &b;
}

Value compare(CompareOp op, const Value& a, const Value& b) {
  switch (op) {
    case CompareOp::is:
    case CompareOp::is_not: {
      bool same = (a.is_none() && b.is_none()) || (a.is<bool>() && b.is<bool>() && a.as<bool>() == b.as<bool>());
      if (!same && a.storage().index() == b.storage().index()) {
        std::visit(
            [&](const auto& x) {
              using T = std::decay_t<decltype(x)>;
              if constexpr (requires { x.get(); }) same = x.get() == std::get<T>(b.storage()).get();
            },
            a.storage());
      }
      return Value(op == CompareOp::is ? same : !same);
    }
    case CompareOp::in:
    case CompareOp::not_in: {
      bool found = false;
      if (b.is<DictPtr>()) {
        if (a.is<std::string>()) found = b.as<DictPtr>()->find(a.as<std::string>()) != nullptr;
      } else if (b.is<std::string>()) {
        if (!a.is<std::string>()) type_error("'in <string>' requires string as left operand");
        found = b.as<std::string>().find(a.as<std::string>()) != std::string::npos;
      } else {
        for (const auto& item : iterate(b)) {
          if (values_equal(item, a)) {
            found = true;
            break;
          }
        }
      }
      return Value(op == CompareOp::in ? found : !found);
    }
    default: break;
  }
  if (a.is_array() || b.is_array()) {
    NdArray x = to_array(a), y = to_array(b);
    Shape shape = broadcast_shapes(x.shape(), y.shape());
    NdArray xx = broadcast_to(x, shape), yy = broadcast_to(y, shape);
    NdArray out = NdArray::zeros(shape);
    for (std::size_t i = 0; i < out.size(); ++i) {
      bool r = false;
      Complex p = xx[i], q = yy[i];
      switch (op) {
        case CompareOp::eq: r = p == q; break;
        case CompareOp::ne: r = p != q; break;
        case CompareOp::lt: r = p.real() < q.real(); break;
        case CompareOp::le: r = p.real() <= q.real(); break;
        case CompareOp::gt: r = p.real() > q.real(); break;
        case CompareOp::ge: r = p.real() >= q.real(); break;
        default: break;
      }
      out[i] = Complex(r ? 1.0 : 0.0, 0.0);
    }
    return wrap_array(std::move(out));
  }
  if (op == CompareOp::eq) return Value(values_equal(a, b));
  if (op == CompareOp::ne) return Value(!values_equal(a, b));
  if (a.is_number() && b.is_number()) {
    if (a.is<Complex>() || b.is<Complex>()) type_error("'<' not supported between instances of 'complex'");
    double x = to_double(a), y = to_double(b);
    bool r = false;
    switch (op) {
      case CompareOp::lt: r = x < y; break;
      case CompareOp::le: r = x <= y; break;
      case CompareOp::gt: r = x > y; break;
      case CompareOp::ge: r = x >= y; break;
      default: break;
    }
    return Value(r);
  }
  if (a.is<std::string>() && b.is<std::string>()) {
    int c = a.as<std::string>().compare(b.as<std::string>());
    bool r = op == CompareOp::lt ? c < 0 : op == CompareOp::le ? c <= 0 : op == CompareOp::gt ? c > 0 : c >= 0;
    return Value(r);
  }
  type_error("comparison not supported between instances of '" + a.type_name() + "' and '" + b.type_name() + "'");
}

Value get_item(const Value& base, const Value& index) {
  if (base.is<ListPtr>()) return sequence_get(base.as<ListPtr>()->items, index, false);
  if (base.is<TuplePtr>()) return sequence_get(base.as<TuplePtr>()->items, index, true);
  if (base.is<DictPtr>()) {
    if (!index.is<std::string>()) raise(ErrorKind::script, "KeyError: " + repr(index));
    const Value* v = base.as<DictPtr>()->find(index.as<std::string>());
    if (!v) raise(ErrorKind::script, "KeyError: " + repr(index));
    return *v;
  }
  if (base.is<std::string>()) {
    const auto& s = base.as<std::string>();
    std::vector<Value> chars;
    for (char c : s) chars.emplace_back(std::string(1, c));
    Value r = sequence_get(chars, index, false);
    if (r.is<ListPtr>()) {
      std::string out;
      for (const auto& c : r.as<ListPtr>()->items) out += c.as<std::string>();
      return Value(std::move(out));
    }
    return r;
  }
  if (base.is<RangeObj>()) {
    const auto& r = base.as<RangeObj>();
    std::int64_t n = r.length();
    std::int64_t i = to_index(index);
    if (i < -n || i >= n) raise(ErrorKind::index, "IndexError: range object index out of range");
    if (i < 0) i += n;
    return Value(r.start + i * r.step);
  }
  if (base.is<std::shared_ptr<AtObj>>()) {
    auto at = std::make_shared<AtObj>(*base.as<std::shared_ptr<AtObj>>());
    at->index = std::make_shared<const Value>(index);
    return Value(std::move(at));
  }
  if (base.is_operator()) return get_item(Value(operator_to_dense(*base.as<OperatorPtr>())), index);
  if (base.is_array()) {
    const auto& a = *base.as<ArrayPtr>();
    if (a.ndim() == 1 && is_index_scalar(index)) {
      std::size_t i = normalize_index(to_index(index), a.size(), 0);
      return a.is_complex() ? Value(a[i]) : Value(a[i].real());
    }
    Shape out_shape;
    auto offsets = gather_offsets(a, index, out_shape);
    std::vector<Complex> data;
    data.reserve(offsets.size());
    for (auto o : offsets) data.push_back(a[o]);
    return wrap_array(NdArray(std::move(out_shape), std::move(data), a.is_complex()));
  }
  if (base.is_number()) raise(ErrorKind::index, "IndexError: invalid index to scalar variable.");
  type_error("'" + base.type_name() + "' object is not subscriptable");
}

NdArray scatter(const NdArray& base, const Value& index, const NdArray& values, ScatterOp op) {
  Shape out_shape;
  auto offsets = gather_offsets(base, index, out_shape);
  NdArray vals = broadcast_to(values, out_shape);
  NdArray out = base;
  if (values.is_complex()) out.set_complex(true);
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    Complex& t = out[offsets[i]];
    Complex v = vals[i];
    switch (op) {
      case ScatterOp::set: t = v; break;
      case ScatterOp::add: t += v; break;
      case ScatterOp::multiply: t *= v; break;
      case ScatterOp::divide: t /= v; break;
      case ScatterOp::power: t = complex_pow(t, v); break;
      case ScatterOp::min: t = Complex(std::min(t.real(), v.real()), 0.0); break;
      case ScatterOp::max: t = Complex(std::max(t.real(), v.real()), 0.0); break;
    }
  }
  return out;
}

Value set_item(const Value& base, const Value& index, const Value& v) {
  if (base.is<ListPtr>()) {
    auto& items = base.as<ListPtr>()->items;
    if (index.is<SliceObj>()) {
      auto pos = slice_positions(index.as<SliceObj>(), items.size());
      auto src = iterate(v);
      const auto& s = index.as<SliceObj>();
      if (s.step.value_or(1) == 1) {
        auto n = static_cast<std::int64_t>(items.size());
        std::int64_t start = s.start.value_or(0);
        if (start < 0) start = std::max<std::int64_t>(start + n, 0);
        auto lo = static_cast<std::size_t>(std::min(start, n));
        items.erase(items.begin() + static_cast<std::ptrdiff_t>(lo),
                    items.begin() + static_cast<std::ptrdiff_t>(lo + pos.size()));
        items.insert(items.begin() + static_cast<std::ptrdiff_t>(lo), src.begin(), src.end());
        return base;
      }
      if (src.size() != pos.size()) {
        raise(ErrorKind::script, "ValueError: attempt to assign sequence of size " + std::to_string(src.size()) +
                                     " to extended slice of size " + std::to_string(pos.size()));
      }
      for (std::size_t i = 0; i < pos.size(); ++i) items[pos[i]] = src[i];
      return base;
    }
    std::int64_t i = to_index(index);
    std::int64_t n = static_cast<std::int64_t>(items.size());
    if (i < -n || i >= n) raise(ErrorKind::index, "IndexError: list assignment index out of range");
    items[static_cast<std::size_t>(i < 0 ? i + n : i)] = v;
    return base;
  }
  if (base.is<DictPtr>()) {
    if (!index.is<std::string>()) type_error("dictionary keys must be strings");
    base.as<DictPtr>()->set(index.as<std::string>(), v);
    return base;
  }
  if (base.is_array()) return Value(scatter(*base.as<ArrayPtr>(), index, to_array(v), ScatterOp::set));
  type_error("'" + base.type_name() + "' object does not support item assignment");
}

std::vector<Value> iterate(const Value& v) {
  if (v.is_sequence()) return sequence_items(v);
  if (v.is<RangeObj>()) {
    const auto& r = v.as<RangeObj>();
    std::vector<Value> out;
    auto n = r.length();
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) out.emplace_back(r.start + i * r.step);
    return out;
  }
  if (v.is<DictPtr>()) {
    std::vector<Value> out;
    for (const auto& [k, _] : v.as<DictPtr>()->items) out.emplace_back(k);
    return out;
  }
  if (v.is<std::string>()) {
    std::vector<Value> out;
    for (char c : v.as<std::string>()) out.emplace_back(std::string(1, c));
    return out;
  }
  if (v.is_array()) {
    const auto& a = *v.as<ArrayPtr>();
    if (a.ndim() == 0) type_error("iteration over a 0-d array");
    std::vector<Value> out;
    out.reserve(a.shape()[0]);
    if (a.ndim() == 1) {
      for (const auto& z : a.data()) out.push_back(a.is_complex() ? Value(z) : Value(z.real()));
      return out;
    }
    Shape inner(a.shape().begin() + 1, a.shape().end());
    std::size_t block = shape_size(inner);
    for (std::size_t i = 0; i < a.shape()[0]; ++i) {
      std::vector<Complex> d(a.data().begin() + static_cast<std::ptrdiff_t>(i * block),
                             a.data().begin() + static_cast<std::ptrdiff_t>((i + 1) * block));
      out.emplace_back(NdArray(inner, std::move(d), a.is_complex()));
    }
    return out;
  }
  type_error("'" + v.type_name() + "' object is not iterable");
}

std::int64_t length(const Value& v) {
  if (v.is_sequence()) return static_cast<std::int64_t>(sequence_items(v).size());
  if (v.is<std::string>()) return static_cast<std::int64_t>(v.as<std::string>().size());
  if (v.is<DictPtr>()) return static_cast<std::int64_t>(v.as<DictPtr>()->items.size());
  if (v.is<RangeObj>()) return v.as<RangeObj>().length();
  if (v.is_array()) {
    const auto& a = *v.as<ArrayPtr>();
    if (a.ndim() == 0) type_error("len() of unsized object");
    return static_cast<std::int64_t>(a.shape()[0]);
  }
  if (v.is_operator()) return v.as<OperatorPtr>()->rows();
  type_error("object of type '" + v.type_name() + "' has no len()");
}

std::string repr(const Value& v) {
  if (v.is_none()) return "None";
  if (v.is<bool>()) return v.as<bool>() ? "True" : "False";
  if (v.is<std::int64_t>()) return std::to_string(v.as<std::int64_t>());
  if (v.is<double>()) return format_double(v.as<double>());
  if (v.is<Complex>()) return format_complex(v.as<Complex>());
  if (v.is<std::string>()) return "'" + v.as<std::string>() + "'";
  if (v.is_sequence()) {
    bool list = v.is<ListPtr>();
    const auto& items = sequence_items(v);
    std::string s = list ? "[" : "(";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) s += ", ";
      s += repr(items[i]);
    }
    if (!list && items.size() == 1) s += ",";
    return s + (list ? "]" : ")");
  }
  if (v.is<DictPtr>()) {
    std::string s = "{";
    bool first = true;
    for (const auto& [k, val] : v.as<DictPtr>()->items) {
      if (!first) s += ", ";
      first = false;
      s += "'" + k + "': " + repr(val);
    }
    return s + "}";
  }
  if (v.is<RangeObj>()) {
    const auto& r = v.as<RangeObj>();
    return "range(" + std::to_string(r.start) + ", " + std::to_string(r.stop) +
           (r.step != 1 ? ", " + std::to_string(r.step) : "") + ")";
  }
  if (v.is_array()) {
    const auto& a = *v.as<ArrayPtr>();
    if (a.size() > 20) return "Array(shape=" + a.shape_string() + ")";
    return "Array(" + repr(Value::list(a.ndim() == 0 ? std::vector<Value>{} : iterate(v))) + ")";
  }
  if (v.is_operator()) {
    const auto& m = *v.as<OperatorPtr>();
    return "BCOO(shape=[" + std::to_string(m.rows()) + ", " + std::to_string(m.cols()) + "], nse=" +
           std::to_string(m.nonZeros()) + ")";
  }
  if (v.is<std::shared_ptr<FunctionObj>>()) return "<function>";
  if (v.is<std::shared_ptr<BuiltinObj>>()) return "<built-in function " + v.as<std::shared_ptr<BuiltinObj>>()->name + ">";
  if (v.is<std::shared_ptr<ModuleObj>>()) return "<module '" + v.as<std::shared_ptr<ModuleObj>>()->name + "'>";
  return "<" + v.type_name() + ">";
}

std::string str(const Value& v) {
  if (v.is<std::string>()) return v.as<std::string>();
  return repr(v);
}

}  // namespace sciexp::script
