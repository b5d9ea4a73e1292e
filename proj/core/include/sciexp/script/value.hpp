// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sciexp/ndarray.hpp"
#include "sciexp/numerics/spin.hpp"

namespace sciexp::script {

class Value;
class Interpreter;
struct FunctionDef;
class Scope;

struct NoneType {
  friend bool operator==(NoneType, NoneType) { return true; }
};

struct ListObj {
  std::vector<Value> items;
};

struct DictObj {
  // Insertion-ordered, keyed by string like the result dictionaries agents build.
  std::vector<std::pair<std::string, Value>> items;

  const Value* find(const std::string& key) const;
  void set(const std::string& key, Value v);
};

struct TupleObj {
  std::vector<Value> items;
};

struct SliceObj {
  std::optional<std::int64_t> start, stop, step;
};

struct RangeObj {
  std::int64_t start = 0, stop = 0, step = 1;
  std::int64_t length() const;
};

struct FunctionObj {
  std::shared_ptr<const FunctionDef> def;
  std::shared_ptr<Scope> closure;
};

using Kwargs = std::vector<std::pair<std::string, Value>>;
using BuiltinFn = std::function<Value(Interpreter&, std::vector<Value>&, Kwargs&)>;

struct BuiltinObj {
  std::string name;
  BuiltinFn fn;
};

struct ModuleObj {
  std::string name;
  std::map<std::string, Value> members;
};

/// `arr.at[index]` pending a .set/.add/.multiply call.
struct AtObj {
  std::shared_ptr<const NdArray> base;
  std::shared_ptr<const Value> index;  // null until subscripted
};

using ArrayPtr = std::shared_ptr<const NdArray>;
using OperatorPtr = std::shared_ptr<const numerics::SparseOperator>;

class Value {
 public:
  using Storage = std::variant<NoneType, bool, std::int64_t, double, Complex, std::string,
                               std::shared_ptr<ListObj>, std::shared_ptr<TupleObj>, std::shared_ptr<DictObj>,
                               ArrayPtr, OperatorPtr, std::shared_ptr<FunctionObj>, std::shared_ptr<BuiltinObj>,
                               std::shared_ptr<ModuleObj>, SliceObj, RangeObj, std::shared_ptr<AtObj>>;

  Value() = default;
  Value(NoneType) {}
  Value(bool b) : v_(b) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(std::int64_t i) : v_(i) {}
  Value(std::size_t i) : v_(static_cast<std::int64_t>(i)) {}
  Value(double d) : v_(d) {}
  Value(Complex z) : v_(z) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(NdArray a) : v_(std::make_shared<const NdArray>(std::move(a))) {}
  Value(ArrayPtr a) : v_(std::move(a)) {}
  Value(numerics::SparseOperator m) : v_(std::make_shared<const numerics::SparseOperator>(std::move(m))) {}
  Value(OperatorPtr m) : v_(std::move(m)) {}
  Value(std::shared_ptr<ListObj> l) : v_(std::move(l)) {}
  Value(std::shared_ptr<TupleObj> t) : v_(std::move(t)) {}
  Value(std::shared_ptr<DictObj> d) : v_(std::move(d)) {}
  Value(std::shared_ptr<FunctionObj> f) : v_(std::move(f)) {}
  Value(std::shared_ptr<BuiltinObj> f) : v_(std::move(f)) {}
  Value(std::shared_ptr<ModuleObj> m) : v_(std::move(m)) {}
  Value(SliceObj s) : v_(s) {}
  Value(RangeObj r) : v_(r) {}
  Value(std::shared_ptr<AtObj> a) : v_(std::move(a)) {}

  static Value list(std::vector<Value> items);
  static Value tuple(std::vector<Value> items);
  static Value dict();
  static Value builtin(std::string name, BuiltinFn fn);

  const Storage& storage() const noexcept { return v_; }

  template <class T>
  bool is() const noexcept {
    return std::holds_alternative<T>(v_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(v_);
  }

  bool is_none() const noexcept { return is<NoneType>(); }
  bool is_number() const noexcept { return is<bool>() || is<std::int64_t>() || is<double>() || is<Complex>(); }
  bool is_array() const noexcept { return is<ArrayPtr>(); }
  bool is_operator() const noexcept { return is<OperatorPtr>(); }
  bool is_sequence() const noexcept { return is<std::shared_ptr<ListObj>>() || is<std::shared_ptr<TupleObj>>(); }
  bool is_callable() const noexcept {
    return is<std::shared_ptr<FunctionObj>>() || is<std::shared_ptr<BuiltinObj>>();
  }

  std::string type_name() const;

 private:
  Storage v_;
};

/// Elements of a list or tuple.
const std::vector<Value>& sequence_items(const Value& v);

}  // namespace sciexp::script
