// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sciexp/script/interpreter.hpp"
#include "sciexp/script/ops.hpp"

namespace sciexp::script {

std::shared_ptr<Scope> builtin_scope();
std::shared_ptr<ModuleObj> find_module(const std::string& dotted);
Value get_attribute(Interpreter& interp, const Value& base, const std::string& name);

// Positional-or-keyword argument access for builtin functions.
class Args {
 public:
  Args(std::string fname, std::vector<Value>& pos, Kwargs& kw) : fname_(std::move(fname)), pos_(pos), kw_(kw) {}

  const Value* find(std::size_t i, std::string_view name) const {
    if (i < pos_.size()) return &pos_[i];
    for (const auto& [k, v] : kw_) {
      if (k == name) return &v;
    }
    return nullptr;
  }
  const Value& required(std::size_t i, std::string_view name) const {
    const Value* v = find(i, name);
    if (!v) type_error(fname_ + "() missing required argument '" + std::string(name) + "'");
    return *v;
  }
  Value optional(std::size_t i, std::string_view name, Value fallback = Value()) const {
    const Value* v = find(i, name);
    return v && !v->is_none() ? *v : fallback;
  }
  bool present(std::size_t i, std::string_view name) const {
    const Value* v = find(i, name);
    return v && !v->is_none();
  }
  std::size_t count() const noexcept { return pos_.size(); }
  std::vector<Value>& positional() noexcept { return pos_; }
  const std::string& name() const noexcept { return fname_; }

 private:
  std::string fname_;
  std::vector<Value>& pos_;
  Kwargs& kw_;
};

using Members = std::map<std::string, Value>;

/// Adds a builtin wrapping `fn(Interpreter&, Args&)` to `m`.
template <class F>
void def(Members& m, const std::string& qualified, const std::string& name, F fn) {
  std::string full = qualified.empty() ? name : qualified + "." + name;
  m[name] = Value::builtin(full, [fn, full](Interpreter& in, std::vector<Value>& pos, Kwargs& kw) -> Value {
    Args a(full, pos, kw);
    return fn(in, a);
  });
}

/// jax.numpy-compatible members shared by jnp and np.
void add_numpy_members(Members& m, const std::string& prefix);
Members numpy_linalg_members(const std::string& prefix);
Members numpy_fft_members(const std::string& prefix);
Members math_members(const std::string& prefix, bool complex_math);

/// Array methods and properties (`a.sum()`, `a.shape`, ...); nullopt when unknown.
std::optional<Value> array_attribute(Interpreter& interp, const Value& self, const std::string& name);

/// dtype argument -> {is_complex, is_integer}; nullopt when absent.
struct DType {
  bool complex = false;
  bool integer = false;
  bool boolean = false;
};
std::optional<DType> parse_dtype(const Value& v);
NdArray apply_dtype(NdArray a, const DType& d);

std::optional<int> axis_arg(const Value& v, std::size_t ndim);
Shape shape_arg(const Value& v);

}  // namespace sciexp::script
