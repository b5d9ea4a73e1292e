// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sciexp/script/ast.hpp"
#include "sciexp/script/value.hpp"

namespace sciexp::script {

struct Limits {
  std::uint64_t max_steps = 20'000'000;
  std::size_t max_depth = 100;
  std::size_t max_elements = std::size_t{1} << 24;
};

class Scope {
 public:
  explicit Scope(std::shared_ptr<Scope> parent = nullptr) : parent_(std::move(parent)) {}

  const Value* find(const std::string& name) const {
    for (const Scope* s = this; s; s = s->parent_.get()) {
      auto it = s->vars_.find(name);
      if (it != s->vars_.end()) return &it->second;
    }
    return nullptr;
  }
  const Value* find_local(const std::string& name) const {
    auto it = vars_.find(name);
    return it == vars_.end() ? nullptr : &it->second;
  }
  void set(const std::string& name, Value v) { vars_[name] = std::move(v); }
  const std::unordered_map<std::string, Value>& locals() const noexcept { return vars_; }

 private:
  std::shared_ptr<Scope> parent_;
  std::unordered_map<std::string, Value> vars_;
};

/// Tree-walking evaluator for the Python subset agents use to express
/// equations of motion, propagators, Hamiltonians, and initial conditions.
/// jnp/np/math/jax are pre-imported. Errors surface as ErrorKind::script
/// (or index/shape for out-of-range access) with a "line N:" prefix.
class Interpreter {
 public:
  explicit Interpreter(Limits limits = {});

  void define(const std::string& name, Value v);
  void exec(std::string_view source);
  Value eval(std::string_view expression);

  bool has(const std::string& name) const;
  Value get(const std::string& name) const;
  const std::unordered_map<std::string, Value>& globals() const { return globals_->locals(); }

  Value call(const Value& fn, std::vector<Value> args, Kwargs kwargs = {});

  void tick();
  void check_size(std::size_t elements) const;
  const Limits& limits() const noexcept { return limits_; }
  std::uint64_t steps() const noexcept { return steps_; }
  /// Restarts the step budget, e.g. between independent callback invocations.
  void reset_steps() noexcept { steps_ = 0; }

 private:
  enum class Flow { normal, break_, continue_, return_ };
  using ScopePtr = std::shared_ptr<Scope>;

  Flow exec_block(const Block& block, const ScopePtr& scope, Value& ret);
  Flow exec_stmt(const Stmt& s, const ScopePtr& scope, Value& ret);
  Value eval_expr(const Expr& e, const ScopePtr& scope);
  Value eval_call(const Expr& e, const ScopePtr& scope);
  Value eval_comprehension(const Expr& e, const ScopePtr& scope);
  void assign(const Expr& target, Value v, const ScopePtr& scope);
  void exec_import(const Stmt& s, const ScopePtr& scope);
  Value make_function(const std::shared_ptr<const FunctionDef>& def, const ScopePtr& scope);
  Value call_function(const FunctionObj& f, std::vector<Value>& args, Kwargs& kwargs);

  Limits limits_;
  std::uint64_t steps_ = 0;
  std::size_t depth_ = 0;
  ScopePtr globals_;
  std::vector<std::shared_ptr<const Module>> modules_;  // keep ASTs alive for defined functions
};

/// Evaluates one expression in a fresh interpreter with extra bindings.
Value evaluate(std::string_view expression, const std::vector<std::pair<std::string, Value>>& bindings = {});

}  // namespace sciexp::script
