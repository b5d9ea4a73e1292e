// SPDX-License-Identifier: Apache-2.0
#include "sciexp/script/interpreter.hpp"

#include <new>

#include "script/builtins.hpp"
#include "sciexp/error.hpp"
#include "sciexp/script/ops.hpp"

namespace sciexp::script {

namespace {

bool has_line_prefix(const char* what) { return std::string_view(what).rfind("line ", 0) == 0; }

[[noreturn]] void rethrow_with_line(int line) {
  try {
    throw;
  } catch (const Error& e) {
    if (has_line_prefix(e.what())) throw;
    throw Error(e.kind(), "line " + std::to_string(line) + ": " + e.what());
  } catch (const std::bad_alloc&) {
    throw Error(ErrorKind::script, "line " + std::to_string(line) + ": MemoryError");
  } catch (const std::exception& e) {
    throw Error(ErrorKind::script, "line " + std::to_string(line) + ": " + e.what());
  }
}

std::optional<std::int64_t> slice_bound(const Value& v) {
  if (v.is_none()) return std::nullopt;
  return to_index(v);
}

}  // namespace

Interpreter::Interpreter(Limits limits)
    : limits_(limits), globals_(std::make_shared<Scope>(builtin_scope())) {}

void Interpreter::define(const std::string& name, Value v) { globals_->set(name, std::move(v)); }

bool Interpreter::has(const std::string& name) const { return globals_->find(name) != nullptr; }

Value Interpreter::get(const std::string& name) const {
  const Value* v = globals_->find(name);
  if (!v) throw Error(ErrorKind::not_found, "NameError: name '" + name + "' is not defined");
  return *v;
}

void Interpreter::tick() {
  if (++steps_ > limits_.max_steps) {
    throw Error(ErrorKind::script, "TimeoutError: execution step limit exceeded");
  }
}

void Interpreter::check_size(std::size_t elements) const {
  if (elements > limits_.max_elements) {
    throw Error(ErrorKind::script, "MemoryError: array of " + std::to_string(elements) + " elements exceeds the limit");
  }
}

void Interpreter::exec(std::string_view source) {
  auto module = parse_module(source);
  modules_.push_back(module);
  Value ret;
  Flow f = exec_block(module->body, globals_, ret);
  if (f == Flow::return_) throw Error(ErrorKind::script, "SyntaxError: 'return' outside function");
  if (f == Flow::break_ || f == Flow::continue_) throw Error(ErrorKind::script, "SyntaxError: 'break' outside loop");
}

Value Interpreter::eval(std::string_view expression) {
  auto expr = parse_expression(expression);
  try {
    return eval_expr(*expr, globals_);
  } catch (...) {
    rethrow_with_line(expr->line);
  }
}

Value Interpreter::call(const Value& fn, std::vector<Value> args, Kwargs kwargs) {
  tick();
  if (fn.is<std::shared_ptr<FunctionObj>>()) return call_function(*fn.as<std::shared_ptr<FunctionObj>>(), args, kwargs);
  if (fn.is<std::shared_ptr<BuiltinObj>>()) return fn.as<std::shared_ptr<BuiltinObj>>()->fn(*this, args, kwargs);
  type_error("'" + fn.type_name() + "' object is not callable");
}

Value Interpreter::call_function(const FunctionObj& f, std::vector<Value>& args, Kwargs& kwargs) {
  const FunctionDef& def = *f.def;
  if (depth_ >= limits_.max_depth) throw Error(ErrorKind::script, "RecursionError: maximum recursion depth exceeded");
  auto scope = std::make_shared<Scope>(f.closure);
  const auto& params = def.params;
  if (args.size() > params.size()) {
    type_error(def.name + "() takes " + std::to_string(params.size()) + " positional arguments but " +
               std::to_string(args.size()) + " were given");
  }
  std::vector<bool> bound(params.size(), false);
  for (std::size_t i = 0; i < args.size(); ++i) {
    scope->set(params[i], std::move(args[i]));
    bound[i] = true;
  }
  for (auto& [k, v] : kwargs) {
    std::size_t i = 0;
    while (i < params.size() && params[i] != k) ++i;
    if (i == params.size()) type_error(def.name + "() got an unexpected keyword argument '" + k + "'");
    if (bound[i]) type_error(def.name + "() got multiple values for argument '" + k + "'");
    scope->set(k, std::move(v));
    bound[i] = true;
  }
  std::size_t first_default = params.size() - def.defaults.size();
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (bound[i]) continue;
    if (i < first_default) type_error(def.name + "() missing required positional argument: '" + params[i] + "'");
    scope->set(params[i], eval_expr(*def.defaults[i - first_default], f.closure));
  }
  ++depth_;
  struct DepthGuard {
    std::size_t& d;
    ~DepthGuard() { --d; }
  } guard{depth_};
  if (def.lambda_body) {
    try {
      return eval_expr(*def.lambda_body, scope);
    } catch (...) {
      rethrow_with_line(def.lambda_body->line);
    }
  }
  Value ret;
  Flow flow = exec_block(def.body, scope, ret);
  if (flow == Flow::return_) return ret;
  return Value();
}

Value Interpreter::make_function(const std::shared_ptr<const FunctionDef>& def, const ScopePtr& scope) {
  auto f = std::make_shared<FunctionObj>();
  f->def = def;
  f->closure = scope;
  return Value(std::move(f));
}

Interpreter::Flow Interpreter::exec_block(const Block& block, const ScopePtr& scope, Value& ret) {
  for (const auto& s : block) {
    Flow f = exec_stmt(*s, scope, ret);
    if (f != Flow::normal) return f;
  }
  return Flow::normal;
}

Interpreter::Flow Interpreter::exec_stmt(const Stmt& s, const ScopePtr& scope, Value& ret) {
  tick();
  try {
    switch (s.kind) {
      case Stmt::Kind::expr: eval_expr(*s.value, scope); return Flow::normal;
      case Stmt::Kind::assign: {
        Value v = eval_expr(*s.value, scope);
        for (const auto& t : s.targets) assign(*t, v, scope);
        return Flow::normal;
      }
      case Stmt::Kind::aug_assign: {
        const Expr& t = *s.target;
        Value rhs = eval_expr(*s.value, scope);
        if (t.kind == Expr::Kind::name) {
          const Value* cur = scope->find(t.name);
          if (!cur) throw Error(ErrorKind::script, "NameError: name '" + t.name + "' is not defined");
          if (s.op == BinaryOp::add && cur->is<std::shared_ptr<ListObj>>()) {
            auto items = iterate(rhs);
            auto& dst = cur->as<std::shared_ptr<ListObj>>()->items;
            dst.insert(dst.end(), items.begin(), items.end());
            return Flow::normal;
          }
          scope->set(t.name, binary(s.op, *cur, rhs));
          return Flow::normal;
        }
        if (t.kind == Expr::Kind::subscript) {
          Value base = eval_expr(*t.a, scope);
          Value index = eval_expr(*t.b, scope);
          Value updated = binary(s.op, get_item(base, index), rhs);
          Value nb = set_item(base, index, updated);
          if (base.is_array()) assign(*t.a, std::move(nb), scope);
          return Flow::normal;
        }
        type_error("illegal target for augmented assignment");
      }
      case Stmt::Kind::if_: {
        if (truthy(eval_expr(*s.condition, scope))) return exec_block(s.body, scope, ret);
        return exec_block(s.orelse, scope, ret);
      }
      case Stmt::Kind::for_: {
        auto items = iterate(eval_expr(*s.value, scope));
        for (auto& item : items) {
          tick();
          assign(*s.target, std::move(item), scope);
          Flow f = exec_block(s.body, scope, ret);
          if (f == Flow::break_) return Flow::normal;
          if (f == Flow::return_) return f;
        }
        return exec_block(s.orelse, scope, ret);
      }
      case Stmt::Kind::while_: {
        while (truthy(eval_expr(*s.condition, scope))) {
          tick();
          Flow f = exec_block(s.body, scope, ret);
          if (f == Flow::break_) return Flow::normal;
          if (f == Flow::return_) return f;
        }
        return exec_block(s.orelse, scope, ret);
      }
      case Stmt::Kind::def: {
        Value fn = make_function(s.function, scope);
        for (auto it = s.function->decorators.rbegin(); it != s.function->decorators.rend(); ++it) {
          fn = call(eval_expr(**it, scope), {fn});
        }
        scope->set(s.function->name, std::move(fn));
        return Flow::normal;
      }
      case Stmt::Kind::return_:
        ret = s.value ? eval_expr(*s.value, scope) : Value();
        return Flow::return_;
      case Stmt::Kind::pass: return Flow::normal;
      case Stmt::Kind::break_: return Flow::break_;
      case Stmt::Kind::continue_: return Flow::continue_;
      case Stmt::Kind::import: exec_import(s, scope); return Flow::normal;
    }
  } catch (...) {
    rethrow_with_line(s.line);
  }
  return Flow::normal;
}

void Interpreter::exec_import(const Stmt& s, const ScopePtr& scope) {
  for (const auto& in : s.imports) {
    auto mod = find_module(in.module);
    if (!mod) {
      throw Error(ErrorKind::script, "ModuleNotFoundError: No module named '" + in.module +
                                         "' (available: jax, jax.numpy, numpy, math, cmath)");
    }
    if (in.name.empty()) {
      scope->set(in.alias, Value(mod));
    } else if (in.name == "__top__") {
      scope->set(in.alias, Value(find_module(in.module.substr(0, in.module.find('.')))));
    } else if (in.name == "*") {
      for (const auto& [k, v] : mod->members) scope->set(k, v);
    } else {
      auto it = mod->members.find(in.name);
      if (it != mod->members.end()) {
        scope->set(in.alias, it->second);
      } else if (auto sub = find_module(in.module + "." + in.name)) {
        scope->set(in.alias, Value(sub));
      } else {
        throw Error(ErrorKind::script, "ImportError: cannot import name '" + in.name + "' from '" + in.module + "'");
      }
    }
  }
}

void Interpreter::assign(const Expr& target, Value v, const ScopePtr& scope) {
  switch (target.kind) {
    case Expr::Kind::name: scope->set(target.name, std::move(v)); return;
    case Expr::Kind::tuple:
    case Expr::Kind::list: {
      auto items = iterate(v);
      if (items.size() != target.items.size()) {
        throw Error(ErrorKind::script, items.size() > target.items.size()
                                           ? "ValueError: too many values to unpack (expected " +
                                                 std::to_string(target.items.size()) + ")"
                                           : "ValueError: not enough values to unpack (expected " +
                                                 std::to_string(target.items.size()) + ", got " +
                                                 std::to_string(items.size()) + ")");
      }
      for (std::size_t i = 0; i < items.size(); ++i) assign(*target.items[i], std::move(items[i]), scope);
      return;
    }
    case Expr::Kind::subscript: {
      Value base = eval_expr(*target.a, scope);
      Value index = eval_expr(*target.b, scope);
      Value nb = set_item(base, index, v);
      if (base.is_array()) assign(*target.a, std::move(nb), scope);
      return;
    }
    case Expr::Kind::attribute: type_error("attribute assignment is not supported");
    default: type_error("cannot assign to expression");
  }
}

Value Interpreter::eval_comprehension(const Expr& e, const ScopePtr& scope) {
  auto inner = std::make_shared<Scope>(scope);
  std::vector<Value> out;
  auto dict = e.kind == Expr::Kind::dict_comp ? std::make_shared<DictObj>() : nullptr;
  auto loop = [&](auto&& self, std::size_t level) -> void {
    if (level == e.generators.size()) {
      if (dict) {
        Value k = eval_expr(*e.a, inner);
        if (!k.is<std::string>()) type_error("dictionary keys must be strings");
        dict->set(k.as<std::string>(), eval_expr(*e.b, inner));
      } else {
        out.push_back(eval_expr(*e.a, inner));
      }
      return;
    }
    const auto& gen = e.generators[level];
    auto items = iterate(eval_expr(*gen.iter, level == 0 ? scope : inner));
    for (auto& item : items) {
      tick();
      assign(*gen.target, std::move(item), inner);
      bool ok = true;
      for (const auto& c : gen.conditions) {
        if (!truthy(eval_expr(*c, inner))) {
          ok = false;
          break;
        }
      }
      if (ok) self(self, level + 1);
    }
  };
  loop(loop, 0);
  if (dict) return Value(std::move(dict));
  return Value::list(std::move(out));
}

Value Interpreter::eval_call(const Expr& e, const ScopePtr& scope) {
  Value fn = eval_expr(*e.a, scope);
  std::vector<Value> args;
  args.reserve(e.items.size());
  for (const auto& a : e.items) args.push_back(eval_expr(*a, scope));
  Kwargs kwargs;
  for (const auto& [k, v] : e.kwargs) kwargs.emplace_back(k, eval_expr(*v, scope));
  return call(fn, std::move(args), std::move(kwargs));
}

Value Interpreter::eval_expr(const Expr& e, const ScopePtr& scope) {
  switch (e.kind) {
    case Expr::Kind::constant: return e.constant;
    case Expr::Kind::name: {
      const Value* v = scope->find(e.name);
      if (!v) throw Error(ErrorKind::script, "NameError: name '" + e.name + "' is not defined");
      return *v;
    }
    case Expr::Kind::attribute: return get_attribute(*this, eval_expr(*e.a, scope), e.name);
    case Expr::Kind::subscript: return get_item(eval_expr(*e.a, scope), eval_expr(*e.b, scope));
    case Expr::Kind::call: return eval_call(e, scope);
    case Expr::Kind::binary: {
      Value a = eval_expr(*e.a, scope);
      Value b = eval_expr(*e.b, scope);
      return binary(e.bin_op, a, b);
    }
    case Expr::Kind::unary: return unary(e.un_op, eval_expr(*e.a, scope));
    case Expr::Kind::bool_and: {
      Value a = eval_expr(*e.a, scope);
      return truthy(a) ? eval_expr(*e.b, scope) : a;
    }
    case Expr::Kind::bool_or: {
      Value a = eval_expr(*e.a, scope);
      return truthy(a) ? a : eval_expr(*e.b, scope);
    }
    case Expr::Kind::compare: {
      Value left = eval_expr(*e.a, scope);
      Value result;
      for (std::size_t i = 0; i < e.cmp_ops.size(); ++i) {
        Value right = eval_expr(*e.items[i], scope);
        result = compare(e.cmp_ops[i], left, right);
        if (e.cmp_ops.size() > 1 && !truthy(result)) return result;
        left = std::move(right);
      }
      return result;
    }
    case Expr::Kind::if_exp: return truthy(eval_expr(*e.b, scope)) ? eval_expr(*e.a, scope) : eval_expr(*e.c, scope);
    case Expr::Kind::list:
    case Expr::Kind::tuple: {
      std::vector<Value> items;
      items.reserve(e.items.size());
      for (const auto& item : e.items) items.push_back(eval_expr(*item, scope));
      return e.kind == Expr::Kind::list ? Value::list(std::move(items)) : Value::tuple(std::move(items));
    }
    case Expr::Kind::dict: {
      auto d = std::make_shared<DictObj>();
      for (std::size_t i = 0; i < e.keys.size(); ++i) {
        Value k = eval_expr(*e.keys[i], scope);
        if (!k.is<std::string>()) type_error("dictionary keys must be strings");
        d->set(k.as<std::string>(), eval_expr(*e.items[i], scope));
      }
      return Value(std::move(d));
    }
    case Expr::Kind::slice: {
      SliceObj s;
      if (e.a) s.start = slice_bound(eval_expr(*e.a, scope));
      if (e.b) s.stop = slice_bound(eval_expr(*e.b, scope));
      if (e.c) s.step = slice_bound(eval_expr(*e.c, scope));
      return Value(s);
    }
    case Expr::Kind::lambda: return make_function(e.function, scope);
    case Expr::Kind::list_comp:
    case Expr::Kind::dict_comp: return eval_comprehension(e, scope);
  }
  return Value();
}

Value evaluate(std::string_view expression, const std::vector<std::pair<std::string, Value>>& bindings) {
  Interpreter interp;
  for (const auto& [k, v] : bindings) interp.define(k, v);
  return interp.eval(expression);
}

}  // namespace sciexp::script
