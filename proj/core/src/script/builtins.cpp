// SPDX-License-Identifier: Apache-2.0
#include "script/builtins.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>

#include "sciexp/error.hpp"

namespace sciexp::script {

namespace {

using numerics::SparseOperator;

Value call_member(Interpreter& in, const Members& m, const std::string& name, std::vector<Value> pos) {
  return in.call(m.at(name), std::move(pos));
}

const Members& jnp_members() {
  static const Members m = [] {
    Members out;
    add_numpy_members(out, "jax.numpy");
    return out;
  }();
  return m;
}

bool less_than(const Value& a, const Value& b) { return truthy(compare(CompareOp::lt, a, b)); }

Value extremum(Interpreter& in, Args& a, bool want_max) {
  std::vector<Value> items = a.count() == 1 ? iterate(a.positional()[0]) : a.positional();
  Value key = a.optional(99, "key");
  if (items.empty()) {
    if (a.present(99, "default")) return a.optional(99, "default");
    raise(ErrorKind::script, std::string("ValueError: ") + (want_max ? "max" : "min") + "() arg is an empty sequence");
  }
  Value best = items[0];
  Value best_key = key.is_none() ? best : in.call(key, {best});
  for (std::size_t i = 1; i < items.size(); ++i) {
    Value k = key.is_none() ? items[i] : in.call(key, {items[i]});
    if (want_max ? less_than(best_key, k) : less_than(k, best_key)) {
      best = items[i];
      best_key = k;
    }
  }
  return best;
}

std::string format_spec(const Value& v, const std::string& spec) {
  if (spec.empty()) return str(v);
  char type = spec.back();
  if (std::string("fFeEgGd%").find(type) == std::string::npos) return str(v);
  std::string body = spec.substr(0, spec.size() - 1);
  char buf[128];
  if (type == 'd') {
    std::snprintf(buf, sizeof buf, ("%" + body + "lld").c_str(), static_cast<long long>(to_index(v)));
  } else if (type == '%') {
    std::snprintf(buf, sizeof buf, ("%" + body + "f%%").c_str(), to_double(v) * 100.0);
  } else {
    std::snprintf(buf, sizeof buf, ("%" + body + type).c_str(), to_double(v));
  }
  return buf;
}

std::string format_string(const std::string& fmt, const std::vector<Value>& pos, const Kwargs& kw) {
  std::string out;
  std::size_t auto_idx = 0;
  for (std::size_t i = 0; i < fmt.size(); ++i) {
    char c = fmt[i];
    if (c == '{' && i + 1 < fmt.size() && fmt[i + 1] == '{') {
      out += '{';
      ++i;
    } else if (c == '}' && i + 1 < fmt.size() && fmt[i + 1] == '}') {
      out += '}';
      ++i;
    } else if (c == '{') {
      auto close = fmt.find('}', i);
      if (close == std::string::npos) raise(ErrorKind::script, "ValueError: Single '{' encountered in format string");
      std::string field = fmt.substr(i + 1, close - i - 1);
      std::string spec;
      if (auto colon = field.find(':'); colon != std::string::npos) {
        spec = field.substr(colon + 1);
        field = field.substr(0, colon);
      }
      const Value* v = nullptr;
      if (field.empty()) {
        if (auto_idx < pos.size()) v = &pos[auto_idx++];
      } else if (std::isdigit(static_cast<unsigned char>(field[0]))) {
        auto idx = static_cast<std::size_t>(std::stoul(field));
        if (idx < pos.size()) v = &pos[idx];
      } else {
        for (const auto& [k, val] : kw) {
          if (k == field) v = &val;
        }
      }
      if (!v) raise(ErrorKind::script, "IndexError: Replacement index out of range for format string");
      out += format_spec(*v, spec);
      i = close;
    } else {
      out += c;
    }
  }
  return out;
}

Value to_int(const Value& v) {
  if (v.is<std::string>()) {
    try {
      std::size_t used = 0;
      const auto& s = v.as<std::string>();
      auto x = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return Value(static_cast<std::int64_t>(x));
    } catch (const std::exception&) {
      raise(ErrorKind::script, "ValueError: invalid literal for int(): " + repr(v));
    }
  }
  if (v.is<Complex>()) type_error("int() argument must be a real number, not 'complex'");
  double d = to_double(v);
  if (!std::isfinite(d)) raise(ErrorKind::script, "ValueError: cannot convert float to integer");
  return Value(static_cast<std::int64_t>(std::trunc(d)));
}

Value to_float(const Value& v) {
  if (v.is<std::string>()) {
    std::string s = v.as<std::string>();
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "inf" || s == "+inf" || s == "infinity") return Value(HUGE_VAL);
    if (s == "-inf" || s == "-infinity") return Value(-HUGE_VAL);
    if (s == "nan") return Value(std::nan(""));
    try {
      std::size_t used = 0;
      double d = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return Value(d);
    } catch (const std::exception&) {
      raise(ErrorKind::script, "ValueError: could not convert string to float: " + repr(v));
    }
  }
  if (v.is<Complex>()) type_error("float() argument must be a real number, not 'complex'");
  return Value(to_double(v));
}

bool isinstance_of(const Value& v, const Value& t) {
  if (t.is<std::shared_ptr<TupleObj>>()) {
    for (const auto& x : sequence_items(t)) {
      if (isinstance_of(v, x)) return true;
    }
    return false;
  }
  if (!t.is<std::shared_ptr<BuiltinObj>>()) type_error("isinstance() arg 2 must be a type or tuple of types");
  std::string name = t.as<std::shared_ptr<BuiltinObj>>()->name;
  std::string tn = v.type_name();
  if (name == "int") return tn == "int" || tn == "bool";
  if (name == "jax.Array" || name == "jax.numpy.ndarray" || name == "numpy.ndarray") return v.is_array();
  return tn == name;
}

Members python_builtins() {
  Members m;
  def(m, "", "len", [](Interpreter&, Args& a) { return Value(length(a.required(0, "obj"))); });
  def(m, "", "range", [](Interpreter&, Args& a) {
    RangeObj r;
    if (a.count() == 1) {
      r.stop = to_index(a.positional()[0]);
    } else if (a.count() >= 2) {
      r.start = to_index(a.positional()[0]);
      r.stop = to_index(a.positional()[1]);
      if (a.count() >= 3) r.step = to_index(a.positional()[2]);
    } else {
      type_error("range expected at least 1 argument, got 0");
    }
    if (r.step == 0) raise(ErrorKind::script, "ValueError: range() arg 3 must not be zero");
    return Value(r);
  });
  def(m, "", "abs", [](Interpreter& in, Args& a) -> Value {
    const Value& v = a.required(0, "x");
    if (v.is<std::int64_t>() || v.is<bool>()) return Value(static_cast<std::int64_t>(std::llabs(to_index(v))));
    return call_member(in, jnp_members(), "abs", {v});
  });
  def(m, "", "sum", [](Interpreter&, Args& a) {
    Value acc = a.optional(1, "start", Value(0));
    for (const auto& x : iterate(a.required(0, "iterable"))) acc = binary(BinaryOp::add, acc, x);
    return acc;
  });
  def(m, "", "max", [](Interpreter& in, Args& a) { return extremum(in, a, true); });
  def(m, "", "min", [](Interpreter& in, Args& a) { return extremum(in, a, false); });
  def(m, "", "float", [](Interpreter&, Args& a) { return a.count() == 0 ? Value(0.0) : to_float(a.positional()[0]); });
  def(m, "", "int", [](Interpreter&, Args& a) { return a.count() == 0 ? Value(0) : to_int(a.positional()[0]); });
  def(m, "", "complex", [](Interpreter&, Args& a) {
    Complex re = a.present(0, "real") ? to_complex(a.required(0, "real")) : Complex();
    Complex im = a.present(1, "imag") ? to_complex(a.required(1, "imag")) : Complex();
    return Value(re + Complex(0.0, 1.0) * im);
  });
  def(m, "", "bool", [](Interpreter&, Args& a) { return Value(a.count() > 0 && truthy(a.positional()[0])); });
  def(m, "", "str", [](Interpreter&, Args& a) { return Value(a.count() == 0 ? std::string() : str(a.positional()[0])); });
  def(m, "", "repr", [](Interpreter&, Args& a) { return Value(repr(a.required(0, "obj"))); });
  def(m, "", "list", [](Interpreter&, Args& a) {
    return Value::list(a.count() == 0 ? std::vector<Value>{} : iterate(a.positional()[0]));
  });
  def(m, "", "tuple", [](Interpreter&, Args& a) {
    return Value::tuple(a.count() == 0 ? std::vector<Value>{} : iterate(a.positional()[0]));
  });
  m["dict"] = Value::builtin("dict", [](Interpreter&, std::vector<Value>& pos, Kwargs& kw) {
    Value d = Value::dict();
    auto& obj = *d.as<std::shared_ptr<DictObj>>();
    if (!pos.empty()) {
      if (pos[0].is<std::shared_ptr<DictObj>>()) {
        obj.items = pos[0].as<std::shared_ptr<DictObj>>()->items;
      } else {
        for (const auto& pair : iterate(pos[0])) {
          auto kv = iterate(pair);
          if (kv.size() != 2) raise(ErrorKind::script, "ValueError: dictionary update sequence element has wrong length");
          if (!kv[0].is<std::string>()) type_error("dict keys must be strings");
          obj.set(kv[0].as<std::string>(), kv[1]);
        }
      }
    }
    for (const auto& [k, v] : kw) obj.set(k, v);
    return d;
  });
  def(m, "", "enumerate", [](Interpreter&, Args& a) {
    std::int64_t start = a.present(1, "start") ? to_index(a.required(1, "start")) : 0;
    std::vector<Value> out;
    for (const auto& x : iterate(a.required(0, "iterable"))) out.push_back(Value::tuple({Value(start++), x}));
    return Value::list(std::move(out));
  });
  def(m, "", "zip", [](Interpreter&, Args& a) {
    std::vector<std::vector<Value>> seqs;
    std::size_t n = SIZE_MAX;
    for (const auto& v : a.positional()) {
      seqs.push_back(iterate(v));
      n = std::min(n, seqs.back().size());
    }
    if (seqs.empty()) n = 0;
    std::vector<Value> out;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Value> row;
      for (const auto& s : seqs) row.push_back(s[i]);
      out.push_back(Value::tuple(std::move(row)));
    }
    return Value::list(std::move(out));
  });
  def(m, "", "map", [](Interpreter& in, Args& a) {
    if (a.count() < 2) type_error("map() must have at least two arguments.");
    std::vector<std::vector<Value>> seqs;
    std::size_t n = SIZE_MAX;
    for (std::size_t i = 1; i < a.count(); ++i) {
      seqs.push_back(iterate(a.positional()[i]));
      n = std::min(n, seqs.back().size());
    }
    std::vector<Value> out;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Value> args;
      for (const auto& s : seqs) args.push_back(s[i]);
      out.push_back(in.call(a.positional()[0], std::move(args)));
    }
    return Value::list(std::move(out));
  });
  def(m, "", "filter", [](Interpreter& in, Args& a) {
    Value fn = a.required(0, "function");
    std::vector<Value> out;
    for (const auto& x : iterate(a.required(1, "iterable"))) {
      if (fn.is_none() ? truthy(x) : truthy(in.call(fn, {x}))) out.push_back(x);
    }
    return Value::list(std::move(out));
  });
  def(m, "", "reversed", [](Interpreter&, Args& a) {
    auto items = iterate(a.required(0, "seq"));
    std::reverse(items.begin(), items.end());
    return Value::list(std::move(items));
  });
  def(m, "", "sorted", [](Interpreter& in, Args& a) {
    auto items = iterate(a.required(0, "iterable"));
    Value key = a.optional(99, "key");
    bool rev = truthy(a.optional(99, "reverse", Value(false)));
    std::vector<std::pair<Value, Value>> keyed;
    for (auto& x : items) keyed.emplace_back(key.is_none() ? x : in.call(key, {x}), x);
    std::stable_sort(keyed.begin(), keyed.end(), [&](const auto& l, const auto& r) {
      return rev ? less_than(r.first, l.first) : less_than(l.first, r.first);
    });
    std::vector<Value> out;
    for (auto& [k, v] : keyed) out.push_back(v);
    return Value::list(std::move(out));
  });
  def(m, "", "any", [](Interpreter&, Args& a) {
    for (const auto& x : iterate(a.required(0, "iterable"))) {
      if (truthy(x)) return Value(true);
    }
    return Value(false);
  });
  def(m, "", "all", [](Interpreter&, Args& a) {
    for (const auto& x : iterate(a.required(0, "iterable"))) {
      if (!truthy(x)) return Value(false);
    }
    return Value(true);
  });
  def(m, "", "round", [](Interpreter& in, Args& a) -> Value {
    const Value& v = a.required(0, "number");
    if (v.is_array() || v.is<Complex>()) return in.call(jnp_members().at("round"), {v, a.optional(1, "ndigits", Value(0))});
    if (!a.present(1, "ndigits")) {
      if (v.is<std::int64_t>() || v.is<bool>()) return Value(to_index(v));
      double d = to_double(v);
      if (!std::isfinite(d)) raise(ErrorKind::script, "ValueError: cannot convert float to integer");
      return Value(static_cast<std::int64_t>(std::nearbyint(d)));
    }
    auto nd = to_index(a.required(1, "ndigits"));
    if (v.is<std::int64_t>()) return v;
    double scale = std::pow(10.0, static_cast<double>(nd));
    return Value(std::nearbyint(to_double(v) * scale) / scale);
  });
  def(m, "", "pow", [](Interpreter&, Args& a) -> Value {
    if (a.present(2, "mod")) {
      std::int64_t base = to_index(a.required(0, "base")), e = to_index(a.required(1, "exp")),
                   mod = to_index(a.required(2, "mod"));
      if (mod == 0) raise(ErrorKind::script, "ValueError: pow() 3rd argument cannot be 0");
      std::int64_t r = 1 % mod;
      base %= mod;
      for (; e > 0; e >>= 1) {
        if (e & 1) r = static_cast<std::int64_t>((static_cast<__int128>(r) * base) % mod);
        base = static_cast<std::int64_t>((static_cast<__int128>(base) * base) % mod);
      }
      return Value((r % mod + mod) % mod);
    }
    return binary(BinaryOp::pow, a.required(0, "base"), a.required(1, "exp"));
  });
  def(m, "", "divmod", [](Interpreter&, Args& a) {
    const Value& x = a.required(0, "a");
    const Value& y = a.required(1, "b");
    return Value::tuple({binary(BinaryOp::floordiv, x, y), binary(BinaryOp::mod, x, y)});
  });
  def(m, "", "isinstance", [](Interpreter&, Args& a) {
    return Value(isinstance_of(a.required(0, "obj"), a.required(1, "classinfo")));
  });
  def(m, "", "callable", [](Interpreter&, Args& a) { return Value(a.required(0, "obj").is_callable()); });
  def(m, "", "type", [](Interpreter&, Args& a) { return Value(a.required(0, "obj").type_name()); });
  m["print"] = Value::builtin("print", [](Interpreter&, std::vector<Value>&, Kwargs&) { return Value(); });
  def(m, "", "__assert__", [](Interpreter&, Args& a) -> Value {
    if (!truthy(a.required(0, "test"))) {
      std::string msg = a.present(1, "msg") ? ": " + str(a.required(1, "msg")) : "";
      raise(ErrorKind::script, "AssertionError" + msg);
    }
    return Value();
  });
  return m;
}

std::shared_ptr<ModuleObj> make_module(std::string name, Members members) {
  auto mod = std::make_shared<ModuleObj>();
  mod->name = std::move(name);
  mod->members = std::move(members);
  return mod;
}

Value vmap(Interpreter& in, const Value& fn, const Value& in_axes, std::vector<Value>& pos) {
  std::vector<bool> mapped(pos.size(), true);
  if (in_axes.is_sequence()) {
    const auto& axes = sequence_items(in_axes);
    for (std::size_t i = 0; i < pos.size() && i < axes.size(); ++i) {
      if (axes[i].is_none()) {
        mapped[i] = false;
      } else if (to_index(axes[i]) != 0) {
        type_error("vmap supports only in_axes of 0 or None");
      }
    }
  } else if (in_axes.is_none()) {
    std::fill(mapped.begin(), mapped.end(), false);
  } else if (to_index(in_axes) != 0) {
    type_error("vmap supports only in_axes of 0 or None");
  }
  std::optional<std::size_t> n;
  std::vector<std::vector<Value>> rows(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (!mapped[i]) continue;
    rows[i] = iterate(pos[i]);
    if (n && *n != rows[i].size()) raise(ErrorKind::shape, "ValueError: vmap got inconsistent sizes for mapped axes");
    n = rows[i].size();
  }
  if (!n) return in.call(fn, pos);
  std::vector<Value> results;
  for (std::size_t k = 0; k < *n; ++k) {
    std::vector<Value> args;
    for (std::size_t i = 0; i < pos.size(); ++i) args.push_back(mapped[i] ? rows[i][k] : pos[i]);
    results.push_back(in.call(fn, std::move(args)));
  }
  return in.call(jnp_members().at("stack"), {Value::list(std::move(results))});
}

const std::map<std::string, std::shared_ptr<ModuleObj>>& module_table() {
  static const auto table = [] {
    std::map<std::string, std::shared_ptr<ModuleObj>> t;
    auto numpy_like = [&](const std::string& name) {
      Members m;
      add_numpy_members(m, name);
      auto linalg = make_module(name + ".linalg", numpy_linalg_members(name + ".linalg"));
      auto fft = make_module(name + ".fft", numpy_fft_members(name + ".fft"));
      m["linalg"] = Value(linalg);
      m["fft"] = Value(fft);
      m["ndarray"] = Value::builtin(name + ".ndarray", [](Interpreter&, std::vector<Value>&, Kwargs&) -> Value {
        type_error("ndarray cannot be constructed directly");
      });
      auto mod = make_module(name, std::move(m));
      t[name] = mod;
      t[name + ".linalg"] = linalg;
      t[name + ".fft"] = fft;
      return mod;
    };
    auto jnp = numpy_like("jax.numpy");
    numpy_like("numpy");

    Members sp;
    def(sp, "jax.experimental.sparse", "eye", [](Interpreter& in, Args& a) {
      return in.call(jnp_members().at("eye"), {a.required(0, "N")});
    });
    def(sp, "jax.experimental.sparse", "bcoo_fromdense", [](Interpreter&, Args& a) -> Value {
      const Value& v = a.required(0, "mat");
      if (v.is_operator()) return v;
      return Value(dense_to_operator(to_array(v)));
    });
    def(sp, "jax.experimental.sparse", "bcoo_todense", [](Interpreter&, Args& a) {
      return Value(to_array(a.required(0, "mat")));
    });
    Members bcoo;
    bcoo["fromdense"] = sp["bcoo_fromdense"];
    sp["BCOO"] = Value(make_module("jax.experimental.sparse.BCOO", std::move(bcoo)));
    auto sparse = make_module("jax.experimental.sparse", std::move(sp));
    auto experimental = make_module("jax.experimental", {{"sparse", Value(sparse)}});
    t["jax.experimental.sparse"] = sparse;
    t["jax.experimental"] = experimental;

    Members jax;
    jax["numpy"] = Value(jnp);
    jax["experimental"] = Value(experimental);
    jax["Array"] = Value::builtin("jax.Array", [](Interpreter&, std::vector<Value>&, Kwargs&) -> Value {
      type_error("jax.Array cannot be constructed directly");
    });
    jax["jit"] = Value::builtin("jax.jit", [](Interpreter&, std::vector<Value>& pos, Kwargs&) -> Value {
      if (pos.empty()) {
        return Value::builtin("jax.jit", [](Interpreter&, std::vector<Value>& p, Kwargs&) -> Value {
          if (p.empty()) type_error("jit() missing function");
          return p[0];
        });
      }
      return pos[0];
    });
    jax["vmap"] = Value::builtin("jax.vmap", [](Interpreter&, std::vector<Value>& pos, Kwargs& kw) -> Value {
      if (pos.empty()) type_error("vmap() missing required argument 'fun'");
      Value fn = pos[0];
      Value axes = pos.size() > 1 ? pos[1] : Value(0);
      for (const auto& [k, v] : kw) {
        if (k == "in_axes") axes = v;
      }
      return Value::builtin("vmap", [fn, axes](Interpreter& in, std::vector<Value>& p, Kwargs&) {
        return vmap(in, fn, axes, p);
      });
    });
    t["jax"] = make_module("jax", std::move(jax));
    t["math"] = make_module("math", math_members("math", false));
    t["cmath"] = make_module("cmath", math_members("cmath", true));
    return t;
  }();
  return table;
}

Value bound(const std::string& name, std::function<Value(Interpreter&, Args&)> fn) {
  return Value::builtin(name, [name, fn = std::move(fn)](Interpreter& in, std::vector<Value>& pos, Kwargs& kw) {
    Args a(name, pos, kw);
    return fn(in, a);
  });
}

std::optional<Value> at_attribute(const std::shared_ptr<AtObj>& at, const std::string& name) {
  static const std::map<std::string, ScatterOp> ops = {
      {"set", ScatterOp::set},         {"add", ScatterOp::add},     {"multiply", ScatterOp::multiply},
      {"mul", ScatterOp::multiply},    {"divide", ScatterOp::divide}, {"power", ScatterOp::power},
      {"min", ScatterOp::min},         {"max", ScatterOp::max}};
  auto need_index = [at] {
    if (!at->index) type_error("'_IndexUpdateHelper' requires an index: use x.at[idx].set(v)");
  };
  if (name == "get") {
    return bound("get", [at, need_index](Interpreter&, Args&) {
      need_index();
      return get_item(Value(at->base), *at->index);
    });
  }
  auto it = ops.find(name);
  if (it == ops.end()) return std::nullopt;
  ScatterOp op = it->second;
  return bound(name, [at, op, need_index](Interpreter& in, Args& a) {
    need_index();
    NdArray out = scatter(*at->base, *at->index, to_array(a.required(0, "values")), op);
    in.check_size(out.size());
    return Value(std::move(out));
  });
}

std::optional<Value> list_attribute(const std::shared_ptr<ListObj>& l, const std::string& name) {
  if (name == "append") return bound(name, [l](Interpreter&, Args& a) { l->items.push_back(a.required(0, "object")); return Value(); });
  if (name == "extend")
    return bound(name, [l](Interpreter&, Args& a) {
      auto items = iterate(a.required(0, "iterable"));
      l->items.insert(l->items.end(), items.begin(), items.end());
      return Value();
    });
  if (name == "pop")
    return bound(name, [l](Interpreter&, Args& a) {
      if (l->items.empty()) raise(ErrorKind::index, "IndexError: pop from empty list");
      auto n = static_cast<std::int64_t>(l->items.size());
      std::int64_t i = a.present(0, "index") ? to_index(a.required(0, "index")) : n - 1;
      if (i < 0) i += n;
      if (i < 0 || i >= n) raise(ErrorKind::index, "IndexError: pop index out of range");
      Value v = l->items[static_cast<std::size_t>(i)];
      l->items.erase(l->items.begin() + i);
      return v;
    });
  if (name == "insert")
    return bound(name, [l](Interpreter&, Args& a) {
      auto n = static_cast<std::int64_t>(l->items.size());
      std::int64_t i = to_index(a.required(0, "index"));
      if (i < 0) i = std::max<std::int64_t>(i + n, 0);
      i = std::min(i, n);
      l->items.insert(l->items.begin() + i, a.required(1, "object"));
      return Value();
    });
  if (name == "index")
    return bound(name, [l](Interpreter&, Args& a) {
      const Value& x = a.required(0, "value");
      for (std::size_t i = 0; i < l->items.size(); ++i) {
        if (values_equal(l->items[i], x)) return Value(static_cast<std::int64_t>(i));
      }
      raise(ErrorKind::script, "ValueError: " + repr(x) + " is not in list");
    });
  if (name == "count")
    return bound(name, [l](Interpreter&, Args& a) {
      std::int64_t c = 0;
      for (const auto& v : l->items) c += values_equal(v, a.required(0, "value")) ? 1 : 0;
      return Value(c);
    });
  if (name == "copy") return bound(name, [l](Interpreter&, Args&) { return Value::list(l->items); });
  if (name == "reverse") return bound(name, [l](Interpreter&, Args&) { std::reverse(l->items.begin(), l->items.end()); return Value(); });
  if (name == "clear") return bound(name, [l](Interpreter&, Args&) { l->items.clear(); return Value(); });
  if (name == "sort")
    return bound(name, [l](Interpreter&, Args& a) {
      bool rev = truthy(a.optional(99, "reverse", Value(false)));
      std::stable_sort(l->items.begin(), l->items.end(), [rev](const Value& x, const Value& y) {
        return rev ? less_than(y, x) : less_than(x, y);
      });
      return Value();
    });
  return std::nullopt;
}

std::optional<Value> dict_attribute(const std::shared_ptr<DictObj>& d, const std::string& name) {
  if (name == "keys" || name == "values" || name == "items") {
    return bound(name, [d, name](Interpreter&, Args&) {
      std::vector<Value> out;
      for (const auto& [k, v] : d->items) {
        if (name == "keys") out.emplace_back(k);
        else if (name == "values") out.push_back(v);
        else out.push_back(Value::tuple({Value(k), v}));
      }
      return Value::list(std::move(out));
    });
  }
  if (name == "get")
    return bound(name, [d](Interpreter&, Args& a) {
      const Value& k = a.required(0, "key");
      if (!k.is<std::string>()) return a.optional(1, "default");
      const Value* v = d->find(k.as<std::string>());
      return v ? *v : a.optional(1, "default");
    });
  if (name == "update")
    return bound(name, [d](Interpreter&, Args& a) {
      if (a.count() > 0) {
        const Value& other = a.positional()[0];
        if (!other.is<std::shared_ptr<DictObj>>()) type_error("dict.update expects a dict");
        for (const auto& [k, v] : other.as<std::shared_ptr<DictObj>>()->items) d->set(k, v);
      }
      return Value();
    });
  if (name == "copy") return bound(name, [d](Interpreter&, Args&) {
      Value out = Value::dict();
      out.as<std::shared_ptr<DictObj>>()->items = d->items;
      return out;
    });
  if (name == "pop")
    return bound(name, [d](Interpreter&, Args& a) {
      std::string k = str(a.required(0, "key"));
      for (auto it = d->items.begin(); it != d->items.end(); ++it) {
        if (it->first == k) {
          Value v = it->second;
          d->items.erase(it);
          return v;
        }
      }
      if (a.present(1, "default")) return a.optional(1, "default");
      raise(ErrorKind::not_found, "KeyError: " + repr(Value(k)));
    });
  return std::nullopt;
}

std::optional<Value> string_attribute(const std::string& s, const std::string& name) {
  if (name == "format")
    return Value::builtin(name, [s](Interpreter&, std::vector<Value>& pos, Kwargs& kw) {
      return Value(format_string(s, pos, kw));
    });
  if (name == "join")
    return bound(name, [s](Interpreter&, Args& a) {
      std::string out;
      bool first = true;
      for (const auto& x : iterate(a.required(0, "iterable"))) {
        if (!x.is<std::string>()) type_error("sequence item: expected str instance, " + x.type_name() + " found");
        if (!first) out += s;
        out += x.as<std::string>();
        first = false;
      }
      return Value(out);
    });
  if (name == "upper" || name == "lower")
    return bound(name, [s, name](Interpreter&, Args&) {
      std::string out = s;
      for (auto& c : out) c = static_cast<char>(name == "upper" ? std::toupper(static_cast<unsigned char>(c)) : std::tolower(static_cast<unsigned char>(c)));
      return Value(out);
    });
  if (name == "strip")
    return bound(name, [s](Interpreter&, Args&) {
      auto b = s.find_first_not_of(" \t\n\r");
      if (b == std::string::npos) return Value(std::string());
      return Value(s.substr(b, s.find_last_not_of(" \t\n\r") - b + 1));
    });
  if (name == "startswith" || name == "endswith")
    return bound(name, [s, name](Interpreter&, Args& a) {
      std::string p = str(a.required(0, "prefix"));
      if (p.size() > s.size()) return Value(false);
      return Value(name == "startswith" ? s.compare(0, p.size(), p) == 0 : s.compare(s.size() - p.size(), p.size(), p) == 0);
    });
  if (name == "replace")
    return bound(name, [s](Interpreter&, Args& a) {
      std::string from = str(a.required(0, "old")), to = str(a.required(1, "new")), out = s;
      if (from.empty()) return Value(out);
      for (std::size_t pos = 0; (pos = out.find(from, pos)) != std::string::npos; pos += to.size()) out.replace(pos, from.size(), to);
      return Value(out);
    });
  if (name == "split")
    return bound(name, [s](Interpreter&, Args& a) {
      std::vector<Value> parts;
      if (a.present(0, "sep")) {
        std::string sep = str(a.required(0, "sep"));
        if (sep.empty()) raise(ErrorKind::script, "ValueError: empty separator");
        std::size_t start = 0, pos;
        while ((pos = s.find(sep, start)) != std::string::npos) {
          parts.emplace_back(s.substr(start, pos - start));
          start = pos + sep.size();
        }
        parts.emplace_back(s.substr(start));
      } else {
        std::size_t i = 0;
        while (i < s.size()) {
          while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
          std::size_t j = i;
          while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
          if (j > i) parts.emplace_back(s.substr(i, j - i));
          i = j;
        }
      }
      return Value::list(std::move(parts));
    });
  return std::nullopt;
}

}  // namespace

std::shared_ptr<Scope> builtin_scope() {
  static const std::shared_ptr<Scope> scope = [] {
    auto s = std::make_shared<Scope>();
    for (auto& [k, v] : python_builtins()) s->set(k, v);
    const auto& mods = module_table();
    s->set("jnp", Value(mods.at("jax.numpy")));
    s->set("np", Value(mods.at("numpy")));
    s->set("jax", Value(mods.at("jax")));
    s->set("math", Value(mods.at("math")));
    return s;
  }();
  return scope;
}

std::shared_ptr<ModuleObj> find_module(const std::string& dotted) {
  const auto& t = module_table();
  auto it = t.find(dotted);
  return it == t.end() ? nullptr : it->second;
}

Value get_attribute(Interpreter& interp, const Value& base, const std::string& name) {
  std::optional<Value> out;
  if (base.is<std::shared_ptr<ModuleObj>>()) {
    const auto& mod = *base.as<std::shared_ptr<ModuleObj>>();
    auto it = mod.members.find(name);
    if (it != mod.members.end()) return it->second;
    raise(ErrorKind::script, "AttributeError: module '" + mod.name + "' has no attribute '" + name + "'");
  }
  if (base.is_array() || base.is_operator() || base.is_number()) {
    out = array_attribute(interp, base, name);
  } else if (base.is<std::shared_ptr<AtObj>>()) {
    out = at_attribute(base.as<std::shared_ptr<AtObj>>(), name);
  } else if (base.is<std::shared_ptr<ListObj>>()) {
    out = list_attribute(base.as<std::shared_ptr<ListObj>>(), name);
  } else if (base.is<std::shared_ptr<DictObj>>()) {
    out = dict_attribute(base.as<std::shared_ptr<DictObj>>(), name);
  } else if (base.is<std::string>()) {
    out = string_attribute(base.as<std::string>(), name);
  } else if (base.is<std::shared_ptr<BuiltinObj>>() && name == "__name__") {
    const auto& n = base.as<std::shared_ptr<BuiltinObj>>()->name;
    out = Value(n.substr(n.rfind('.') == std::string::npos ? 0 : n.rfind('.') + 1));
  }
  if (out) return *out;
  raise(ErrorKind::script, "AttributeError: '" + base.type_name() + "' object has no attribute '" + name + "'");
}

}  // namespace sciexp::script
