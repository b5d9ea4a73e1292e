// SPDX-License-Identifier: Apache-2.0
#include "sciexp/session/tools.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "env/docs.hpp"
#include "sciexp/error.hpp"
#include "sciexp/numerics/rk4.hpp"
#include "sciexp/script/interpreter.hpp"
#include "sciexp/script/ops.hpp"

namespace sciexp::session {

using script::Value;

namespace {

double mean_square_variation(const NdArray& a) {
  Complex mean = 0.0;
  for (const auto& z : a.data()) mean += z;
  mean /= static_cast<double>(a.size());
  double s = 0.0;
  for (const auto& z : a.data()) s += std::norm(z - mean);
  return s / static_cast<double>(a.size());
}

std::string execute_code_doc(bool with_ode_solve) {
  std::string d = env::docs::execute_code;
  if (with_ode_solve) return d;
  const std::string first = "    Additionally, you have access";
  const std::string last = "        You can vmap the ode_solve function to solve multiple initial conditions at once.\n";
  const auto b = d.find(first);
  const auto e = d.find(last);
  if (b == std::string::npos || e == std::string::npos) throw std::logic_error("execute_code doc layout changed");
  return d.erase(b, e + last.size() - b);
}

// Containers are shared by reference inside Values; agent code gets its own copies.
Value copy_containers(const Value& v) {
  if (v.is<std::shared_ptr<script::ListObj>>()) {
    std::vector<Value> items;
    for (const auto& x : v.as<std::shared_ptr<script::ListObj>>()->items) items.push_back(copy_containers(x));
    return Value::list(std::move(items));
  }
  if (v.is<std::shared_ptr<script::TupleObj>>()) {
    std::vector<Value> items;
    for (const auto& x : v.as<std::shared_ptr<script::TupleObj>>()->items) items.push_back(copy_containers(x));
    return Value::tuple(std::move(items));
  }
  if (v.is<std::shared_ptr<script::DictObj>>()) {
    Value d = Value::dict();
    auto& out = *std::const_pointer_cast<script::DictObj>(d.as<std::shared_ptr<script::DictObj>>());
    for (const auto& [k, x] : v.as<std::shared_ptr<script::DictObj>>()->items) out.set(k, copy_containers(x));
    return d;
  }
  return v;
}

}  // namespace

Closeness approx_equal(const NdArray& a1, const NdArray& a2) {
  if (a1.shape() != a2.shape())
    throw Error(ErrorKind::shape, "The arrays have different shapes " + a1.shape_string() + " and " + a2.shape_string() + ".");
  if (a1.size() == 0) throw Error(ErrorKind::shape, "The arrays are empty.");
  double mse = 0.0;
  for (std::size_t i = 0; i < a1.size(); ++i) mse += std::norm(a1[i] - a2[i]);
  mse /= static_cast<double>(a1.size());
  const double var = std::max(mean_square_variation(a1), mean_square_variation(a2));
  Closeness c;
  if (var > 0.0) c.ratio = mse / var;
  else c.ratio = mse == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  if (std::isnan(c.ratio)) c.ratio = std::numeric_limits<double>::infinity();
  if (c.ratio < almost_equal_ratio) c.statement = "The arrays are almost precisely equal.";
  else if (c.ratio < approx_equal_ratio) c.statement = "The arrays are approximately equal.";
  else c.statement = "The arrays are significantly different.";
  return c;
}

Value ode_solve_builtin() {
  return Value::builtin("ode_solve", [](script::Interpreter& in, std::vector<Value>& pos, script::Kwargs& kw) -> Value {
    static constexpr std::array<const char*, 5> names = {"X0", "rhs", "params", "dt", "T"};
    std::array<std::optional<Value>, 5> a;
    if (pos.size() > names.size()) script::type_error("ode_solve() takes 5 positional arguments");
    for (std::size_t i = 0; i < pos.size(); ++i) a[i] = pos[i];
    for (const auto& [k, v] : kw) {
      std::size_t i = 0;
      while (i < names.size() && k != names[i]) ++i;
      if (i == names.size()) script::type_error("ode_solve() got an unexpected keyword argument '" + k + "'");
      a[i] = v;
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!a[i]) script::type_error(std::string("ode_solve() missing required argument '") + names[i] + "'");
    }
    const NdArray x0 = script::to_array(*a[0]);
    const std::vector<double> x0v = x0.real_values(1e-12);
    const Value rhs = *a[1];
    const Value params = *a[2];
    const double dt = script::to_double(*a[3]);
    const double T = script::to_double(*a[4]);
    if (!(dt > 0.0) || !(T >= 0.0) || !std::isfinite(T))
      script::raise(ErrorKind::range, "ValueError: ode_solve needs dt > 0 and T >= 0");
    if (T / dt > 1e6) script::raise(ErrorKind::range, "ValueError: ode_solve is limited to 10^6 steps");
    numerics::VectorField f = [&](std::span<const double> x, double t, std::span<const double>, std::span<double> out) {
      Value r = in.call(rhs, {Value(NdArray::from_real(x0.shape(), x)), Value(t), params});
      const std::vector<double> v = env::real_values(r, "The output of rhs");
      if (v.size() != out.size())
        script::raise(ErrorKind::shape, "ValueError: rhs must return an array of the same shape as X");
      std::copy(v.begin(), v.end(), out.begin());
    };
    const auto tr = numerics::rk4_solve(x0v, f, {}, dt, T);
    Shape s{tr.steps()};
    s.insert(s.end(), x0.shape().begin(), x0.shape().end());
    return Value(NdArray::from_real(s, tr.states));
  });
}

Value execute_locally(const std::string& code, const env::Bindings& memory, bool with_ode_solve) {
  script::Interpreter in;
  for (const auto& [k, v] : memory) in.define(k, copy_containers(v));
  if (with_ode_solve) in.define("ode_solve", ode_solve_builtin());
  in.exec(code);
  if (!in.has("result") || !in.get("result").is<std::shared_ptr<script::DictObj>>())
    throw Error(ErrorKind::script, "The code must set the variable 'result' to a dictionary.");
  return in.get("result");
}

std::vector<env::ToolSpec> generic_tools(bool with_ode_solve) {
  using env::ToolRole;
  return {
      {"execute_code", execute_code_doc(with_ode_solve), {{"code", "string", "python code setting result"}}, ToolRole::analysis},
      {"plot_from_code", env::docs::plot_from_code, {{"code", "string", "python code producing a plot"}}, ToolRole::analysis},
      {"approx_equal", env::docs::approx_equal,
       {{"a1", "array", "first array or saved label"}, {"a2", "array", "second array or saved label"}}, ToolRole::analysis},
  };
}

}  // namespace sciexp::session
