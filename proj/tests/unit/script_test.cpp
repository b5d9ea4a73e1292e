// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "sciexp/error.hpp"
#include "sciexp/numerics/spin.hpp"
#include "sciexp/script/interpreter.hpp"
#include "sciexp/script/ops.hpp"

using namespace sciexp;
using namespace sciexp::script;

namespace {

double num(const Value& v) { return to_double(v); }

std::string error_of(const std::string& src) {
  Interpreter in;
  try {
    in.exec(src);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("python scalar semantics") {
  CHECK(evaluate("7 // 2").as<std::int64_t>() == 3);
  CHECK(evaluate("-7 // 2").as<std::int64_t>() == -4);
  CHECK(evaluate("-7 % 3").as<std::int64_t>() == 2);
  CHECK(num(evaluate("7 / 2")) == 3.5);
  CHECK(num(evaluate("2 ** 10")) == 1024);
  CHECK(evaluate("2 ** -1").is<double>());
  CHECK(num(evaluate("1 if 2 > 1 else 0")) == 1);
  CHECK(truthy(evaluate("1 < 2 < 3")));
  CHECK_FALSE(truthy(evaluate("1 < 3 < 2")));
  CHECK(evaluate("(1j) ** 2").as<Complex>() == Complex(-1.0, 0.0));
  CHECK(evaluate("'a' + 'b'").as<std::string>() == "ab");
  CHECK(evaluate("'{:.2f} {}'.format(3.14159, 'x')").as<std::string>() == "3.14 x");
  CHECK(num(evaluate("sum([1, 2, 3])")) == 6);
  CHECK(num(evaluate("max(3, 9, 4)")) == 9);
  CHECK(num(evaluate("round(2.5)")) == 2);
  CHECK(num(evaluate("abs(-3.5)")) == 3.5);
}

TEST_CASE("functions, closures, comprehensions") {
  Interpreter in;
  in.exec(R"(
def make_adder(k):
    def add(x):
        return x + k
    return add

add3 = make_adder(3)
squares = [i * i for i in range(5) if i % 2 == 0]
d = {str(i): i for i in range(3)}
total = 0
for i, v in enumerate([10, 20, 30]):
    total += i * v
n = 0
while True:
    n += 1
    if n >= 4:
        break
f = lambda a, b=2: a * b
)");
  CHECK(num(in.eval("add3(4)")) == 7);
  CHECK(repr(in.get("squares")) == "[0, 4, 16]");
  CHECK(num(in.eval("d['2']")) == 2);
  CHECK(num(in.get("total")) == 80);
  CHECK(num(in.get("n")) == 4);
  CHECK(num(in.eval("f(3)")) == 6);
  CHECK(num(in.eval("f(3, b=5)")) == 15);
}

TEST_CASE("imports and modules") {
  Interpreter in;
  in.exec(R"(
import jax.numpy as jnp
import numpy as np
from jax.experimental import sparse
import jax
import math
from math import sin
y = jnp.sin(0.5) + sin(0.5) + math.cos(0.0)
)");
  CHECK(num(in.get("y")) == doctest::Approx(2 * std::sin(0.5) + 1));
  CHECK(error_of("import scipy").find("ModuleNotFoundError") != std::string::npos);
  CHECK(error_of("import scipy").rfind("line 1:", 0) == 0);
}

TEST_CASE("pendulum rhs through the interpreter") {
  Interpreter in;
  in.exec(R"(
import jax.numpy as jnp

def rhs(X, t):
    q, qdot = X[0], X[1]
    return jnp.array([qdot, -9.81 * jnp.sin(q)])
)");
  Value out = in.call(in.get("rhs"), {Value(NdArray::from_real(std::vector<double>{0.3, 0.1})), Value(0.0)});
  NdArray a = to_array(out);
  REQUIRE(a.size() == 2);
  CHECK(a[0].real() == doctest::Approx(0.1));
  CHECK(a[1].real() == doctest::Approx(-9.81 * std::sin(0.3)));
}

TEST_CASE("array semantics mirror numpy") {
  Interpreter in;
  in.exec(R"(
x = jnp.linspace(0.0, 1.0, 5)
y = x.reshape(5, 1) * jnp.arange(3)
m = jnp.mean(y, axis=0)
z = jnp.zeros(4)
z = z.at[1].set(2.0)
w = jnp.where(x > 0.5, x, -x)
c = jnp.concatenate([x, x])
s = jnp.stack([x, x], axis=1)
r = jnp.roll(jnp.arange(4), 1)
k = jnp.fft.fftfreq(4, d=0.5)
v = jnp.array([[1, 2], [3, 4]]) @ jnp.array([1, 1])
b = x[x > 0.3]
)");
  CHECK(repr(in.eval("y.shape")) == "(5, 3)");
  CHECK(num(in.eval("m[2]")) == doctest::Approx(1.0));
  CHECK(num(in.eval("z[1]")) == 2.0);
  CHECK(num(in.eval("w[0]")) == 0.0);
  CHECK(num(in.eval("w[4]")) == 1.0);
  CHECK(num(in.eval("len(c)")) == 10);
  CHECK(repr(in.eval("s.shape")) == "(5, 2)");
  CHECK(num(in.eval("r[0]")) == 3);
  CHECK(num(in.eval("k[2]")) == doctest::Approx(-1.0));
  CHECK(num(in.eval("v[1]")) == 7);
  CHECK(num(in.eval("len(b)")) == 3);
  CHECK(num(in.eval("jnp.sqrt(-1.0 + 0j).imag")) == 1.0);
  CHECK(std::isnan(num(in.eval("jnp.sqrt(-1.0)"))));
}

TEST_CASE("errors carry the line and kind") {
  std::string e = error_of("x = [1, 2, 3]\ny = x[5]\n");
  CHECK(e.rfind("line 2:", 0) == 0);
  CHECK(e.find("IndexError") != std::string::npos);
  try {
    Interpreter in;
    in.exec("a = jnp.zeros(3)\nb = a[7]\n");
    FAIL("expected an index error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::index);
  }
  CHECK(error_of("a = jnp.ones(3) + jnp.ones(4)").find("line 1:") == 0);
  CHECK(error_of("def f(:\n  pass").find("SyntaxError") != std::string::npos);
  CHECK(error_of("undefined_name + 1").find("NameError") != std::string::npos);
  CHECK(error_of("while True:\n    pass\n").find("TimeoutError") != std::string::npos);
  CHECK(error_of("def f(n):\n    return f(n + 1)\nf(0)\n").find("RecursionError") != std::string::npos);
  CHECK(error_of("x = jnp.zeros(100000000)").find("MemoryError") != std::string::npos);
}

TEST_CASE("sparse operator algebra for spin Hamiltonians") {
  const std::size_t n = 3;
  std::vector<Value> sx, sz;
  auto ops = numerics::pauli_set(n);
  for (std::size_t j = 0; j < n; ++j) {
    sx.emplace_back(ops[0][j]);
    sz.emplace_back(ops[2][j]);
  }
  Interpreter in;
  in.define("Sx", Value::list(sx));
  in.define("Sz", Value::list(sz));
  in.define("N", Value(static_cast<std::int64_t>(n)));
  in.exec(R"(
H = 0
for j in range(N - 1):
    H = H + Sz[j] @ Sz[j + 1]
for j in range(N):
    H = H - 0.5 * Sx[j]
dense = H.todense()
)");
  Value h = in.get("H");
  REQUIRE(h.is_operator());
  numerics::SparseOperator ref(8, 8);
  for (std::size_t j = 0; j + 1 < n; ++j) ref += ops[2][j] * ops[2][j + 1];
  for (std::size_t j = 0; j < n; ++j) ref -= 0.5 * ops[0][j];
  CHECK((Eigen::MatrixXcd(*h.as<OperatorPtr>()) - Eigen::MatrixXcd(ref)).norm() < 1e-14);
  CHECK(repr(in.eval("dense.shape")) == "(8, 8)");
  CHECK(num(in.eval("jnp.trace(H).real")) == doctest::Approx(0.0));
}
