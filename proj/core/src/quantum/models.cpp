// SPDX-License-Identifier: Apache-2.0
#include "sciexp/quantum/models.hpp"

#include <cmath>

#include "sciexp/error.hpp"
#include "sciexp/script/interpreter.hpp"
#include "sciexp/script/ops.hpp"

namespace sciexp::quantum {

using numerics::SparseOperator;

std::vector<std::pair<std::size_t, std::size_t>> square_lattice_bonds(std::size_t side) {
  std::vector<std::pair<std::size_t, std::size_t>> b;
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const std::size_t s = r * side + c;
      if (c + 1 < side) b.emplace_back(s, s + 1);
      if (r + 1 < side) b.emplace_back(s, s + side);
    }
  }
  return b;
}

SparseOperator truth_hamiltonian(const catalog::SystemSpec& s, std::size_t n, const Bindings& bind) {
  if (n == 0 || n > numerics::max_spins) throw Error(ErrorKind::range, "N must be between 1 and 12.");
  const auto ops = numerics::pauli_set(n);
  const auto& X = ops[0];
  const auto& Y = ops[1];
  const auto& Z = ops[2];
  auto c = [&](const char* name) { return s.coefficient(name).at(bind); };
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  SparseOperator h(dim, dim);
  const std::string& m = s.model;
  if (m == "tfi") {
    const double J = c("J"), hx = c("h");
    for (std::size_t j = 0; j + 1 < n; ++j) h += J * (Z[j] * Z[j + 1]);
    for (std::size_t j = 0; j < n; ++j) h -= hx * X[j];
  } else if (m == "heisenberg_chain") {
    const double J = c("J"), hx = c("h");
    for (std::size_t j = 0; j + 1 < n; ++j) h += J * (X[j] * X[j + 1] + Y[j] * Y[j + 1] + Z[j] * Z[j + 1]);
    for (std::size_t j = 0; j < n; ++j) h -= hx * X[j];
  } else if (m == "heisenberg_2d") {
    const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
    if (side * side != n) throw Error(ErrorKind::range, "the square lattice needs a square number of spins");
    const double J = c("J"), hx = c("h");
    for (auto [a, b] : square_lattice_bonds(side)) h += J * (X[a] * X[b] + Y[a] * Y[b] + Z[a] * Z[b]);
    for (std::size_t j = 0; j < n; ++j) h -= hx * X[j];
  } else if (m == "topological_ising") {
    const double K = c("K"), J = c("J"), hx = c("h");
    for (std::size_t j = 0; j + 2 < n; ++j) h += K * (Z[j] * X[j + 1] * Z[j + 2]);
    for (std::size_t j = 0; j + 1 < n; ++j) h -= J * (Z[j] * Z[j + 1]);
    for (std::size_t j = 0; j < n; ++j) h -= hx * X[j];
  } else if (m == "arbitrary_gs") {
    const double jxz = c("J_xz"), jyx = c("J_yx"), hx = c("h_x"), hy = c("h_y");
    for (std::size_t j = 0; j + 1 < n; ++j) h += jxz * (X[j] * Z[j + 1]) - jyx * (Y[j] * X[j + 1]);
    for (std::size_t j = 0; j < n; ++j) h += -hx * X[j] + hy * Y[j];
  } else if (m == "arbitrary_dyn") {
    if (n != 3) throw Error(ErrorKind::range, "this Hamiltonian is defined for 3 spins");
    h = c("J_1") * (X[0] * Z[1]) + c("J_2") * (Y[0] * X[2]) - c("h_1") * Y[1] + c("h_2") * Y[2] - c("K") * (X[1] * Y[2]);
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown spin model '" + m + "'");
  }
  h.prune(Complex(0.0, 0.0));
  return h;
}

SparseOperator materialize_operator(const std::string& code, std::size_t n, const Bindings& bind,
                                    const std::string& result_name) {
  if (n == 0 || n > numerics::max_spins) throw Error(ErrorKind::range, "N must be between 1 and 12.");
  const auto ops = numerics::pauli_set(n);
  script::Interpreter in;
  for (int a = 0; a < 3; ++a) {
    std::vector<script::Value> items;
    for (const auto& o : ops[a]) items.emplace_back(o);
    in.define(a == 0 ? "Sx" : a == 1 ? "Sy" : "Sz", script::Value::list(std::move(items)));
  }
  in.define("N", script::Value(static_cast<std::int64_t>(n)));
  for (const auto& [k, v] : bind) in.define(k, script::Value(v));
  in.exec(code);
  if (!in.has(result_name)) throw Error(ErrorKind::script, "The code must define the operator " + result_name + ".");
  script::Value v = in.get(result_name);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  SparseOperator m;
  if (v.is_operator()) {
    m = *v.as<script::OperatorPtr>();
  } else if (v.is_number()) {
    m = SparseOperator(dim, dim);
    m.setIdentity();
    m *= script::to_complex(v);
  } else if (v.is_array()) {
    m = script::dense_to_operator(*v.as<script::ArrayPtr>());
  } else {
    throw Error(ErrorKind::script, result_name + " must be an operator built from Sx, Sy, Sz.");
  }
  if (m.rows() != dim || m.cols() != dim)
    throw Error(ErrorKind::shape, result_name + " has shape (" + std::to_string(m.rows()) + ", " + std::to_string(m.cols()) +
                                      "), expected (" + std::to_string(dim) + ", " + std::to_string(dim) + ").");
  return m;
}

}  // namespace sciexp::quantum
