// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <vector>

#include "sciexp/error.hpp"
#include "sciexp/metrics.hpp"

using namespace sciexp;

TEST_CASE("r_squared is mean-centered on the reference") {
  const std::vector<double> x{1, 2, 3, 4}, y{1, 2, 3, 5};
  // 1 - 1 / 5
  CHECK(metrics::r_squared(x, y) == doctest::Approx(0.8));
  const std::vector<double> neg{-1, -2, -3, -4};
  CHECK(metrics::r_squared(x, neg) < 0.0);
  CHECK(metrics::clamp_score(metrics::r_squared(x, neg)) == 0.0);
}

TEST_CASE("r_squared rejects degenerate input") {
  const std::vector<double> c{2, 2, 2}, y{1, 2, 3}, shorter{1, 2};
  CHECK_THROWS_AS(metrics::r_squared(c, y), Error);
  CHECK_THROWS_AS(metrics::r_squared(y, shorter), Error);
}

TEST_CASE("hamiltonian_overlap ignores the trace and is scale aware") {
  const auto s = numerics::pauli_set(2);
  const numerics::SparseOperator a = s[0][0] * s[0][1];
  const numerics::SparseOperator b = s[2][0];
  numerics::SparseOperator id(4, 4);
  id.setIdentity();
  const numerics::SparseOperator shifted = a + 3.0 * id;
  CHECK(metrics::hamiltonian_overlap(a, shifted) == doctest::Approx(1.0));
  CHECK(metrics::hamiltonian_overlap(a, b) == doctest::Approx(0.0));
  const numerics::SparseOperator mix = a + b;
  CHECK(metrics::hamiltonian_overlap(a, mix) == doctest::Approx(0.5));
  CHECK(metrics::hamiltonian_overlap(mix, a) == doctest::Approx(0.5));
}

TEST_CASE("fidelity per spin") {
  Eigen::MatrixXcd up = Eigen::MatrixXcd::Zero(4, 1), down = Eigen::MatrixXcd::Zero(4, 1), plus(4, 1);
  up(0, 0) = 1;
  down(3, 0) = 1;
  plus.setConstant(0.5);
  CHECK(metrics::fidelity_per_spin(up, down, 2) == doctest::Approx(0.0));
  // |<++|00>|^2 = 1/4, per spin 1/2
  CHECK(metrics::fidelity_per_spin(up, plus, 2) == doctest::Approx(0.5));
  Eigen::MatrixXcd both(4, 2);
  both << up, down;
  CHECK(metrics::fidelity_per_spin(both, down, 2) == doctest::Approx(1.0));
}
