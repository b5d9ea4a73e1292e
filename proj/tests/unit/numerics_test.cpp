// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "sciexp/error.hpp"
#include "sciexp/numerics/rk4.hpp"
#include "sciexp/numerics/spin.hpp"
#include "sciexp/numerics/split_step.hpp"

using namespace sciexp;
using namespace sciexp::numerics;

TEST_CASE("grid_points tolerates rounding in T/dt") {
  CHECK(grid_points(1e-3, 20.0) == 20001);
  CHECK(grid_points(0.1, 0.3) == 4);
  CHECK(grid_points(0.25, 1.0) == 5);
  CHECK(output_steps(1.0, 0.1) == 11);
  CHECK(output_steps(0.0, 0.1) == 1);
}

TEST_CASE("rk4 is fourth order on exponential decay") {
  auto rhs = [](std::span<const double> X, double, std::span<const double> p, std::span<double> d) { d[0] = -p[0] * X[0]; };
  const std::vector<double> x0{1.0}, k{2.0};
  double errs[2];
  const double dts[2] = {0.1, 0.05};
  for (int i = 0; i < 2; ++i) {
    const auto tr = rk4_solve(x0, rhs, k, dts[i], 2.0);
    errs[i] = std::abs(tr.at(tr.steps() - 1, 0) - std::exp(-4.0));
  }
  const double order = std::log2(errs[0] / errs[1]);
  CHECK(order == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("rk4 uses the time argument") {
  auto rhs = [](std::span<const double>, double t, std::span<const double>, std::span<double> d) { d[0] = std::cos(t); };
  const std::vector<double> x0{0.0};
  const auto tr = rk4_solve(x0, rhs, {}, 1e-2, 3.0);
  for (std::size_t i = 0; i < tr.steps(); i += 37) CHECK(tr.at(i, 0) == doctest::Approx(std::sin(tr.ts[i])).epsilon(1e-9));
}

TEST_CASE("rk4 reports divergence") {
  auto rhs = [](std::span<const double> X, double, std::span<const double>, std::span<double> d) { d[0] = X[0] * X[0]; };
  const std::vector<double> x0{1.0};
  try {
    rk4_solve(x0, rhs, {}, 1e-2, 5.0);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::diverged);
  }
}

TEST_CASE("fft matches a direct DFT and round-trips") {
  const std::size_t n = 12;
  std::vector<Complex> in(n), out(n), back(n);
  for (std::size_t j = 0; j < n; ++j) in[j] = Complex(std::sin(0.7 * j), std::cos(1.9 * j * j));
  fft_forward(in, out);
  for (std::size_t k = 0; k < n; ++k) {
    Complex s = 0;
    for (std::size_t j = 0; j < n; ++j) s += in[j] * std::polar(1.0, -2.0 * M_PI * double(j * k) / double(n));
    CHECK(std::abs(out[k] - s) < 1e-12);
  }
  fft_inverse(out, back);
  for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(back[j] - in[j]) < 1e-13);
}

TEST_CASE("standard lattice grid") {
  const auto g = LatticeGrid::standard();
  REQUIRE(g.size() == 100);
  CHECK(g.x.front() == doctest::Approx(-5.0));
  CHECK(g.dx == doctest::Approx(0.1));
  CHECK(g.k[1] == doctest::Approx(2 * M_PI / 10.0));
  CHECK(g.k[99] == doctest::Approx(-2 * M_PI / 10.0));
  CHECK(g.k[50] == doctest::Approx(-M_PI / 0.1));
  const auto ts = uniform_times(20.0, 200);
  CHECK(ts.size() == 200);
  CHECK(ts.back() == 20.0);
  CHECK(substeps_for(ts, 0.01) * 0.01 >= ts[1] - ts[0]);
}

TEST_CASE("split-step Gaussian spreading conserves the norm") {
  const auto g = LatticeGrid::standard();
  std::vector<Complex> phi(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) phi[j] = std::exp(-g.x[j] * g.x[j] / 0.98);
  RealSpacePropagator pot = [](std::span<const Complex> p, std::span<const double>, double, double) {
    return std::vector<Complex>(p.begin(), p.end());
  };
  FourierSpacePropagator kin = [](std::span<const Complex> p, std::span<const double> k, double, double dt) {
    std::vector<Complex> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = std::exp(Complex(0, -(1 - std::cos(k[i])) * dt)) * p[i];
    return out;
  };
  const auto h = split_step_evolve(phi, pot, kin, g, uniform_times(20.0, 200), 10);
  auto n2 = [](std::span<const Complex> v) {
    double s = 0;
    for (auto z : v) s += std::norm(z);
    return s;
  };
  const double n0 = n2(h.row(0));
  double width0 = 0, width1 = 0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    width0 += std::norm(h.row(0)[j]) * g.x[j] * g.x[j];
    width1 += std::norm(h.row(199)[j]) * g.x[j] * g.x[j];
  }
  CHECK(std::abs(n2(h.row(199)) - n0) / n0 < 1e-12);
  CHECK(width1 > 2 * width0);
}

TEST_CASE("split-step rejects misbehaving propagators") {
  const auto g = LatticeGrid::standard();
  std::vector<Complex> phi(g.size(), 1.0);
  RealSpacePropagator shrink = [](std::span<const Complex> p, std::span<const double>, double, double) {
    return std::vector<Complex>(p.begin(), p.end() - 1);
  };
  RealSpacePropagator nan = [](std::span<const Complex> p, std::span<const double>, double, double) {
    return std::vector<Complex>(p.size(), Complex(NAN, 0));
  };
  FourierSpacePropagator id = [](std::span<const Complex> p, std::span<const double>, double, double) {
    return std::vector<Complex>(p.begin(), p.end());
  };
  for (const auto& bad : {shrink, nan}) {
    try {
      split_step_evolve(phi, bad, id, g, uniform_times(1.0, 5), 2);
      FAIL("expected a propagator fault");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::propagator_fault);
    }
  }
}

TEST_CASE("Pauli algebra and basis convention") {
  const auto s = pauli_set(3);
  for (int a = 0; a < 3; ++a) {
    const Eigen::MatrixXcd m = s[a][1];
    CHECK((m * m - Eigen::MatrixXcd::Identity(8, 8)).norm() < 1e-15);
  }
  const Eigen::MatrixXcd x = s[0][0], y = s[1][0], z = s[2][0];
  CHECK((x * y - Complex(0, 1) * z).norm() < 1e-15);
  // site 0 is the most significant factor: Z0 is -1 on the lower half
  CHECK(z(0, 0).real() == 1.0);
  CHECK(z(4, 4).real() == -1.0);
  CHECK(Eigen::MatrixXcd(s[2][2])(1, 1).real() == -1.0);
}

TEST_CASE("product states reproduce their Bloch vectors") {
  const std::vector<std::array<double, 3>> b{{1, 0, 0}, {0, 1, 0}, {0.6, 0, 0.8}};
  const auto psi = product_state(b);
  CHECK(psi.norm() == doctest::Approx(1.0));
  std::vector<double> sx(3), sy(3), sz(3);
  single_spin_expectations(psi, 3, sx, sy, sz);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(sx[j] == doctest::Approx(b[j][0]));
    CHECK(sy[j] == doctest::Approx(b[j][1]));
    CHECK(sz[j] == doctest::Approx(b[j][2]));
  }
  const auto s = pauli_set(3);
  CHECK(expectation(s[0][2], psi) == doctest::Approx(0.6));
}

TEST_CASE("hermiticity is enforced") {
  const auto s = pauli_set(2);
  SparseOperator bad = s[0][0] * s[1][0];
  CHECK(hermiticity_defect(bad) > 0.5);
  CHECK_THROWS_AS(make_hermitian_operator(bad, 2), Error);
  CHECK_NOTHROW(make_hermitian_operator(s[0][0] * s[0][1], 2));
}

TEST_CASE("ground state returns the degenerate subspace") {
  const auto s = pauli_set(2);
  const auto h = make_hermitian_operator(SparseOperator(-1.0 * (s[2][0] * s[2][1])), 2);
  const auto gs = ground_state(h);
  CHECK(gs.energy == doctest::Approx(-1.0));
  CHECK(gs.subspace.cols() == 2);
  const auto tfi = make_hermitian_operator(SparseOperator(-1.0 * (s[2][0] * s[2][1]) - 0.5 * (s[0][0] + s[0][1])), 2);
  const auto g2 = ground_state(tfi);
  CHECK(g2.subspace.cols() == 1);
  CHECK(g2.energy == doctest::Approx(-std::sqrt(2.0)));
  CHECK((tfi.matrix * g2.state - g2.energy * g2.state).norm() < 1e-12);
}

TEST_CASE("evolution keeps the norm and follows Larmor precession") {
  const auto s = pauli_set(1);
  const auto h = make_hermitian_operator(SparseOperator(0.5 * s[2][0]), 1);
  const std::array<double, 3> plus_x{1, 0, 0};
  const auto states = evolve_states(h, product_state(std::span(&plus_x, 1)), 4.0, 0.5);
  REQUIRE(states.size() == 9);
  for (std::size_t i = 0; i < states.size(); ++i) {
    CHECK(states[i].norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(expectation(s[0][0], states[i]) == doctest::Approx(std::cos(0.5 * double(i))).epsilon(1e-9));
  }
}
