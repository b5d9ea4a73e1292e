// SPDX-License-Identifier: Apache-2.0
#include "sciexp/numerics/spin.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "sciexp/error.hpp"

namespace sciexp::numerics {

namespace {

std::size_t mask_for(std::size_t site, std::size_t n_spins) {
  return std::size_t{1} << (n_spins - 1 - site);
}

void check_spin_count(std::size_t n_spins) {
  if (n_spins < 1 || n_spins > max_spins) {
    throw Error(ErrorKind::range, "number of spins must be between 1 and " + std::to_string(max_spins) +
                                      ", got " + std::to_string(n_spins));
  }
}

bool is_real(const SparseOperator& m) {
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(m, k); it; ++it) {
      if (it.value().imag() != 0.0) return false;
    }
  }
  return true;
}

// Lowest `count` eigenpairs of a dense hermitian matrix via LAPACK's MRRR driver.
void lowest_eigenpairs(const SparseOperator& h, int count, std::vector<double>& values,
                       Eigen::MatrixXcd& vectors) {
  const int n = static_cast<int>(h.rows());
  values.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  lapack_int info = 0;

  if (is_real(h)) {
    Eigen::MatrixXd dense = Eigen::MatrixXd(Eigen::MatrixXcd(h).real());
    Eigen::MatrixXd z(n, count);
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, dense.data(), n, 0.0, 0.0, 1, count, 0.0,
                          &found, values.data(), z.data(), n, support.data());
    vectors = z.cast<Complex>();
  } else {
    Eigen::MatrixXcd dense = Eigen::MatrixXcd(h);
    Eigen::MatrixXcd z(n, count);
    info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n,
                          reinterpret_cast<lapack_complex_double*>(dense.data()), n, 0.0, 0.0, 1, count,
                          0.0, &found, values.data(), reinterpret_cast<lapack_complex_double*>(z.data()),
                          n, support.data());
    vectors = std::move(z);
  }
  if (info != 0 || found != count) {
    throw Error(ErrorKind::accuracy, "hermitian eigensolver failed (info=" + std::to_string(info) + ")");
  }
  values.resize(static_cast<std::size_t>(count));
}

void apply(const SparseOperator& h, const QuantumState& in, QuantumState& out) { out.noalias() = h * in; }

}  // namespace

SpinOperator pauli(Axis axis, std::size_t site, std::size_t n_spins) {
  check_spin_count(n_spins);
  if (site >= n_spins) {
    throw Error(ErrorKind::index, "spin index " + std::to_string(site) + " out of range for " +
                                      std::to_string(n_spins) + " spins");
  }
  const std::size_t dim = std::size_t{1} << n_spins;
  const std::size_t mask = mask_for(site, n_spins);
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    const bool down = (b & mask) != 0;
    const auto col = static_cast<Eigen::Index>(b);
    const auto flipped = static_cast<Eigen::Index>(b ^ mask);
    switch (axis) {
      case Axis::x: entries.emplace_back(flipped, col, Complex(1.0, 0.0)); break;
      case Axis::y: entries.emplace_back(flipped, col, down ? Complex(0.0, -1.0) : Complex(0.0, 1.0)); break;
      case Axis::z: entries.emplace_back(col, col, Complex(down ? -1.0 : 1.0, 0.0)); break;
    }
  }
  SpinOperator op;
  op.n_spins = n_spins;
  op.hermitian = true;
  op.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  op.matrix.setFromTriplets(entries.begin(), entries.end());
  return op;
}

std::array<std::vector<SparseOperator>, 3> pauli_set(std::size_t n_spins) {
  std::array<std::vector<SparseOperator>, 3> set;
  constexpr std::array axes{Axis::x, Axis::y, Axis::z};
  for (std::size_t a = 0; a < 3; ++a) {
    set[a].reserve(n_spins);
    for (std::size_t j = 0; j < n_spins; ++j) set[a].push_back(pauli(axes[a], j, n_spins).matrix);
  }
  return set;
}

double hermiticity_defect(const SparseOperator& m) {
  SparseOperator diff = m - SparseOperator(m.adjoint());
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

SpinOperator make_hermitian_operator(SparseOperator m, std::size_t n_spins) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::shape, "operator must be square, got " + std::to_string(m.rows()) + "x" +
                                      std::to_string(m.cols()));
  }
  if (static_cast<std::size_t>(m.rows()) != (std::size_t{1} << n_spins)) {
    throw Error(ErrorKind::shape, "operator dimension " + std::to_string(m.rows()) + " does not match " +
                                      std::to_string(n_spins) + " spins");
  }
  double scale = 1.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(m, k); it; ++it) {
      if (!std::isfinite(it.value().real()) || !std::isfinite(it.value().imag())) {
        throw Error(ErrorKind::invalid_argument, "operator has non-finite entries");
      }
      scale = std::max(scale, std::abs(it.value()));
    }
  }
  const double defect = hermiticity_defect(m);
  if (defect > 1e-12 * scale) {
    throw Error(ErrorKind::symmetry, "operator is not Hermitian (max |M - M^dagger| = " +
                                         std::to_string(defect) + ")");
  }
  SpinOperator op;
  op.matrix = std::move(m);
  op.matrix.makeCompressed();
  op.n_spins = n_spins;
  op.hermitian = true;
  return op;
}

double infinity_norm(const SparseOperator& m) {
  std::vector<double> row_sums(static_cast<std::size_t>(m.rows()), 0.0);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(m, k); it; ++it) {
      row_sums[static_cast<std::size_t>(it.row())] += std::abs(it.value());
    }
  }
  return row_sums.empty() ? 0.0 : *std::max_element(row_sums.begin(), row_sums.end());
}

QuantumState product_state(std::span<const std::array<double, 3>> bloch) {
  check_spin_count(bloch.size());
  QuantumState psi = QuantumState::Ones(1);
  for (const auto& v : bloch) {
    const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (std::abs(norm - 1.0) > 1e-6) {
      throw Error(ErrorKind::normalization, "Bloch vector is not normalized (norm " + std::to_string(norm) + ")");
    }
    const double theta = std::acos(std::clamp(v[2] / norm, -1.0, 1.0));
    const double phi = std::atan2(v[1], v[0]);
    Eigen::Vector2cd spin(std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi));
    QuantumState next(psi.size() * 2);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      next(2 * i) = psi(i) * spin(0);
      next(2 * i + 1) = psi(i) * spin(1);
    }
    psi = std::move(next);
  }
  return psi;
}

GroundState ground_state(const SpinOperator& h) {
  if (h.matrix.rows() != h.matrix.cols()) throw Error(ErrorKind::shape, "Hamiltonian must be square");
  if (static_cast<std::size_t>(h.matrix.rows()) > (std::size_t{1} << max_spins)) {
    throw Error(ErrorKind::range, "Hamiltonian dimension exceeds 2^12");
  }
  const double defect = hermiticity_defect(h.matrix);
  if (defect > 1e-12 * std::max(1.0, infinity_norm(h.matrix))) {
    throw Error(ErrorKind::symmetry, "Hamiltonian is not Hermitian (max |H - H^dagger| = " +
                                         std::to_string(defect) + ")");
  }
  const int n = static_cast<int>(h.matrix.rows());
  int count = std::min(n, 4);
  std::vector<double> values;
  Eigen::MatrixXcd vectors;
  for (;;) {
    lowest_eigenpairs(h.matrix, count, values, vectors);
    const double threshold = degeneracy_tolerance * std::max(1.0, std::abs(values[0]));
    if (count == n || values.back() - values[0] > threshold) break;
    count = std::min(n, count * 2);
  }
  const double threshold = degeneracy_tolerance * std::max(1.0, std::abs(values[0]));
  Eigen::Index degenerate = 1;
  while (degenerate < static_cast<Eigen::Index>(values.size()) &&
         values[static_cast<std::size_t>(degenerate)] - values[0] <= threshold) {
    ++degenerate;
  }
  GroundState gs;
  gs.energy = values[0];
  gs.subspace = vectors.leftCols(degenerate);
  gs.state = gs.subspace.col(0);
  gs.state.normalize();
  return gs;
}

double expectation(const SparseOperator& op, const QuantumState& psi) {
  return psi.dot(op * psi).real();
}

void single_spin_expectations(const QuantumState& psi, std::size_t n_spins, std::span<double> sx,
                              std::span<double> sy, std::span<double> sz) {
  const std::size_t dim = static_cast<std::size_t>(psi.size());
  for (std::size_t j = 0; j < n_spins; ++j) {
    const std::size_t mask = mask_for(j, n_spins);
    double x = 0.0, y = 0.0, z = 0.0;
    for (std::size_t b = 0; b < dim; ++b) {
      if (b & mask) continue;
      const Complex up = psi(static_cast<Eigen::Index>(b));
      const Complex down = psi(static_cast<Eigen::Index>(b | mask));
      const Complex cross = std::conj(down) * up;
      x += 2.0 * cross.real();
      y -= 2.0 * cross.imag();
      z += std::norm(up) - std::norm(down);
    }
    sx[j] = x;
    sy[j] = y;
    sz[j] = z;
  }
}

std::size_t output_steps(double T, double dt) {
  if (!(dt > 0.0) || !(T >= 0.0)) {
    throw Error(ErrorKind::invalid_argument, "time grid needs dt > 0 and T >= 0");
  }
  return static_cast<std::size_t>(T / dt) + 1;
}

std::vector<QuantumState> evolve_states(const SpinOperator& h, const QuantumState& psi0, double T, double dt) {
  if (h.matrix.rows() != psi0.size()) {
    throw Error(ErrorKind::shape, "state dimension does not match the Hamiltonian");
  }
  if (hermiticity_defect(h.matrix) > 1e-12 * std::max(1.0, infinity_norm(h.matrix))) {
    throw Error(ErrorKind::symmetry, "Hamiltonian is not Hermitian");
  }
  const std::size_t steps = output_steps(T, dt);
  const double rho = infinity_norm(h.matrix);
  const auto substeps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(rho * dt)));
  const double step = dt / static_cast<double>(substeps);
  const Complex factor(0.0, -step);
  const double norm0 = psi0.norm();

  std::vector<QuantumState> states;
  states.reserve(steps);
  states.push_back(psi0);
  QuantumState psi = psi0;
  QuantumState term(psi.size()), next(psi.size());
  for (std::size_t i = 1; i < steps; ++i) {
    for (std::size_t s = 0; s < substeps; ++s) {
      // exp(-i H h) psi as a Taylor series; rho h <= 1 keeps the terms decreasing.
      term = psi;
      QuantumState acc = psi;
      for (int k = 1; k <= 60; ++k) {
        apply(h.matrix, term, next);
        term = next * (factor / static_cast<double>(k));
        acc += term;
        if (term.norm() <= 1e-17 * acc.norm()) break;
      }
      psi = std::move(acc);
    }
    if (std::abs(psi.norm() - norm0) > 1e-6) {
      throw Error(ErrorKind::accuracy, "state norm drifted beyond 1e-6 at output step " + std::to_string(i));
    }
    states.push_back(psi);
  }
  return states;
}

SpinRecord evolve_state(const SpinOperator& h, const QuantumState& psi0, double T, double dt) {
  const auto states = evolve_states(h, psi0, T, dt);
  std::size_t n_spins = 0;
  while ((std::size_t{1} << n_spins) < static_cast<std::size_t>(psi0.size())) ++n_spins;

  SpinRecord rec;
  rec.n_spins = n_spins;
  rec.ts.resize(states.size());
  rec.sx.resize(states.size() * n_spins);
  rec.sy.resize(states.size() * n_spins);
  rec.sz.resize(states.size() * n_spins);
  for (std::size_t i = 0; i < states.size(); ++i) {
    rec.ts[i] = static_cast<double>(i) * dt;
    single_spin_expectations(states[i], n_spins, std::span(rec.sx).subspan(i * n_spins, n_spins),
                             std::span(rec.sy).subspan(i * n_spins, n_spins),
                             std::span(rec.sz).subspan(i * n_spins, n_spins));
  }
  return rec;
}

}  // namespace sciexp::numerics
