// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sciexp/ndarray.hpp"

namespace sciexp::numerics {

// Basis convention: index bit (N-1-j) holds spin j (site 0 is the most
// significant tensor factor); bit value 0 is spin up (+z).

inline constexpr std::size_t max_spins = 12;

using SparseOperator = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;
using QuantumState = Eigen::VectorXcd;

enum class Axis { x, y, z };

struct SpinOperator {
  SparseOperator matrix;
  std::size_t n_spins = 0;
  bool hermitian = false;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
};

/// sigma_axis acting on `site` of an N-spin register.
SpinOperator pauli(Axis axis, std::size_t site, std::size_t n_spins);

/// All Sx[j], Sy[j], Sz[j] for j < N, indexed as [axis][site].
std::array<std::vector<SparseOperator>, 3> pauli_set(std::size_t n_spins);

/// Largest |M - M^dagger| entry.
double hermiticity_defect(const SparseOperator& m);

/// Wraps `m`, checking hermiticity with an absolute tolerance scaled by the
/// largest entry; throws ErrorKind::symmetry when the check fails.
SpinOperator make_hermitian_operator(SparseOperator m, std::size_t n_spins);

/// Infinity norm (max absolute row sum); bounds the spectral radius.
double infinity_norm(const SparseOperator& m);

/// Product state from unit Bloch vectors, one per spin.
QuantumState product_state(std::span<const std::array<double, 3>> bloch);

struct GroundState {
  double energy = 0.0;
  QuantumState state;
  /// Orthonormal basis of the (near-)degenerate lowest eigenspace; column 0 is `state`.
  Eigen::MatrixXcd subspace;
};

/// Relative energy gap below which eigenvalues count as degenerate.
inline constexpr double degeneracy_tolerance = 1e-10;

/// Lowest eigenpair(s) of a hermitian operator (dense, dimension <= 2^12).
GroundState ground_state(const SpinOperator& h);

double expectation(const SparseOperator& op, const QuantumState& psi);

/// Per-spin expectation histories; sx/sy/sz are [steps][n_spins] row-major.
struct SpinRecord {
  std::vector<double> ts;
  std::size_t n_spins = 0;
  std::vector<double> sx, sy, sz;

  std::size_t steps() const noexcept { return ts.size(); }
};

/// <sigma^a_j> for all spins, computed directly from amplitudes.
void single_spin_expectations(const QuantumState& psi, std::size_t n_spins, std::span<double> sx,
                              std::span<double> sy, std::span<double> sz);

/// Output grid length for the solver tools: int(T/dt) + 1.
std::size_t output_steps(double T, double dt);

/// Evolves psi0 under H and records single-spin expectations on the grid
/// t_i = i dt, i < int(T/dt) + 1. Internal substeps hold |rho h| <= 1 for the
/// spectral-radius bound rho; throws ErrorKind::accuracy if the norm drifts
/// by more than 1e-6.
SpinRecord evolve_state(const SpinOperator& h, const QuantumState& psi0, double T, double dt);

/// Same propagation, returning the states at the output times.
std::vector<QuantumState> evolve_states(const SpinOperator& h, const QuantumState& psi0, double T, double dt);

}  // namespace sciexp::numerics
