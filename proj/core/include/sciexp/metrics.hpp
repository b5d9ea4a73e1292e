// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <span>

#include "sciexp/numerics/spin.hpp"

namespace sciexp::metrics {

/// 1 - sum (x_i - y_i)^2 / sum (mean(x) - x_i)^2; x is the reference.
/// Throws ErrorKind::invalid_argument for constant x or mismatched lengths.
double r_squared(std::span<const double> x, std::span<const double> y);

inline double clamp_score(double s) { return s > 0.0 ? s : 0.0; }

/// tr(H'_t^dagger H'_a) / max(|H'_t|, |H'_a|)^2 with H' = H - tr(H)/d, Frobenius norms.
double hamiltonian_overlap(const numerics::SparseOperator& truth, const numerics::SparseOperator& agent);

/// max over the two (degenerate) ground spaces of |<a|t>|^(2/N).
double fidelity_per_spin(const Eigen::MatrixXcd& truth_space, const Eigen::MatrixXcd& agent_space,
                         std::size_t n_spins);

}  // namespace sciexp::metrics
