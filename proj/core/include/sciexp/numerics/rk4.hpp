// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sciexp::numerics {

/// Generalized coordinates followed by generalized velocities.
using StateVector = std::vector<double>;

/// dX/dt = rhs(X, t, params). Writes the derivative into `dxdt`, which has the
/// same length as `state`. Must be reentrant.
using VectorField = std::function<void(std::span<const double> state, double t,
                                       std::span<const double> params, std::span<double> dxdt)>;

/// States on the uniform grid t = 0, dt, 2 dt, ... <= T, stored row-major.
struct Trajectory {
  std::vector<double> ts;
  std::vector<double> states;
  std::size_t dim = 0;

  std::size_t steps() const noexcept { return ts.size(); }
  std::span<const double> row(std::size_t i) const { return {states.data() + i * dim, dim}; }
  double at(std::size_t step, std::size_t component) const { return states[step * dim + component]; }
};

/// Number of grid points 0, dt, ..., <= T (tolerant to rounding in T/dt).
std::size_t grid_points(double dt, double T);

/// Classical fixed-step fourth-order Runge-Kutta. Throws ErrorKind::diverged
/// naming the first step that produced a non-finite state.
Trajectory rk4_solve(std::span<const double> x0, const VectorField& rhs,
                     std::span<const double> params, double dt, double T);

/// Single RK4 step in place; `scratch` must hold 5 * state.size() doubles.
void rk4_step(std::span<double> state, double t, double dt, const VectorField& rhs,
              std::span<const double> params, std::span<double> scratch);

}  // namespace sciexp::numerics
