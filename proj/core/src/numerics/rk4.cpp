// SPDX-License-Identifier: Apache-2.0
#include "sciexp/numerics/rk4.hpp"

#include <cmath>
#include <string>

#include "sciexp/error.hpp"

namespace sciexp::numerics {

std::size_t grid_points(double dt, double T) {
  return static_cast<std::size_t>(std::floor(T / dt + 1e-9)) + 1;
}

void rk4_step(std::span<double> state, double t, double dt, const VectorField& rhs,
              std::span<const double> params, std::span<double> scratch) {
  const std::size_t n = state.size();
  auto k1 = scratch.subspan(0, n);
  auto k2 = scratch.subspan(n, n);
  auto k3 = scratch.subspan(2 * n, n);
  auto k4 = scratch.subspan(3 * n, n);
  auto tmp = scratch.subspan(4 * n, n);

  rhs(state, t, params, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * dt * k1[i];
  rhs(tmp, t + 0.5 * dt, params, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * dt * k2[i];
  rhs(tmp, t + 0.5 * dt, params, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + dt * k3[i];
  rhs(tmp, t + dt, params, k4);
  for (std::size_t i = 0; i < n; ++i) {
    state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

Trajectory rk4_solve(std::span<const double> x0, const VectorField& rhs,
                     std::span<const double> params, double dt, double T) {
  if (!(dt > 0.0) || !(T > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "rk4_solve requires dt > 0 and T > 0");
  }
  const std::size_t n = x0.size();
  const std::size_t steps = grid_points(dt, T);

  Trajectory traj;
  traj.dim = n;
  traj.ts.resize(steps);
  traj.states.resize(steps * n);

  std::vector<double> state(x0.begin(), x0.end());
  std::vector<double> scratch(5 * n);
  std::copy(state.begin(), state.end(), traj.states.begin());
  traj.ts[0] = 0.0;

  for (std::size_t s = 1; s < steps; ++s) {
    const double t = static_cast<double>(s - 1) * dt;
    rk4_step(state, t, dt, rhs, params, scratch);
    for (double v : state) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::diverged, "integration diverged at step " + std::to_string(s) +
                                             " (t=" + std::to_string(static_cast<double>(s) * dt) + ")");
      }
    }
    traj.ts[s] = static_cast<double>(s) * dt;
    std::copy(state.begin(), state.end(), traj.states.begin() + static_cast<std::ptrdiff_t>(s * n));
  }
  return traj;
}

}  // namespace sciexp::numerics
