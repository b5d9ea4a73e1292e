// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>

#include "sciexp/catalog/catalog.hpp"
#include "sciexp/numerics/rk4.hpp"

namespace sciexp::mech {

/// Ground-truth vector field over X = (coordinates, velocities).
struct Model {
  std::string kind;
  std::size_t n_coords = 0;
  numerics::VectorField rhs;

  std::size_t dim() const noexcept { return 2 * n_coords; }
};

/// Builds the model named by `kind` from a parameter object in catalog form.
Model make_model(const std::string& kind, const catalog::Json& params, std::size_t n_coords);
inline Model make_model(const catalog::SystemSpec& s) { return make_model(s.model, s.params, s.n_coords); }

}  // namespace sciexp::mech
