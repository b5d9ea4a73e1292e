// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>

#include "sciexp/catalog/catalog.hpp"
#include "sciexp/numerics/split_step.hpp"

namespace sciexp::field {

inline constexpr double experiment_T = 20.0;
inline constexpr std::size_t experiment_points = 200;
inline constexpr double max_substep = 0.01;

struct PropagatorPair {
  numerics::RealSpacePropagator potential;
  numerics::FourierSpacePropagator kinetic;
  std::string source;
};

/// Closed-form propagators for a catalog field model.
PropagatorPair make_truth(const std::string& kind, const catalog::Json& params);
inline PropagatorPair make_truth(const catalog::SystemSpec& s) { return make_truth(s.model, s.params); }

/// Propagators defined by agent code providing U_potential and U_kinetic.
PropagatorPair script_propagators(const std::string& code);

/// Evaluates agent code that sets phi0 on the standard grid (scalars broadcast).
std::vector<Complex> initial_condition(const std::string& code);

/// The shared integrator: standard grid, 200 outputs on [0, 20], substeps <= 0.01.
numerics::FieldHistory simulate(const PropagatorPair& p, std::span<const Complex> phi0);

}  // namespace sciexp::field
