// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>

#include "sciexp/env/environment.hpp"
#include "sciexp/field/models.hpp"

namespace sciexp::field {

inline constexpr double scoring_sigma = 0.7;

/// The fixed scoring ensemble: amplitudes {0.2, 1, 2} x momenta {0, pi/(2 dx)}.
std::vector<std::vector<Complex>> scoring_initial_conditions();

/// dphi/dt by second-order central differences, one-sided second-order at the ends.
std::vector<Complex> time_derivative(const numerics::FieldHistory& h);

class FieldEnvironment final : public env::Environment {
 public:
  FieldEnvironment(const catalog::SystemSpec& system, std::uint64_t seed);

  std::vector<env::ToolSpec> tools() const override;
  env::ToolOutput call(const std::string& tool, const nlohmann::json& args, const env::Bindings& memory) override;

  numerics::FieldHistory experiment(std::span<const Complex> phi0) const { return simulate(truth_, phi0); }
  env::ScoreRecord evaluate(const std::string& code) const;
  const PropagatorPair& truth() const noexcept { return truth_; }

 private:
  PropagatorPair truth_;
  std::map<std::string, PropagatorPair> hypotheses_;
};

}  // namespace sciexp::field
