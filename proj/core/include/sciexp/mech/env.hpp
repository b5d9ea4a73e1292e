// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "sciexp/env/environment.hpp"
#include "sciexp/mech/models.hpp"

namespace sciexp::mech {

inline constexpr double experiment_dt = 1e-3;
inline constexpr double experiment_T = 20.0;
inline constexpr std::size_t score_samples = 1000;
inline constexpr std::size_t score_trajectories = 100;
inline constexpr double partial_score_dt = 1e-2;
inline constexpr std::size_t max_batch = 5;

/// Agent-submitted rhs (and, for partial tasks, claimed hidden initial conditions).
struct RhsSubmission {
  std::string code;
  std::vector<double> hidden_q0;
  std::vector<double> hidden_qdot0;
};

class MechEnvironment final : public env::Environment {
 public:
  MechEnvironment(const catalog::SystemSpec& system, std::uint64_t seed);

  std::vector<env::ToolSpec> tools() const override;
  env::ToolOutput call(const std::string& tool, const nlohmann::json& args, const env::Bindings& memory) override;

  /// Observed columns of the true trajectory from the observed initial
  /// conditions (coordinates then velocities); hidden ones come from the catalog.
  numerics::Trajectory observe(const std::vector<double>& observed_ic) const;

  /// Scores without finalizing; faults score 0 with a note.
  env::ScoreRecord evaluate(const RhsSubmission& sub) const;

  const Model& model() const noexcept { return model_; }
  std::string observe_doc() const;
  std::string batch_doc() const;

 private:
  std::vector<double> full_state(const std::vector<double>& observed_ic) const;
  std::vector<double> parse_observe_args(const nlohmann::json& args) const;
  std::vector<double> flatten_ic(const script::Value& ic) const;
  std::vector<std::string> arg_names() const;
  env::ScoreRecord score_full(const RhsSubmission& sub) const;
  env::ScoreRecord score_partial(const RhsSubmission& sub) const;

  Model model_;
};

}  // namespace sciexp::mech
