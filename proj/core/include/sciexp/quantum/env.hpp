// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>

#include "sciexp/env/environment.hpp"
#include "sciexp/quantum/models.hpp"

namespace sciexp::quantum {

inline constexpr std::size_t score_draws = 100;
inline constexpr double draw_lo = -2.0;
inline constexpr double draw_hi = 2.0;
inline constexpr double max_duration = 1000.0;
inline constexpr std::size_t max_output_steps = 100001;
inline constexpr double bloch_tolerance = 1e-6;

/// Initial product state: controlled spins from `bloch`, the rest along +z.
numerics::QuantumState controlled_product_state(std::size_t n_spins, std::span<const std::size_t> controlled,
                                                std::span<const std::array<double, 3>> bloch);

/// Parses an [n, 3] array of unit Bloch vectors.
std::vector<std::array<double, 3>> parse_bloch(const script::Value& v, std::size_t n_rows);

class QuantumEnvironment final : public env::Environment {
 public:
  QuantumEnvironment(const catalog::SystemSpec& system, std::uint64_t seed);

  std::vector<env::ToolSpec> tools() const override;
  env::ToolOutput call(const std::string& tool, const nlohmann::json& args, const env::Bindings& memory) override;

  bool ground_state_task() const noexcept { return system_.family == catalog::Family::quantum_gs; }
  bool has_parameters() const noexcept { return !system_.tunables.empty() || system_.size_tunable; }
  std::size_t max_n() const noexcept { return system_.size_tunable ? numerics::max_spins : system_.n_spins; }

  /// Spins the agent controls and observes, in order.
  std::vector<std::size_t> accessible_spins(std::size_t n_spins) const;

  /// Executes parameter code; returns tunable bindings and the system size.
  std::pair<Bindings, std::size_t> parse_parameters(const std::string& code) const;

  /// Truth dynamics, traces shaped [N_obs][nsteps] row-major.
  numerics::SpinRecord experiment(std::span<const std::array<double, 3>> bloch, double T, double dt,
                                  const Bindings& bindings, std::size_t n_spins) const;
  /// Truth ground-state expectations of operator code snippets.
  std::vector<double> ground_state_experiment(const std::vector<std::string>& operator_codes, const Bindings& bindings,
                                              std::size_t n_spins) const;

  env::ScoreRecord evaluate(const std::string& code) const;

 private:
  const numerics::GroundState& truth_ground_state(const Bindings& bindings, std::size_t n_spins) const;
  std::vector<std::string> operator_labels(const std::string& list) const;

  std::optional<std::size_t> n_init_;
  std::map<std::string, numerics::SpinOperator> hamiltonians_;
  std::map<std::string, numerics::SparseOperator> operators_;
  std::map<std::string, std::string> experiment_operators_;
  mutable std::map<std::pair<std::size_t, std::vector<double>>, numerics::GroundState> gs_cache_;
};

}  // namespace sciexp::quantum
