// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sciexp::catalog {

enum class Family { mechanical, field, quantum_gs, quantum_dyn };

enum class TaskKind {
  find_eom,
  find_eom_hidden,
  find_field_eom,
  announce_hamiltonian_gs,
  announce_hamiltonian_dyn,
};

std::string_view to_string(Family f) noexcept;
std::string_view to_string(TaskKind k) noexcept;
std::optional<Family> parse_family(std::string_view s) noexcept;

using Json = nlohmann::ordered_json;

struct Range {
  double lo = -1.0;
  double hi = 1.0;
  friend bool operator==(const Range&, const Range&) = default;
};

/// A Hamiltonian coefficient: a constant, or scale * tunable ("2*A").
struct Coefficient {
  double value = 0.0;
  std::string tunable;
  double scale = 1.0;

  bool is_tunable() const noexcept { return !tunable.empty(); }
  double at(const std::map<std::string, double>& bindings) const;
  static Coefficient parse(const Json& j);
  friend bool operator==(const Coefficient&, const Coefficient&) = default;
};

enum class MechLayout { generic, particle2d, gravity, particle_lists, hidden_1d, hidden_2d };

struct SystemSpec {
  std::string id;
  Family family = Family::mechanical;
  std::string title;
  std::vector<std::string> aliases;
  std::string model;
  Json params = Json::object();

  // mechanical
  Range coordinate_range;
  MechLayout layout = MechLayout::generic;
  std::size_t n_coords = 0;
  std::size_t n_observed = 0;  // coordinates visible to the agent
  std::vector<double> hidden_initial_conditions;  // hidden coordinates, then hidden velocities

  // quantum
  std::size_t n_spins = 0;
  std::vector<std::string> tunables;
  bool size_tunable = false;
  std::vector<std::size_t> observed_spins;  // empty: all spins observed and controlled

  std::size_t n_hidden() const noexcept { return n_coords - n_observed; }
  bool partially_observed() const noexcept { return n_observed < n_coords || !observed_spins.empty(); }

  double param(const std::string& name) const;
  std::vector<double> param_list(const std::string& name) const;
  Coefficient coefficient(const std::string& name) const;

  /// Text handed to the agent describing the system.
  std::string description() const;

  Json to_json() const;
  static SystemSpec from_json(const Json& j);
  friend bool operator==(const SystemSpec& a, const SystemSpec& b) { return a.to_json() == b.to_json(); }
};

struct Budget {
  std::size_t max_steps = 40;
  std::size_t max_tool_calls = 100;
};

struct PromptPack {
  std::string profile;
  std::string system_prompt;
  std::string intermediate_message;
  std::string task_description;
};

struct TaskSpec {
  std::string id;
  const SystemSpec* system = nullptr;
  TaskKind kind = TaskKind::find_eom;
  Budget budget;
  PromptPack prompts;
};

class Catalog {
 public:
  /// The catalog shipped with the library.
  static const Catalog& builtin();
  static Catalog parse(std::string_view text);
  static Catalog load(const std::filesystem::path& path);

  std::string serialize() const;

  const std::vector<SystemSpec>& systems() const noexcept { return systems_; }
  const SystemSpec& system(std::string_view id) const;
  const SystemSpec* find(std::string_view id_or_alias) const;

  /// Sorted by id; throws ErrorKind::not_found for an unknown profile.
  std::vector<TaskSpec> list_tasks(std::optional<Family> filter = std::nullopt,
                                   const std::string& profile = "paper") const;
  TaskSpec task(std::string_view id, const std::string& profile = "paper") const;
  std::vector<std::string> profiles() const;
  const Budget& budget() const noexcept { return budget_; }

 private:
  Json header_ = Json::object();
  Json prompts_ = Json::object();
  Json task_texts_ = Json::object();
  Budget budget_;
  std::vector<SystemSpec> systems_;
};

TaskKind task_kind_for(const SystemSpec& s) noexcept;

}  // namespace sciexp::catalog
