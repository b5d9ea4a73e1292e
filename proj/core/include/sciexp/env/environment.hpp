// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sciexp/catalog/catalog.hpp"
#include "sciexp/script/value.hpp"

namespace sciexp::env {

enum class ToolRole { experiment, analysis, submission };

struct ToolParam {
  std::string name;
  std::string type;  // "string", "number", "integer", "array"
  std::string description;
};

struct ToolSpec {
  std::string name;
  std::string doc;  // shown to the agent verbatim
  std::vector<ToolParam> params;
  ToolRole role = ToolRole::analysis;
};

/// Memory contents visible to agent code, in registration order.
using Bindings = std::vector<std::pair<std::string, script::Value>>;

struct ToolOutput {
  script::Value value;
  std::optional<std::string> png;
};

struct ScoreRecord {
  double score = 0.0;
  std::vector<std::string> notes;
  nlohmann::json detail = nlohmann::json::object();
};

/// Uniform doubles from a 64-bit Mersenne Twister with a fixed mapping, so
/// scores are identical across standard libraries.
class ScoreRng {
 public:
  explicit ScoreRng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(gen_() >> 11) * 0x1.0p-53); }

 private:
  std::mt19937_64 gen_;
};

class Environment {
 public:
  Environment(const catalog::SystemSpec& system, std::uint64_t seed) : system_(system), seed_(seed) {}
  virtual ~Environment() = default;

  const catalog::SystemSpec& system() const noexcept { return system_; }
  std::uint64_t seed() const noexcept { return seed_; }

  virtual std::vector<ToolSpec> tools() const = 0;

  /// Runs a tool. Failures throw sciexp::Error; the message is agent-visible.
  virtual ToolOutput call(const std::string& tool, const nlohmann::json& args, const Bindings& memory) = 0;

  bool finalized() const noexcept { return score_.has_value(); }
  const std::optional<ScoreRecord>& score() const noexcept { return score_; }

 protected:
  void finalize(ScoreRecord r);
  void require_open() const;

  const catalog::SystemSpec& system_;
  std::uint64_t seed_;

 private:
  std::optional<ScoreRecord> score_;
};

std::unique_ptr<Environment> make_environment(const catalog::SystemSpec& system, std::uint64_t seed);

// Argument helpers shared by the environments.
const nlohmann::json& arg(const nlohmann::json& args, const std::string& name);
double number_arg(const nlohmann::json& args, const std::string& name);
std::string string_arg(const nlohmann::json& args, const std::string& name);
/// JSON array, or an expression string evaluated against memory.
script::Value value_arg(const nlohmann::json& args, const std::string& name, const Bindings& memory);
void reject_unknown_args(const nlohmann::json& args, const ToolSpec& spec);

script::Value make_dict(std::vector<std::pair<std::string, script::Value>> items);
script::Value real_array(Shape shape, std::span<const double> values);
/// Real entries of a number, list, or array (imaginary parts must vanish).
std::vector<double> real_values(const script::Value& v, const std::string& what);

/// Default message returned by the save tools.
inline constexpr const char* saved_message = "The prediction has been saved.";

}  // namespace sciexp::env
