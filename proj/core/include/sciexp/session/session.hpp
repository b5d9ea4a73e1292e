// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sciexp/catalog/catalog.hpp"
#include "sciexp/env/environment.hpp"
#include "sciexp/session/agent.hpp"
#include "sciexp/session/memory.hpp"
#include "sciexp/session/sandbox.hpp"

namespace sciexp::session {

enum class Status { submitted, budget_exhausted, aborted, no_submission };
std::string_view to_string(Status s) noexcept;
Status parse_status(std::string_view s);

struct CallRecord {
  std::string id;
  std::string tool;
  nlohmann::json arguments = nlohmann::json::object();
  std::string label;
  bool ok = false;
  bool executed = false;
  std::string text;  // what the agent saw
  std::string digest;  // result payload digest, empty on failure
  std::string image_digest;
};

struct StepRecord {
  std::size_t index = 0;
  std::string message;
  std::vector<CallRecord> calls;
  std::size_t remaining_steps = 0;
  std::size_t remaining_tool_calls = 0;
};

struct Conversation {
  std::string task;
  std::string profile = "paper";
  std::uint64_t seed = 0;
  catalog::Budget budget;
  nlohmann::json agent = nlohmann::json::object();
  std::vector<StepRecord> steps;
  Status status = Status::no_submission;
  std::optional<env::ScoreRecord> score;
  std::string reason;

  /// One JSON record per line: session_start, step..., final.
  std::string to_jsonl() const;
  static Conversation from_jsonl(std::string_view text);
  static Conversation load(const std::string& path);
  void save(const std::string& path) const;

  /// The log without score fields, as handed to rankers.
  nlohmann::json redacted() const;
};

struct SessionOptions {
  const SandboxClient* sandbox = nullptr;
};

inline constexpr const char* result_label_param = "result_label";

/// One environment plus memory; executes tool calls and renders results.
class Session {
 public:
  Session(catalog::TaskSpec task, std::uint64_t seed, SessionOptions options = {});

  const catalog::TaskSpec& task() const noexcept { return task_; }
  const std::vector<env::ToolSpec>& tools() const noexcept { return tools_; }
  /// JSON schemas as delivered to agents.
  nlohmann::json tool_schemas() const;

  CallRecord execute(const ToolCall& call);
  /// The image produced by the most recent call, if any.
  const std::optional<std::string>& last_image() const noexcept { return last_image_; }

  env::Environment& environment() noexcept { return *env_; }
  const MemoryStore& memory() const noexcept { return memory_; }

 private:
  script::Value run_generic(const std::string& tool, const nlohmann::json& args, std::optional<std::string>& png);

  catalog::TaskSpec task_;
  std::uint64_t seed_;
  SessionOptions options_;
  std::unique_ptr<env::Environment> env_;
  std::vector<env::ToolSpec> tools_;
  MemoryStore memory_;
  std::optional<std::string> last_image_;
};

/// Remaining-budget hint appended to the intermediate message.
std::string budget_hint(std::size_t steps, std::size_t tool_calls);

Conversation run_session(const catalog::TaskSpec& task, AgentAdapter& agent, std::uint64_t seed,
                         SessionOptions options = {});

struct ReplayReport {
  std::size_t calls = 0;
  std::vector<std::string> mismatches;
  std::optional<env::ScoreRecord> score;
  bool ok() const noexcept { return mismatches.empty(); }
};

/// Re-executes every logged call against a fresh session with the logged seed.
ReplayReport replay(const Conversation& log, const catalog::Catalog& catalog, SessionOptions options = {});

struct RankResult {
  std::optional<std::size_t> index;
  std::string error;
};

RankResult rank_conversations(const std::vector<Conversation>& conversations, AgentAdapter& ranker);

}  // namespace sciexp::session
