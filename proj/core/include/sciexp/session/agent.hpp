// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sciexp::session {

struct ToolCall {
  std::string id;
  std::string name;
  nlohmann::json arguments = nlohmann::json::object();
};

struct AgentTurn {
  std::string message;
  std::vector<ToolCall> tool_calls;
  bool stop = false;
};

/// Request shape handed to agents:
///   {"system": str, "tools": [schema], "messages": [message]}
/// with messages {"role": "user"|"assistant"|"tool", "content", ...}; tool
/// messages carry "tool_call_id" and optionally "image" (base64 PNG).
class AgentAdapter {
 public:
  virtual ~AgentAdapter() = default;
  /// Descriptor written to the log; never contains credentials.
  virtual nlohmann::json describe() const = 0;
  virtual AgentTurn next(const nlohmann::json& request) = 0;
  /// Picks the best of several redacted conversation logs.
  virtual std::size_t rank(const std::vector<nlohmann::json>& conversations) = 0;
};

AgentTurn parse_turn(const nlohmann::json& j);
nlohmann::json to_json(const AgentTurn& t);

/// Replays a fixed script:
///   {"turns": [{"message", "tool_calls": [{"name", "arguments"}]}], "rank": int | "max_self_reported"}
/// After the last turn it stops. "max_self_reported" picks the conversation
/// whose final assistant message ends with the largest number.
class ScriptedAgent final : public AgentAdapter {
 public:
  explicit ScriptedAgent(nlohmann::json script, std::string name = "scripted");
  static ScriptedAgent load(const std::string& path);

  nlohmann::json describe() const override;
  AgentTurn next(const nlohmann::json& request) override;
  std::size_t rank(const std::vector<nlohmann::json>& conversations) override;

 private:
  nlohmann::json script_;
  std::string name_;
  std::size_t cursor_ = 0;
};

/// Agent backed by a callback; used by harness code and tests.
class CallbackAgent final : public AgentAdapter {
 public:
  using Fn = std::function<AgentTurn(const nlohmann::json&)>;
  explicit CallbackAgent(Fn fn, std::string name = "callback") : fn_(std::move(fn)), name_(std::move(name)) {}

  nlohmann::json describe() const override { return {{"kind", "callback"}, {"name", name_}}; }
  AgentTurn next(const nlohmann::json& request) override { return fn_(request); }
  std::size_t rank(const std::vector<nlohmann::json>&) override { return 0; }

 private:
  Fn fn_;
  std::string name_;
};

inline constexpr const char* api_key_env = "SCIEXP_API_KEY";

/// HTTP adapter: POSTs the request (plus "model") to `endpoint` and expects
/// {"message", "tool_calls": [{"id", "name", "arguments"}], "stop"}. Ranking
/// posts {"model", "task": "rank", "conversations"} and expects {"index"}.
/// Sends "Authorization: Bearer $SCIEXP_API_KEY" when the variable is set.
class RemoteAgent final : public AgentAdapter {
 public:
  RemoteAgent(std::string endpoint, std::string model, double timeout_seconds = 600.0);

  nlohmann::json describe() const override;
  AgentTurn next(const nlohmann::json& request) override;
  std::size_t rank(const std::vector<nlohmann::json>& conversations) override;

 private:
  nlohmann::json post(const nlohmann::json& body) const;

  std::string endpoint_;
  std::string model_;
  double timeout_;
};

}  // namespace sciexp::session
