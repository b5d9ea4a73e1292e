// SPDX-License-Identifier: Apache-2.0
#include "sciexp/session/agent.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

#include "sciexp/error.hpp"
#include "session/http.hpp"

namespace sciexp::session {

using nlohmann::json;

AgentTurn parse_turn(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::transport, "agent turn must be a JSON object");
  AgentTurn t;
  if (j.contains("message") && j["message"].is_string()) t.message = j["message"].get<std::string>();
  t.stop = j.value("stop", false);
  if (j.contains("tool_calls")) {
    for (const auto& c : j["tool_calls"]) {
      ToolCall call;
      call.id = c.value("id", std::string());
      call.name = c.value("name", std::string());
      if (c.contains("arguments")) {
        const auto& a = c["arguments"];
        if (a.is_string()) {
          try {
            call.arguments = json::parse(a.get<std::string>());
          } catch (const json::exception&) {
            call.arguments = a;
          }
        } else {
          call.arguments = a;
        }
      }
      t.tool_calls.push_back(std::move(call));
    }
  }
  return t;
}

json to_json(const AgentTurn& t) {
  json calls = json::array();
  for (const auto& c : t.tool_calls) calls.push_back({{"id", c.id}, {"name", c.name}, {"arguments", c.arguments}});
  return {{"message", t.message}, {"tool_calls", calls}, {"stop", t.stop}};
}

ScriptedAgent::ScriptedAgent(json script, std::string name) : script_(std::move(script)), name_(std::move(name)) {
  if (!script_.is_object() || !script_.contains("turns") || !script_["turns"].is_array())
    throw Error(ErrorKind::invalid_argument, "agent script needs a \"turns\" array");
}

ScriptedAgent ScriptedAgent::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open agent script " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return ScriptedAgent(json::parse(ss.str()), path);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_argument, "agent script " + path + ": " + e.what());
  }
}

json ScriptedAgent::describe() const { return {{"kind", "scripted"}, {"name", name_}}; }

AgentTurn ScriptedAgent::next(const json&) {
  const auto& turns = script_["turns"];
  if (cursor_ >= turns.size()) return AgentTurn{{}, {}, true};
  return parse_turn(turns[cursor_++]);
}

std::size_t ScriptedAgent::rank(const std::vector<json>& conversations) {
  const json policy = script_.value("rank", json(0));
  if (policy.is_number_unsigned() || policy.is_number_integer()) return policy.get<std::size_t>();
  if (policy != "max_self_reported") throw Error(ErrorKind::invalid_argument, "unknown ranking policy");
  static const std::regex number(R"([-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)");
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < conversations.size(); ++i) {
    std::string last;
    for (const auto& s : conversations[i].value("steps", json::array())) {
      if (!s.value("message", std::string()).empty()) last = s["message"].get<std::string>();
    }
    double value = -std::numeric_limits<double>::infinity();
    for (auto it = std::sregex_iterator(last.begin(), last.end(), number); it != std::sregex_iterator(); ++it)
      value = std::stod(it->str());
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

RemoteAgent::RemoteAgent(std::string endpoint, std::string model, double timeout_seconds)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), timeout_(timeout_seconds) {
  split_url(endpoint_);
}

json RemoteAgent::describe() const { return {{"kind", "remote"}, {"endpoint", endpoint_}, {"model", model_}}; }

json RemoteAgent::post(const json& body) const {
  const auto [origin, path] = split_url(endpoint_);
  httplib::Client cli(origin);
  const auto secs = static_cast<time_t>(timeout_);
  cli.set_read_timeout(secs, 0);
  cli.set_write_timeout(secs, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv(api_key_env); key && *key) headers.emplace("Authorization", std::string("Bearer ") + key);
  auto res = cli.Post(path.empty() ? "/" : path, headers, body.dump(), "application/json");
  if (!res) throw Error(ErrorKind::transport, "agent endpoint unreachable (" + httplib::to_string(res.error()) + ")");
  if (res->status != 200) throw Error(ErrorKind::transport, "agent endpoint answered HTTP " + std::to_string(res->status));
  try {
    return json::parse(res->body);
  } catch (const json::exception&) {
    throw Error(ErrorKind::transport, "agent endpoint returned malformed JSON");
  }
}

AgentTurn RemoteAgent::next(const json& request) {
  json body = request;
  body["model"] = model_;
  return parse_turn(post(body));
}

std::size_t RemoteAgent::rank(const std::vector<json>& conversations) {
  const json reply = post({{"model", model_}, {"task", "rank"}, {"conversations", conversations}});
  if (!reply.contains("index") || !reply["index"].is_number_integer())
    throw Error(ErrorKind::transport, "ranking reply has no integer index");
  const auto i = reply["index"].get<std::int64_t>();
  if (i < 0) throw Error(ErrorKind::transport, "ranking reply has a negative index");
  return static_cast<std::size_t>(i);
}

}  // namespace sciexp::session
