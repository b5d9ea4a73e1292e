// SPDX-License-Identifier: Apache-2.0
#include "sciexp/session/session.hpp"

#include <httplib.h>

#include <fstream>
#include <sstream>

#include "sciexp/error.hpp"
#include "sciexp/script/ops.hpp"
#include "sciexp/session/payload.hpp"
#include "sciexp/session/tools.hpp"

namespace sciexp::session {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json schema_type(const std::string& t) {
  if (t == "array") return json::array({"array", "string"});
  return t;
}

ordered_json ordered(const json& j) { return ordered_json::parse(j.dump()); }
json plain(const ordered_json& j) { return json::parse(j.dump()); }

ordered_json call_json(const CallRecord& c) {
  return {{"id", c.id},       {"tool", c.tool},         {"arguments", ordered(c.arguments)},
          {"label", c.label}, {"executed", c.executed}, {"ok", c.ok},
          {"text", c.text},   {"digest", c.digest},     {"image_digest", c.image_digest}};
}

CallRecord call_from(const ordered_json& j) {
  CallRecord c;
  c.id = j.at("id").get<std::string>();
  c.tool = j.at("tool").get<std::string>();
  c.arguments = plain(j.at("arguments"));
  c.label = j.at("label").get<std::string>();
  c.executed = j.at("executed").get<bool>();
  c.ok = j.at("ok").get<bool>();
  c.text = j.at("text").get<std::string>();
  c.digest = j.at("digest").get<std::string>();
  c.image_digest = j.at("image_digest").get<std::string>();
  return c;
}

ordered_json score_json(const env::ScoreRecord& s) {
  return {{"score", s.score}, {"notes", s.notes}, {"detail", ordered(s.detail)}};
}

}  // namespace

std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::submitted: return "submitted";
    case Status::budget_exhausted: return "budget_exhausted";
    case Status::aborted: return "aborted";
    case Status::no_submission: return "no_submission";
  }
  return "unknown";
}

Status parse_status(std::string_view s) {
  for (Status x : {Status::submitted, Status::budget_exhausted, Status::aborted, Status::no_submission}) {
    if (to_string(x) == s) return x;
  }
  throw Error(ErrorKind::invalid_argument, "unknown session status '" + std::string(s) + "'");
}

std::string Conversation::to_jsonl() const {
  std::string out;
  const ordered_json start = {{"record", "session_start"},
                              {"format", "sciexp-log"},
                              {"version", 1},
                              {"task", task},
                              {"profile", profile},
                              {"seed", seed},
                              {"budget", {{"max_steps", budget.max_steps}, {"max_tool_calls", budget.max_tool_calls}}},
                              {"agent", ordered(agent)}};
  out += start.dump() + "\n";
  for (const auto& s : steps) {
    ordered_json calls = ordered_json::array();
    for (const auto& c : s.calls) calls.push_back(call_json(c));
    const ordered_json rec = {{"record", "step"},
                              {"index", s.index},
                              {"message", s.message},
                              {"calls", calls},
                              {"remaining", {{"steps", s.remaining_steps}, {"tool_calls", s.remaining_tool_calls}}}};
    out += rec.dump() + "\n";
  }
  const ordered_json fin = {{"record", "final"},
                            {"status", std::string(to_string(status))},
                            {"reason", reason},
                            {"score", score ? score_json(*score) : ordered_json(nullptr)}};
  out += fin.dump() + "\n";
  return out;
}

Conversation Conversation::from_jsonl(std::string_view text) {
  Conversation c;
  bool started = false, finished = false;
  std::istringstream in{std::string(text)};
  std::string line;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = ordered_json::parse(line);
      const auto kind = j.at("record").get<std::string>();
      if (kind == "session_start") {
        if (j.at("format") != "sciexp-log" || j.at("version") != 1) throw Error(ErrorKind::io, "unsupported log format");
        c.task = j.at("task").get<std::string>();
        c.profile = j.at("profile").get<std::string>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.budget.max_steps = j.at("budget").at("max_steps").get<std::size_t>();
        c.budget.max_tool_calls = j.at("budget").at("max_tool_calls").get<std::size_t>();
        c.agent = plain(j.at("agent"));
        started = true;
      } else if (kind == "step") {
        StepRecord s;
        s.index = j.at("index").get<std::size_t>();
        s.message = j.at("message").get<std::string>();
        for (const auto& cj : j.at("calls")) s.calls.push_back(call_from(cj));
        s.remaining_steps = j.at("remaining").at("steps").get<std::size_t>();
        s.remaining_tool_calls = j.at("remaining").at("tool_calls").get<std::size_t>();
        c.steps.push_back(std::move(s));
      } else if (kind == "final") {
        c.status = parse_status(j.at("status").get<std::string>());
        c.reason = j.at("reason").get<std::string>();
        if (!j.at("score").is_null()) {
          env::ScoreRecord s;
          s.score = j["score"].at("score").get<double>();
          s.notes = j["score"].at("notes").get<std::vector<std::string>>();
          s.detail = plain(j["score"].at("detail"));
          c.score = std::move(s);
        }
        finished = true;
      } else {
        throw Error(ErrorKind::io, "unknown log record '" + kind + "'");
      }
    }
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorKind::io, std::string("malformed conversation log: ") + e.what());
  }
  if (!started || !finished) throw Error(ErrorKind::io, "conversation log is incomplete");
  return c;
}

Conversation Conversation::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open log " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_jsonl(ss.str());
}

void Conversation::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write log " + path);
  out << to_jsonl();
}

json Conversation::redacted() const {
  json s = json::array();
  for (const auto& st : steps) {
    json calls = json::array();
    for (const auto& c : st.calls) calls.push_back({{"tool", c.tool}, {"arguments", c.arguments}, {"text", c.text}});
    s.push_back({{"index", st.index}, {"message", st.message}, {"calls", calls}});
  }
  return {{"task", task}, {"steps", s}, {"status", std::string(to_string(status))}};
}

Session::Session(catalog::TaskSpec task, std::uint64_t seed, SessionOptions options)
    : task_(std::move(task)), seed_(seed), options_(options) {
  if (!task_.system) throw Error(ErrorKind::invalid_argument, "task has no system");
  env_ = env::make_environment(*task_.system, seed_);
  tools_ = env_->tools();
  for (auto& t : generic_tools(task_.system->family == catalog::Family::mechanical)) tools_.push_back(std::move(t));
  for (auto& t : tools_) {
    if (t.role != env::ToolRole::submission)
      t.params.push_back({result_label_param, "string", "label under which the result is saved"});
  }
}

json Session::tool_schemas() const {
  json out = json::array();
  for (const auto& t : tools_) {
    json props = json::object();
    json required = json::array();
    for (const auto& p : t.params) {
      props[p.name] = {{"type", schema_type(p.type)}, {"description", p.description}};
      required.push_back(p.name);
    }
    out.push_back({{"name", t.name},
                   {"description", t.doc},
                   {"parameters", {{"type", "object"}, {"properties", props}, {"required", required}}}});
  }
  return out;
}

script::Value Session::run_generic(const std::string& tool, const json& args, std::optional<std::string>& png) {
  const bool mech = task_.system->family == catalog::Family::mechanical;
  if (tool == "approx_equal") {
    const auto a1 = script::to_array(env::value_arg(args, "a1", memory_.bindings()));
    const auto a2 = script::to_array(env::value_arg(args, "a2", memory_.bindings()));
    const Closeness c = approx_equal(a1, a2);
    return env::make_dict({{"statement", script::Value(c.statement)}, {"ratio", script::Value(c.ratio)}});
  }
  if (tool == "execute_code") {
    const std::string code = env::string_arg(args, "code");
    if (options_.sandbox) return options_.sandbox->execute(code, memory_.bindings(), mech);
    return execute_locally(code, memory_.bindings(), mech);
  }
  if (tool == "plot_from_code") {
    if (!options_.sandbox)
      throw Error(ErrorKind::sandbox, "Plotting is unavailable because no analysis sandbox is configured.");
    png = options_.sandbox->plot(env::string_arg(args, "code"), memory_.bindings());
    return script::Value();
  }
  throw Error(ErrorKind::not_found, "Unknown tool '" + tool + "'.");
}

CallRecord Session::execute(const ToolCall& call) {
  CallRecord rec;
  rec.id = call.id;
  rec.tool = call.name;
  rec.arguments = call.arguments;
  rec.executed = true;
  last_image_.reset();
  try {
    const env::ToolSpec* spec = nullptr;
    for (const auto& t : tools_) {
      if (t.name == call.name) spec = &t;
    }
    if (!spec) throw Error(ErrorKind::not_found, "Unknown tool '" + call.name + "'.");
    if (!call.arguments.is_object()) throw Error(ErrorKind::signature, "Tool arguments must be a JSON object.");
    env::reject_unknown_args(call.arguments, *spec);
    json args = call.arguments;
    if (spec->role != env::ToolRole::submission) {
      rec.label = env::string_arg(args, result_label_param);
      memory_.check_label(rec.label);
      args.erase(result_label_param);
    }
    std::optional<std::string> png;
    script::Value value;
    if (call.name == "approx_equal" || call.name == "execute_code" || call.name == "plot_from_code") {
      value = run_generic(call.name, args, png);
    } else {
      auto out = env_->call(call.name, args, memory_.bindings());
      value = std::move(out.value);
      png = std::move(out.png);
    }
    if (spec->role == env::ToolRole::submission) {
      rec.text = script::str(value);
      rec.digest = digest_hex(value);
    } else if (png) {
      rec.image_digest = hex64(fnv1a(*png));
      memory_.add_image(rec.label, *png, call.name, call.id);
      rec.text = "The image was saved under the label '" + rec.label + "'.";
      last_image_ = std::move(png);
    } else {
      rec.digest = digest_hex(value);
      rec.text = "Result saved under the label '" + rec.label + "': " + summarize(value);
      memory_.add({rec.label, std::move(value), call.name, call.id});
    }
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.digest.clear();
    rec.text = std::string("Error: ") + e.what();
  }
  return rec;
}

std::string budget_hint(std::size_t steps, std::size_t tool_calls) {
  return "Remaining budget: " + std::to_string(steps) + " conversation steps and " + std::to_string(tool_calls) +
         " tool calls.";
}

Conversation run_session(const catalog::TaskSpec& task, AgentAdapter& agent, std::uint64_t seed, SessionOptions options) {
  Conversation conv;
  conv.task = task.id;
  conv.profile = task.prompts.profile;
  conv.seed = seed;
  conv.budget = task.budget;
  conv.agent = agent.describe();

  Session s(task, seed, options);
  json request = {{"system", task.prompts.system_prompt},
                  {"tools", s.tool_schemas()},
                  {"messages", json::array({{{"role", "user"}, {"content", task.prompts.task_description}}})}};
  auto& messages = request["messages"];
  std::size_t steps_left = task.budget.max_steps;
  std::size_t calls_left = task.budget.max_tool_calls;

  for (;;) {
    if (steps_left == 0) {
      conv.status = Status::budget_exhausted;
      break;
    }
    AgentTurn turn;
    try {
      turn = agent.next(request);
    } catch (const std::exception& e) {
      conv.status = Status::aborted;
      conv.reason = e.what();
      break;
    }
    --steps_left;
    StepRecord step;
    step.index = conv.steps.size();
    step.message = turn.message;
    for (std::size_t k = 0; k < turn.tool_calls.size(); ++k) {
      if (turn.tool_calls[k].id.empty())
        turn.tool_calls[k].id = "call_" + std::to_string(step.index) + "_" + std::to_string(k);
    }
    json assistant = {{"role", "assistant"}, {"content", turn.message}, {"tool_calls", json::array()}};
    for (const auto& c : turn.tool_calls)
      assistant["tool_calls"].push_back({{"id", c.id}, {"name", c.name}, {"arguments", c.arguments}});
    messages.push_back(std::move(assistant));

    for (const auto& call : turn.tool_calls) {
      if (s.environment().finalized()) break;
      CallRecord rec;
      std::optional<std::string> image;
      if (calls_left == 0) {
        rec.id = call.id;
        rec.tool = call.name;
        rec.arguments = call.arguments;
        rec.text = "Error: The tool call budget is exhausted.";
      } else {
        --calls_left;
        rec = s.execute(call);
        image = s.last_image();
      }
      json msg = {{"role", "tool"}, {"tool_call_id", rec.id}, {"content", rec.text}};
      if (image) msg["image"] = httplib::detail::base64_encode(*image);
      messages.push_back(std::move(msg));
      step.calls.push_back(std::move(rec));
    }
    step.remaining_steps = steps_left;
    step.remaining_tool_calls = calls_left;
    conv.steps.push_back(std::move(step));

    if (s.environment().finalized()) {
      conv.status = Status::submitted;
      break;
    }
    if (calls_left == 0) {
      conv.status = Status::budget_exhausted;
      break;
    }
    if (turn.stop) {
      conv.status = Status::no_submission;
      break;
    }
    messages.push_back({{"role", "user"},
                        {"content", task.prompts.intermediate_message + "\n" + budget_hint(steps_left, calls_left)}});
  }
  if (s.environment().finalized()) conv.score = *s.environment().score();
  return conv;
}

ReplayReport replay(const Conversation& log, const catalog::Catalog& catalog, SessionOptions options) {
  catalog::TaskSpec task = catalog.task(log.task, log.profile);
  task.budget = log.budget;
  Session s(task, log.seed, options);
  ReplayReport rep;
  for (const auto& step : log.steps) {
    for (const auto& c : step.calls) {
      if (!c.executed) continue;
      ++rep.calls;
      const CallRecord r = s.execute(ToolCall{c.id, c.tool, c.arguments});
      const std::string where = "step " + std::to_string(step.index) + " call " + c.id + ": ";
      if (r.ok != c.ok) rep.mismatches.push_back(where + "status differs");
      if (r.text != c.text) rep.mismatches.push_back(where + "agent-visible text differs");
      if (r.digest != c.digest) rep.mismatches.push_back(where + "result digest differs");
      if (r.image_digest != c.image_digest) rep.mismatches.push_back(where + "image digest differs");
    }
  }
  if (s.environment().finalized()) rep.score = *s.environment().score();
  if (log.score.has_value() != rep.score.has_value()) {
    rep.mismatches.push_back("submission outcome differs");
  } else if (log.score && ordered(log.score->detail).dump() != ordered(rep.score->detail).dump()) {
    rep.mismatches.push_back("score detail differs");
  } else if (log.score && log.score->score != rep.score->score) {
    rep.mismatches.push_back("score differs");
  }
  return rep;
}

RankResult rank_conversations(const std::vector<Conversation>& conversations, AgentAdapter& ranker) {
  RankResult r;
  if (conversations.size() < 2) {
    r.error = "ranking needs at least two conversations";
    return r;
  }
  for (const auto& c : conversations) {
    if (c.task != conversations.front().task) {
      r.error = "conversations belong to different tasks";
      return r;
    }
  }
  std::vector<json> logs;
  for (const auto& c : conversations) logs.push_back(c.redacted());
  try {
    const std::size_t i = ranker.rank(logs);
    if (i >= conversations.size()) r.error = "ranker returned an out-of-range index";
    else r.index = i;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace sciexp::session
