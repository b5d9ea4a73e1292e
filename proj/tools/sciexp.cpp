// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <memory>

#include "sciexp/catalog/catalog.hpp"
#include "sciexp/error.hpp"
#include "sciexp/session/report.hpp"
#include "sciexp/session/session.hpp"

namespace {

using namespace sciexp;

std::unique_ptr<session::AgentAdapter> make_agent(const std::string& spec, const std::string& model) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
  if (kind == "scripted" && !rest.empty()) return std::make_unique<session::ScriptedAgent>(session::ScriptedAgent::load(rest));
  if (kind == "remote" && !rest.empty()) return std::make_unique<session::RemoteAgent>(rest, model);
  throw Error(ErrorKind::invalid_argument, "agent must be scripted:<script.json> or remote:<http://host:port/path>");
}

std::string file_stem(const std::string& task) {
  std::string s = task;
  for (char& c : s) {
    if (c == '/') c = '-';
  }
  return s;
}

std::string score_text(const session::Conversation& c) {
  std::string s = std::string(session::to_string(c.status));
  if (c.score) s += " score=" + std::to_string(c.score->score);
  if (!c.reason.empty()) s += " (" + c.reason + ")";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark server and harness for agentic model discovery"};
  app.require_subcommand(1);

  std::string family, profile = "paper";
  auto* list = app.add_subcommand("list", "List tasks");
  list->add_option("--family", family, "mechanical, field, quantum_gs or quantum_dyn");
  list->add_option("--profile", profile, "prompt profile");

  std::string task_id;
  auto* show = app.add_subcommand("show", "Show the agent-facing prompt and tools of a task");
  show->add_option("--task", task_id)->required();
  show->add_option("--profile", profile);

  std::string agent_spec, model, out_dir = "runs", sandbox_url;
  std::uint64_t seed = 0;
  std::size_t attempts = 1, max_steps = 0, max_calls = 0;
  auto* run = app.add_subcommand("run", "Run sessions and write conversation logs");
  run->add_option("--task", task_id, "task id, or 'all'")->required();
  run->add_option("--agent", agent_spec, "scripted:<file> or remote:<url>")->required();
  run->add_option("--model", model, "model name sent to a remote agent");
  run->add_option("--seed", seed, "seed of the first attempt");
  run->add_option("--attempts", attempts, "attempts per task (seed, seed+1, ...)");
  run->add_option("--out", out_dir, "log directory");
  run->add_option("--sandbox", sandbox_url, "analysis sandbox base URL");
  run->add_option("--profile", profile);
  run->add_option("--max-steps", max_steps, "override the step budget");
  run->add_option("--max-calls", max_calls, "override the tool-call budget");

  std::string log_path;
  bool recompute = false;
  auto* score = app.add_subcommand("score", "Print the outcome recorded in a log");
  score->add_option("--log", log_path)->required();
  score->add_flag("--recompute", recompute, "replay the log and recompute the score");
  score->add_option("--sandbox", sandbox_url);

  auto* replay = app.add_subcommand("replay", "Re-execute a log and compare every tool result");
  replay->add_option("--log", log_path)->required();
  replay->add_option("--sandbox", sandbox_url);

  std::vector<std::string> rank_logs;
  auto* rank = app.add_subcommand("rank", "Ask an agent to pick the best of several conversations");
  rank->add_option("--logs", rank_logs)->required();
  rank->add_option("--agent", agent_spec)->required();
  rank->add_option("--model", model);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Write score tables and plots for a log directory");
  report->add_option("--dir", report_dir)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto& cat = catalog::Catalog::builtin();
    std::unique_ptr<session::SandboxClient> sandbox;
    if (!sandbox_url.empty()) sandbox = std::make_unique<session::SandboxClient>(sandbox_url);
    const session::SessionOptions options{sandbox.get()};

    if (*list) {
      std::optional<catalog::Family> f;
      if (!family.empty()) {
        f = catalog::parse_family(family);
        if (!f) throw Error(ErrorKind::invalid_argument, "unknown family '" + family + "'");
      }
      for (const auto& t : cat.list_tasks(f, profile))
        std::cout << t.id << "\t" << catalog::to_string(t.kind) << "\t" << t.system->title << "\n";
      return 0;
    }
    if (*show) {
      const auto t = cat.task(task_id, profile);
      session::Session s(t, 0);
      std::cout << "# System prompt\n" << t.prompts.system_prompt << "\n\n# Task\n" << t.prompts.task_description
                << "\n\n# Tools\n";
      for (const auto& tool : s.tools()) std::cout << tool.doc << "\n\n";
      return 0;
    }
    if (*run) {
      std::vector<catalog::TaskSpec> tasks;
      if (task_id == "all") tasks = cat.list_tasks(std::nullopt, profile);
      else tasks.push_back(cat.task(task_id, profile));
      std::filesystem::create_directories(out_dir);
      int failures = 0;
      for (auto& t : tasks) {
        if (max_steps) t.budget.max_steps = max_steps;
        if (max_calls) t.budget.max_tool_calls = max_calls;
        for (std::size_t a = 0; a < attempts; ++a) {
          auto agent = make_agent(agent_spec, model);
          const std::uint64_t s = seed + a;
          const auto conv = session::run_session(t, *agent, s, options);
          const auto path = std::filesystem::path(out_dir) / (file_stem(t.id) + "_seed" + std::to_string(s) + ".jsonl");
          conv.save(path.string());
          std::cout << t.id << " seed=" << s << " " << score_text(conv) << " -> " << path.string() << "\n";
          if (conv.status == session::Status::aborted) ++failures;
        }
      }
      return failures ? 1 : 0;
    }
    if (*score) {
      const auto conv = session::Conversation::load(log_path);
      std::cout << conv.task << " seed=" << conv.seed << " " << score_text(conv) << "\n";
      if (recompute) {
        const auto rep = session::replay(conv, cat, options);
        std::cout << "recomputed: " << (rep.score ? std::to_string(rep.score->score) : std::string("no submission")) << "\n";
        return rep.ok() ? 0 : 1;
      }
      return 0;
    }
    if (*replay) {
      const auto conv = session::Conversation::load(log_path);
      const auto rep = session::replay(conv, cat, options);
      for (const auto& m : rep.mismatches) std::cout << "MISMATCH " << m << "\n";
      std::cout << (rep.ok() ? "identical" : "differs") << ": " << rep.calls << " tool calls replayed\n";
      return rep.ok() ? 0 : 1;
    }
    if (*rank) {
      std::vector<session::Conversation> convs;
      for (const auto& p : rank_logs) convs.push_back(session::Conversation::load(p));
      auto agent = make_agent(agent_spec, model);
      const auto r = session::rank_conversations(convs, *agent);
      if (!r.index) {
        std::cerr << "ranking failed: " << r.error << "\n";
        return 1;
      }
      std::cout << *r.index << "\t" << rank_logs[*r.index] << "\n";
      return 0;
    }
    if (*report) {
      for (const auto& p : session::write_report(report_dir, cat)) std::cout << p.string() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "sciexp: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
