// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "sciexp/catalog/catalog.hpp"
#include "sciexp/error.hpp"
#include "sciexp/script/ops.hpp"
#include "sciexp/session/memory.hpp"
#include "sciexp/session/payload.hpp"
#include "sciexp/session/report.hpp"
#include "sciexp/session/session.hpp"
#include "sciexp/session/tools.hpp"
#include "support/plans.hpp"
#include "support/truth.hpp"

using namespace sciexp;
using namespace sciexp::session;
using nlohmann::json;

namespace {

const catalog::Catalog& cat() { return catalog::Catalog::builtin(); }

script::Value dict(std::vector<std::pair<std::string, script::Value>> items) {
  script::Value d = script::Value::dict();
  for (auto& [k, v] : items) d.as<std::shared_ptr<script::DictObj>>()->set(k, v);
  return d;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("sciexp_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("payload round-trips arrays, complex values and non-finite floats") {
  const std::vector<Complex> z{{1, 2}, {-0.5, 0}, {std::numeric_limits<double>::infinity(), 0}, {NAN, 1}};
  const script::Value v = dict({{"a", script::Value(NdArray::from_complex({2, 2}, z))},
                                {"n", script::Value(3.25)},
                                {"s", script::Value("text")},
                                {"l", script::Value::list({script::Value(1), script::Value(true)})}});
  const json enc = encode(v);
  const json arr = encode(script::Value(NdArray::from_complex({2, 2}, z)));
  CHECK(arr.at("__array__").at("shape") == json::array({2, 2}));
  CHECK(arr.at("__array__").at("dtype") == "complex128");
  CHECK(arr.at("__array__").at("data")[2][0] == "inf");
  CHECK(arr.at("__array__").at("data")[3][0] == "nan");
  const script::Value back = decode(enc);
  CHECK(encode(back).dump() == enc.dump());
  CHECK(digest_hex(back) == digest_hex(v));
  CHECK(digest_hex(v).size() == 16);
  CHECK(fnv1a("") == 1469598103934665603ull);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("summaries list small arrays and describe large ones") {
  std::vector<double> small{1, 2, 3}, large(50, 0.0);
  CHECK(summarize(script::Value(NdArray::from_real(small))).find("array of shape") == std::string::npos);
  CHECK(summarize(script::Value(NdArray::from_real(large))).find("array of shape [50]") != std::string::npos);
}

TEST_CASE("approx_equal buckets") {
  std::vector<double> a(100), b(100), c(100), d(100);
  for (int i = 0; i < 100; ++i) {
    a[i] = std::sin(0.1 * i);
    b[i] = a[i] * (1 + 1e-5);
    c[i] = a[i] + 0.02 * std::cos(3.0 * i);
    d[i] = -a[i];
  }
  auto A = NdArray::from_real(a);
  CHECK(approx_equal(A, NdArray::from_real(b)).statement == "The arrays are almost precisely equal.");
  CHECK(approx_equal(A, NdArray::from_real(c)).statement == "The arrays are approximately equal.");
  CHECK(approx_equal(A, NdArray::from_real(d)).statement == "The arrays are significantly different.");
  CHECK(approx_equal(A, NdArray::from_real(d)).ratio > 3.0);
  CHECK_THROWS_AS(approx_equal(A, NdArray::from_real(std::vector<double>{1, 2})), Error);
}

TEST_CASE("memory labels are identifiers, unique and not reserved") {
  MemoryStore m;
  CHECK(MemoryStore::valid_label("run_1"));
  CHECK_FALSE(MemoryStore::valid_label("1run"));
  CHECK_FALSE(MemoryStore::valid_label("a-b"));
  CHECK_THROWS_AS(m.check_label("jnp"), Error);
  CHECK_THROWS_AS(m.check_label("result"), Error);
  m.add({"x", script::Value(1.0), "execute_code", "c1"});
  CHECK_THROWS_AS(m.check_label("x"), Error);
  CHECK(m.find("x") != nullptr);
  CHECK(m.bindings().size() == 1);
  const auto d0 = m.digest();
  m.add({"y", script::Value(2.0), "execute_code", "c2"});
  CHECK(m.digest() != d0);
}

TEST_CASE("execute_code sees memory but cannot mutate it") {
  env::Bindings mem{{"data", script::Value::list({script::Value(1.0), script::Value(2.0)})}};
  const auto out = execute_locally("data.append(3)\nresult = {'n': len(data)}", mem, false);
  CHECK(script::to_double(*out.as<std::shared_ptr<script::DictObj>>()->find("n")) == 3.0);
  CHECK(script::sequence_items(mem[0].second).size() == 2);
  CHECK_THROWS_AS(execute_locally("x = 1", mem, false), Error);
}

TEST_CASE("ode_solve integrates with the documented signature") {
  const auto out = execute_locally(
      "def rhs(X, t, params):\n    return jnp.array([X[1], -params[0]*X[0]])\n"
      "sol = ode_solve(jnp.array([1.0, 0.0]), rhs, jnp.array([4.0]), 0.001, 1.0)\n"
      "result = {'shape': sol.shape, 'last': sol[-1, 0]}",
      {}, true);
  const auto& d = *out.as<std::shared_ptr<script::DictObj>>();
  CHECK(script::to_double(*d.find("last")) == doctest::Approx(std::cos(2.0)).epsilon(1e-9));
  CHECK_THROWS_AS(execute_locally("sol = ode_solve(1, 2, 3, 4, 5)\nresult = {}", {}, false), Error);
}

TEST_CASE("tool schemas carry result labels except for submissions") {
  Session s(cat().task("quantum_dyn/arbitrary"), 1);
  const json schemas = s.tool_schemas();
  bool saw_submission = false;
  for (const auto& t : schemas) {
    const auto& props = t.at("parameters").at("properties");
    const bool submission = t.at("name") == "announce_Hamiltonian";
    saw_submission |= submission;
    CHECK(props.contains(result_label_param) == !submission);
  }
  CHECK(saw_submission);
  auto no_label = s.execute({"c1", "init_spins", {{"N", 2}}});
  CHECK_FALSE(no_label.ok);
  auto dup1 = s.execute({"c2", "init_spins", {{"N", 2}, {"result_label", "a"}}});
  auto dup2 = s.execute({"c3", "init_spins", {{"N", 2}, {"result_label", "a"}}});
  CHECK(dup1.ok);
  CHECK_FALSE(dup2.ok);
  CHECK(s.execute({"c4", "frobnicate", {{"result_label", "b"}}}).text.find("Unknown tool") != std::string::npos);
}

TEST_CASE("plotting without a sandbox is an agent-visible error") {
  Session s(cat().task("mech/damped_duffing"), 1);
  auto r = s.execute({"c", "plot_from_code", {{"code", "result = get_image()"}, {"result_label", "img"}}});
  CHECK_FALSE(r.ok);
  CHECK(r.text.find("sandbox") != std::string::npos);
}

TEST_CASE("scripted truth session submits and scores one") {
  const auto task = cat().task("quantum_dyn/arbitrary");
  ScriptedAgent agent(testing::plan_script(testing::exploration_plan(*task.system, true)));
  const auto conv = run_session(task, agent, 11);
  CHECK(conv.status == Status::submitted);
  REQUIRE(conv.score);
  CHECK(conv.score->score == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(conv.steps.size() == 3);
  CHECK(conv.steps[0].remaining_steps == task.budget.max_steps - 1);
  CHECK(budget_hint(3, 7) == "Remaining budget: 3 conversation steps and 7 tool calls.");
}

TEST_CASE("tool-call budget exhaustion stops the session") {
  auto task = cat().task("mech/damped_duffing");
  task.budget.max_tool_calls = 2;
  ScriptedAgent agent(testing::plan_script(testing::exploration_plan(*task.system, true)));
  const auto conv = run_session(task, agent, 1);
  CHECK(conv.status == Status::budget_exhausted);
  CHECK_FALSE(conv.score);
  std::size_t executed = 0, refused = 0;
  for (const auto& st : conv.steps)
    for (const auto& c : st.calls) {
      executed += c.executed;
      refused += c.text == "Error: The tool call budget is exhausted.";
    }
  CHECK(executed == 2);
  CHECK(refused == 0);
}

TEST_CASE("step budget and agent stop") {
  auto task = cat().task("mech/damped_duffing");
  task.budget.max_steps = 1;
  ScriptedAgent a(testing::plan_script(testing::exploration_plan(*task.system, true)));
  CHECK(run_session(task, a, 1).status == Status::budget_exhausted);
  ScriptedAgent quiet(json{{"turns", json::array({{{"message", "Nothing to do."}}})}});
  const auto conv = run_session(cat().task("mech/damped_duffing"), quiet, 1);
  CHECK(conv.status == Status::no_submission);
}

TEST_CASE("adapter failures abort the session") {
  CallbackAgent bad([](const json&) -> AgentTurn { throw Error(ErrorKind::transport, "connection reset"); });
  const auto conv = run_session(cat().task("field/nls"), bad, 1);
  CHECK(conv.status == Status::aborted);
  CHECK(conv.reason.find("connection reset") != std::string::npos);
}

TEST_CASE("agents see tool results and the budget hint") {
  std::vector<json> requests;
  int turn = 0;
  CallbackAgent spy([&](const json& req) {
    requests.push_back(req);
    AgentTurn t;
    if (turn++ == 0) t.tool_calls.push_back({"a1", "observe_evolution", {{"q0", 0.1}, {"q0_dot", 0.0}, {"result_label", "o"}}});
    else t.stop = true;
    return t;
  });
  run_session(cat().task("mech/damped_duffing"), spy, 1);
  REQUIRE(requests.size() == 2);
  const auto& msgs = requests[1].at("messages");
  bool tool_msg = false, hint = false;
  for (const auto& m : msgs) {
    if (m.at("role") == "tool") {
      tool_msg = true;
      CHECK(m.at("tool_call_id") == "a1");
    }
    if (m.at("role") == "user" && m.at("content").get<std::string>().find("Remaining budget:") != std::string::npos) hint = true;
  }
  CHECK(tool_msg);
  CHECK(hint);
  CHECK(requests[0].at("system").get<std::string>().size() > 0);
}

TEST_CASE("logs round-trip and replay detects tampering") {
  const auto task = cat().task("mech/damped_pendulum");
  ScriptedAgent agent(testing::plan_script(testing::exploration_plan(*task.system, true)));
  const auto conv = run_session(task, agent, 5);
  const auto dir = scratch_dir("log");
  const auto path = (dir / "run.jsonl").string();
  conv.save(path);
  const auto loaded = Conversation::load(path);
  CHECK(loaded.to_jsonl() == conv.to_jsonl());
  CHECK(replay(loaded, cat()).ok());

  auto tampered = loaded;
  tampered.steps[0].calls[0].digest = "0000000000000000";
  const auto rep = replay(tampered, cat());
  CHECK_FALSE(rep.ok());
  auto other_seed = loaded;
  other_seed.score->score = 0.5;
  CHECK_FALSE(replay(other_seed, cat()).ok());

  const json red = conv.redacted();
  CHECK(red.dump().find("\"score\"") == std::string::npos);
  CHECK_THROWS_AS(Conversation::from_jsonl("{\"type\": \"mystery\"}\n"), Error);
}

TEST_CASE("ranking uses redacted logs") {
  std::vector<Conversation> convs;
  for (const std::string last : {"My estimate is 0.4", "My estimate is 0.9", "My estimate is 0.1"}) {
    Conversation c;
    c.task = "field/nls";
    c.steps.push_back({0, last, {}, 3, 3});
    c.score = env::ScoreRecord{0.77, {}, json::object()};
    c.status = Status::submitted;
    convs.push_back(c);
  }
  ScriptedAgent ranker(json{{"turns", json::array()}, {"rank", "max_self_reported"}});
  CHECK(rank_conversations(convs, ranker).index == 1u);
  std::vector<json> seen;
  struct Spy final : AgentAdapter {
    std::vector<json>* seen;
    json describe() const override { return {{"kind", "spy"}}; }
    AgentTurn next(const json&) override { return {}; }
    std::size_t rank(const std::vector<json>& c) override {
      *seen = c;
      return 2;
    }
  } spy;
  spy.seen = &seen;
  CHECK(rank_conversations(convs, spy).index == 2u);
  REQUIRE(seen.size() == 3);
  for (const auto& j : seen) CHECK(j.dump().find("0.77") == std::string::npos);
  CHECK_FALSE(rank_conversations({convs[0]}, ranker).index);
  auto mixed = convs;
  mixed[1].task = "field/nls_nnn";
  CHECK_FALSE(rank_conversations(mixed, ranker).index);
}

TEST_CASE("reports count unsubmitted attempts as zero") {
  const auto dir = scratch_dir("report");
  auto make = [&](const std::string& task, std::uint64_t seed, std::optional<double> score) {
    Conversation c;
    c.task = task;
    c.seed = seed;
    if (score) {
      c.status = Status::submitted;
      c.score = env::ScoreRecord{*score, {}, json::object()};
    }
    c.save((dir / (std::to_string(seed) + task.substr(task.find('/') + 1) + ".jsonl")).string());
    return c;
  };
  std::vector<Conversation> logs{make("field/nls", 1, 0.9), make("field/nls", 2, std::nullopt), make("mech/damped_duffing", 1, 1.0)};
  const auto rows = collect_scores(logs, cat());
  REQUIRE(rows.size() == 2);
  const auto& nls = rows[0].task == "field/nls" ? rows[0] : rows[1];
  CHECK(nls.scores.size() == 2);
  CHECK(nls.submitted == 1);
  CHECK(nls.scores[1] == 0.0);
  CHECK(score_table_csv(rows).find("field/nls") != std::string::npos);
  CHECK(score_plot_svg(rows, "fields").rfind("<svg", 0) == 0);
  const auto written = write_report(dir, cat());
  CHECK(written.size() >= 4);
  for (const auto& p : written) CHECK(std::filesystem::file_size(p) > 0);
}
