// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <mutex>
#include <thread>

#include "sciexp/catalog/catalog.hpp"
#include "sciexp/error.hpp"
#include "sciexp/script/ops.hpp"
#include "sciexp/session/payload.hpp"
#include "sciexp/session/sandbox.hpp"
#include "sciexp/session/session.hpp"

// after Eigen: <resolv.h> defines _res
#include <httplib.h>

using namespace sciexp;
using namespace sciexp::session;
using nlohmann::json;

namespace {

/// httplib server on an ephemeral loopback port, stopped on destruction.
class StubServer {
 public:
  httplib::Server svr;
  int port = 0;
  void start() {
    port = svr.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { svr.listen_after_bind(); });
    svr.wait_until_ready();
  }
  std::string url(const std::string& path = "") const { return "http://127.0.0.1:" + std::to_string(port) + path; }
  ~StubServer() {
    svr.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  std::thread thread_;
};

const std::string secret = "sk-test-7f3a9c1e5b";

struct KeyGuard {
  KeyGuard() { setenv(api_key_env, secret.c_str(), 1); }
  ~KeyGuard() { unsetenv(api_key_env); }
};

const std::string png_bytes = std::string("\x89PNG\r\n\x1a\n", 8) + "stub-image-data";

}  // namespace

TEST_CASE("remote agent sends the key as a bearer token and never logs it") {
  KeyGuard key;
  StubServer s;
  std::mutex mu;
  std::vector<std::string> auth;
  std::vector<json> bodies;
  s.svr.Post("/agent", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    auth.push_back(req.get_header_value("Authorization"));
    bodies.push_back(json::parse(req.body));
    json turn;
    if (bodies.back().value("task", "") == "rank") {
      turn = {{"index", 1}};
    } else if (bodies.size() == 1) {
      turn = {{"message", "Observing."},
              {"tool_calls", json::array({{{"id", "t1"}, {"name", "observe_evolution"},
                                           {"arguments", json({{"q0", 0.2}, {"q0_dot", 0.0}, {"result_label", "o1"}}).dump()}}})}};
    } else {
      turn = {{"message", "Done."}, {"stop", true}};
    }
    res.set_content(turn.dump(), "application/json");
  });
  s.start();

  RemoteAgent agent(s.url("/agent"), "stub-model", 10.0);
  const json desc = agent.describe();
  CHECK(desc.at("kind") == "remote");
  CHECK(desc.dump().find(secret) == std::string::npos);

  const auto conv = run_session(catalog::Catalog::builtin().task("mech/damped_duffing"), agent, 1);
  CHECK(conv.status == Status::no_submission);
  REQUIRE(conv.steps.size() >= 1);
  REQUIRE(conv.steps[0].calls.size() == 1);
  CHECK(conv.steps[0].calls[0].ok);
  CHECK(conv.to_jsonl().find(secret) == std::string::npos);
  REQUIRE(bodies.size() == 2);
  for (const auto& a : auth) CHECK(a == "Bearer " + secret);
  CHECK(bodies[0].at("model") == "stub-model");
  CHECK(bodies[0].contains("tools"));
  CHECK(bodies[0].contains("system"));

  std::vector<Conversation> two{conv, conv};
  CHECK(rank_conversations(two, agent).index == 1u);
  CHECK(bodies.back().at("task") == "rank");
  CHECK(bodies.back().at("conversations").size() == 2);
}

TEST_CASE("remote agent without a key sends no authorization header") {
  unsetenv(api_key_env);
  StubServer s;
  std::string seen = "unset";
  s.svr.Post("/agent", [&](const httplib::Request& req, httplib::Response& res) {
    seen = req.has_header("Authorization") ? req.get_header_value("Authorization") : "";
    res.set_content(R"({"message": "bye", "stop": true})", "application/json");
  });
  s.start();
  RemoteAgent agent(s.url("/agent"), "m");
  agent.next({{"system", ""}, {"tools", json::array()}, {"messages", json::array()}});
  CHECK(seen.empty());
}

TEST_CASE("remote agent transport failures abort without leaking the key") {
  KeyGuard key;
  StubServer s;
  s.svr.Post("/agent", [&](const httplib::Request& req, httplib::Response& res) {
    res.status = 500;
    // a misbehaving endpoint echoing the credential must not reach the log
    res.set_content("internal error for " + req.get_header_value("Authorization"), "text/plain");
  });
  s.start();
  RemoteAgent agent(s.url("/agent"), "m");
  const auto conv = run_session(catalog::Catalog::builtin().task("field/nls"), agent, 1);
  CHECK(conv.status == Status::aborted);
  CHECK(conv.reason.find("500") != std::string::npos);
  CHECK(conv.to_jsonl().find(secret) == std::string::npos);

  RemoteAgent nowhere("http://127.0.0.1:1/agent", "m", 2.0);
  try {
    nowhere.next({{"messages", json::array()}});
    FAIL("expected a transport error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::transport);
  }
}

TEST_CASE("sandbox client wire format") {
  StubServer s;
  json last;
  s.svr.Post("/execute", [&](const httplib::Request& req, httplib::Response& res) {
    last = json::parse(req.body);
    if (last.at("code") == "boom") {
      res.set_content(R"({"error": {"kind": "timeout", "message": "CPU time limit exceeded"}})", "application/json");
      return;
    }
    script::Value out = script::Value::dict();
    out.as<std::shared_ptr<script::DictObj>>()->set("echo", script::Value(std::string(last.at("code"))));
    res.set_content(json{{"result", encode(out)}}.dump(), "application/json");
  });
  s.svr.Post("/plot", [&](const httplib::Request& req, httplib::Response& res) {
    last = json::parse(req.body);
    res.set_content(png_bytes, "image/png");
  });
  s.start();

  SandboxClient client(s.url(), SandboxLimits{5.0, 256});
  env::Bindings mem{{"obs", script::Value(NdArray::from_real(std::vector<double>{1, 2, 3}))}};
  const auto v = client.execute("result = {}", mem, true);
  CHECK(script::str(*v.as<std::shared_ptr<script::DictObj>>()->find("echo")) == "result = {}");
  CHECK(last.at("mode") == "execute");
  CHECK(last.at("ode_solve") == true);
  CHECK(last.at("limits").at("cpu_seconds") == 5.0);
  CHECK(last.at("limits").at("memory_mb") == 256);
  CHECK(last.at("bindings").at("obs") == encode(mem[0].second));

  CHECK(client.plot("result = get_image()", mem) == png_bytes);
  CHECK(last.at("mode") == "plot");

  try {
    client.execute("boom", {}, false);
    FAIL("expected a sandbox error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::sandbox);
    CHECK(std::string(e.what()).find("CPU time limit exceeded") != std::string::npos);
  }
  SandboxClient dead("http://127.0.0.1:1");
  CHECK_THROWS_AS(dead.execute("x", {}, false), Error);
}

TEST_CASE("sessions route analysis tools through the sandbox") {
  StubServer s;
  std::size_t executes = 0;
  s.svr.Post("/execute", [&](const httplib::Request&, httplib::Response& res) {
    ++executes;
    res.set_content(json{{"result", encode(script::Value::dict())}}.dump(), "application/json");
  });
  s.svr.Post("/plot", [&](const httplib::Request&, httplib::Response& res) { res.set_content(png_bytes, "image/png"); });
  s.start();
  SandboxClient client(s.url());

  std::vector<json> requests;
  int turn = 0;
  CallbackAgent agent([&](const json& req) {
    requests.push_back(req);
    AgentTurn t;
    if (turn++ == 0) {
      t.tool_calls.push_back({"p1", "plot_from_code", {{"code", "plt.plot([1, 2])\nresult = get_image()"}, {"result_label", "fig"}}});
      t.tool_calls.push_back({"e1", "execute_code", {{"code", "result = {}"}, {"result_label", "nothing"}}});
    } else {
      t.stop = true;
    }
    return t;
  });
  const auto conv = run_session(catalog::Catalog::builtin().task("mech/damped_duffing"), agent, 1, {&client});
  REQUIRE(conv.steps.size() >= 1);
  CHECK(conv.steps[0].calls[0].ok);
  CHECK(conv.steps[0].calls[0].text == "The image was saved under the label 'fig'.");
  CHECK(!conv.steps[0].calls[0].image_digest.empty());
  CHECK(executes == 1);
  bool image_sent = false;
  for (const auto& m : requests.at(1).at("messages"))
    if (m.value("role", "") == "tool" && m.contains("image"))
      image_sent = m.at("image") == httplib::detail::base64_encode(png_bytes);
  CHECK(image_sent);
}
