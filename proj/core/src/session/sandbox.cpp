// SPDX-License-Identifier: Apache-2.0
#include "sciexp/session/sandbox.hpp"

#include <httplib.h>

#include <regex>

#include "sciexp/error.hpp"
#include "sciexp/session/payload.hpp"
#include "session/http.hpp"

namespace sciexp::session {

SandboxClient::SandboxClient(std::string base_url, SandboxLimits limits)
    : base_url_(std::move(base_url)), limits_(limits) {
  split_url(base_url_);
}

std::string SandboxClient::post(const std::string& path, const std::string& mode, const std::string& code,
                                const env::Bindings& bindings, bool with_ode_solve, std::string* content_type) const {
  const auto [origin, prefix] = split_url(base_url_);
  nlohmann::json b = nlohmann::json::object();
  for (const auto& [k, v] : bindings) b[k] = encode(v);
  const nlohmann::json body = {{"mode", mode},
                               {"code", code},
                               {"bindings", b},
                               {"ode_solve", with_ode_solve},
                               {"limits", {{"cpu_seconds", limits_.cpu_seconds}, {"memory_mb", limits_.memory_mb}}}};
  httplib::Client cli(origin);
  const auto seconds = static_cast<time_t>(limits_.cpu_seconds) + 30;
  cli.set_read_timeout(seconds, 0);
  cli.set_write_timeout(seconds, 0);
  auto res = cli.Post(prefix + path, body.dump(), "application/json");
  if (!res) throw Error(ErrorKind::transport, "The analysis sandbox is unreachable (" + httplib::to_string(res.error()) + ").");
  if (content_type) *content_type = res->get_header_value("Content-Type");
  if (res->status != 200) {
    std::string message = "The analysis sandbox failed (HTTP " + std::to_string(res->status) + ").";
    try {
      const auto j = nlohmann::json::parse(res->body);
      if (j.contains("error")) message = j["error"].value("message", message);
    } catch (const nlohmann::json::exception&) {
    }
    throw Error(ErrorKind::sandbox, message);
  }
  return res->body;
}

script::Value SandboxClient::execute(const std::string& code, const env::Bindings& bindings, bool with_ode_solve) const {
  const std::string body = post("/execute", "execute", code, bindings, with_ode_solve, nullptr);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::sandbox, "The analysis sandbox returned malformed JSON.");
  }
  if (j.contains("error")) throw Error(ErrorKind::sandbox, j["error"].value("message", std::string("sandbox error")));
  if (!j.contains("result")) throw Error(ErrorKind::sandbox, "The analysis sandbox response has no result.");
  script::Value v = decode(j["result"]);
  if (!v.is<std::shared_ptr<script::DictObj>>())
    throw Error(ErrorKind::script, "The code must set the variable 'result' to a dictionary.");
  return v;
}

std::string SandboxClient::plot(const std::string& code, const env::Bindings& bindings) const {
  std::string type;
  std::string body = post("/plot", "plot", code, bindings, false, &type);
  static const std::string magic = "\x89PNG\r\n\x1a\n";
  if (body.compare(0, magic.size(), magic) != 0) {
    try {
      const auto j = nlohmann::json::parse(body);
      if (j.contains("error")) throw Error(ErrorKind::sandbox, j["error"].value("message", std::string("sandbox error")));
    } catch (const nlohmann::json::exception&) {
    }
    throw Error(ErrorKind::sandbox, "The analysis sandbox did not return a PNG image.");
  }
  return body;
}

}  // namespace sciexp::session
