// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "sciexp/env/environment.hpp"

namespace sciexp::session {

struct SandboxLimits {
  double cpu_seconds = 60.0;
  std::size_t memory_mb = 2048;
};

/// Client for the analysis sandbox service. Requests are JSON over HTTP:
/// POST <base>/execute and <base>/plot with
///   {"mode", "code", "bindings": {label: payload}, "ode_solve": bool, "limits"}.
/// execute answers {"result": payload}; plot answers the PNG bytes
/// (Content-Type image/png). Failures answer {"error": {"kind", "message"}}.
class SandboxClient {
 public:
  explicit SandboxClient(std::string base_url, SandboxLimits limits = {});

  script::Value execute(const std::string& code, const env::Bindings& bindings, bool with_ode_solve) const;
  std::string plot(const std::string& code, const env::Bindings& bindings) const;

  const std::string& base_url() const noexcept { return base_url_; }

 private:
  std::string post(const std::string& path, const std::string& mode, const std::string& code,
                   const env::Bindings& bindings, bool with_ode_solve, std::string* content_type) const;

  std::string base_url_;
  SandboxLimits limits_;
};

}  // namespace sciexp::session
