// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <regex>
#include <string>
#include <utility>

#include "sciexp/error.hpp"

namespace sciexp::session {

/// "http://host:port/a/b" -> {"http://host:port", "/a/b"}.
inline std::pair<std::string, std::string> split_url(const std::string& url) {
  static const std::regex re(R"(^(http://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re))
    throw Error(ErrorKind::invalid_argument, "expected an http://host[:port][/path] URL, got '" + url + "'");
  std::string path = m[2].matched ? m[2].str() : std::string();
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {m[1].str(), path};
}

}  // namespace sciexp::session
