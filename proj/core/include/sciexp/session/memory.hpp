// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

#include "sciexp/env/environment.hpp"

namespace sciexp::session {

struct MemoryEntry {
  std::string label;
  script::Value value;
  std::string tool;
  std::string call_id;
};

/// Session results keyed by result label. Labels are unique per session.
class MemoryStore {
 public:
  static bool valid_label(const std::string& label);

  bool contains(const std::string& label) const;
  /// Throws ErrorKind::invalid_argument for malformed or reused labels.
  void check_label(const std::string& label) const;
  void add(MemoryEntry entry);
  void add_image(const std::string& label, std::string png, const std::string& tool, const std::string& call_id);

  const std::vector<MemoryEntry>& entries() const noexcept { return entries_; }
  const std::map<std::string, std::string>& images() const noexcept { return images_; }
  const script::Value* find(const std::string& label) const;

  /// Non-image entries in registration order, as agent-code variables.
  env::Bindings bindings() const;
  std::uint64_t digest() const;

 private:
  std::vector<MemoryEntry> entries_;
  std::map<std::string, std::string> images_;
};

}  // namespace sciexp::session
