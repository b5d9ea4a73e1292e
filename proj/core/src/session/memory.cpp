// SPDX-License-Identifier: Apache-2.0
#include "sciexp/session/memory.hpp"

#include <algorithm>

#include "sciexp/error.hpp"
#include "sciexp/session/payload.hpp"

namespace sciexp::session {

namespace {

const std::vector<std::string>& reserved_names() {
  static const std::vector<std::string> names = {"jax", "jnp", "np", "numpy", "scipy", "optax", "math", "cmath",
                                                 "result", "ode_solve", "get_image", "plt", "matplotlib"};
  return names;
}

}  // namespace

bool MemoryStore::valid_label(const std::string& label) {
  if (label.empty() || !(std::isalpha(static_cast<unsigned char>(label[0])) || label[0] == '_')) return false;
  return std::all_of(label.begin(), label.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool MemoryStore::contains(const std::string& label) const {
  return images_.count(label) > 0 ||
         std::any_of(entries_.begin(), entries_.end(), [&](const MemoryEntry& e) { return e.label == label; });
}

void MemoryStore::check_label(const std::string& label) const {
  if (!valid_label(label))
    throw Error(ErrorKind::invalid_argument,
                "The result label '" + label + "' is not a valid variable name (letters, digits and underscores).");
  const auto& r = reserved_names();
  if (std::find(r.begin(), r.end(), label) != r.end())
    throw Error(ErrorKind::invalid_argument, "The result label '" + label + "' is reserved.");
  if (contains(label)) throw Error(ErrorKind::invalid_argument, "The result label '" + label + "' is already in use.");
}

void MemoryStore::add(MemoryEntry entry) {
  check_label(entry.label);
  entries_.push_back(std::move(entry));
}

void MemoryStore::add_image(const std::string& label, std::string png, const std::string&, const std::string&) {
  check_label(label);
  images_.emplace(label, std::move(png));
}

const script::Value* MemoryStore::find(const std::string& label) const {
  for (const auto& e : entries_) {
    if (e.label == label) return &e.value;
  }
  return nullptr;
}

env::Bindings MemoryStore::bindings() const {
  env::Bindings b;
  b.reserve(entries_.size());
  for (const auto& e : entries_) b.emplace_back(e.label, e.value);
  return b;
}

std::uint64_t MemoryStore::digest() const {
  std::uint64_t h = fnv1a("");
  for (const auto& e : entries_) {
    h = fnv1a(e.label, h);
    h = fnv1a(hex64(session::digest(e.value)), h);
  }
  for (const auto& [label, png] : images_) h = fnv1a(png, fnv1a(label, h));
  return h;
}

}  // namespace sciexp::session
