// SPDX-License-Identifier: Apache-2.0
#include "sciexp/env/environment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "sciexp/error.hpp"
#include "sciexp/script/interpreter.hpp"
#include "sciexp/script/ops.hpp"
#include "sciexp/session/payload.hpp"

namespace sciexp::env {

void Environment::finalize(ScoreRecord r) { score_ = std::move(r); }

void Environment::require_open() const {
  if (score_) throw Error(ErrorKind::already_finalized, "A result has already been saved. It can only be called once per experiment.");
}

const nlohmann::json& arg(const nlohmann::json& args, const std::string& name) {
  if (!args.is_object() || !args.contains(name) || args[name].is_null())
    throw Error(ErrorKind::signature, "Missing required argument '" + name + "'.");
  return args[name];
}

double number_arg(const nlohmann::json& args, const std::string& name) {
  const auto& j = arg(args, name);
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    std::size_t b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
    if (b != std::string::npos) {
      double d = 0;
      auto [p, ec] = std::from_chars(s.data() + b, s.data() + e + 1, d);
      if (ec == std::errc() && p == s.data() + e + 1) return d;
    }
  }
  throw Error(ErrorKind::signature, "Argument '" + name + "' must be a number.");
}

std::string string_arg(const nlohmann::json& args, const std::string& name) {
  const auto& j = arg(args, name);
  if (!j.is_string()) throw Error(ErrorKind::signature, "Argument '" + name + "' must be a string.");
  return j.get<std::string>();
}

script::Value value_arg(const nlohmann::json& args, const std::string& name, const Bindings& memory) {
  const auto& j = arg(args, name);
  if (j.is_string()) return script::evaluate(j.get<std::string>(), memory);
  return session::decode(j);
}

void reject_unknown_args(const nlohmann::json& args, const ToolSpec& spec) {
  if (args.is_null()) return;
  if (!args.is_object()) throw Error(ErrorKind::signature, "Tool arguments must be an object.");
  for (auto it = args.begin(); it != args.end(); ++it) {
    bool known = false;
    for (const auto& p : spec.params) known = known || p.name == it.key();
    if (!known) throw Error(ErrorKind::signature, spec.name + "() got an unexpected argument '" + it.key() + "'.");
  }
}

script::Value make_dict(std::vector<std::pair<std::string, script::Value>> items) {
  script::Value d = script::Value::dict();
  auto& obj = *d.as<std::shared_ptr<script::DictObj>>();
  for (auto& [k, v] : items) obj.set(k, std::move(v));
  return d;
}

script::Value real_array(Shape shape, std::span<const double> values) {
  return script::Value(NdArray::from_real(std::move(shape), values));
}

std::vector<double> real_values(const script::Value& v, const std::string& what) {
  NdArray a;
  try {
    a = script::to_array(v);
  } catch (const Error&) {
    throw Error(ErrorKind::signature, what + " must be a number or an array of numbers.");
  }
  double scale = 0.0;
  for (const Complex& z : a.data()) scale = std::max(scale, std::abs(z));
  for (const Complex& z : a.data()) {
    if (std::abs(z.imag()) > 1e-12 * std::max(1.0, scale))
      throw Error(ErrorKind::signature, what + " must be real-valued.");
  }
  std::vector<double> out;
  out.reserve(a.size());
  for (const Complex& z : a.data()) out.push_back(z.real());
  return out;
}

}  // namespace sciexp::env
