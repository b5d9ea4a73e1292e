// SPDX-License-Identifier: Apache-2.0
#include "sciexp/session/payload.hpp"

#include <cmath>
#include <cstdio>

#include "sciexp/error.hpp"
#include "sciexp/script/ops.hpp"

namespace sciexp::session {

using nlohmann::json;
using script::Value;

namespace {

json real_json(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  return d;
}

double real_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
  }
  throw Error(ErrorKind::invalid_argument, "expected a number in array data");
}

std::string shape_text(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + std::to_string(s[i]);
  return out + "]";
}

}  // namespace

json encode(const Value& v) {
  if (v.is_none()) return nullptr;
  if (v.is<bool>()) return v.as<bool>();
  if (v.is<std::int64_t>()) return v.as<std::int64_t>();
  if (v.is<double>()) {
    double d = v.as<double>();
    if (std::isfinite(d)) return d;
    return {{"__float__", real_json(d)}};
  }
  if (v.is<Complex>()) return {{"__complex__", {real_json(v.as<Complex>().real()), real_json(v.as<Complex>().imag())}}};
  if (v.is<std::string>()) return v.as<std::string>();
  if (v.is<std::shared_ptr<script::ListObj>>()) {
    json a = json::array();
    for (const auto& x : v.as<std::shared_ptr<script::ListObj>>()->items) a.push_back(encode(x));
    return a;
  }
  if (v.is<std::shared_ptr<script::TupleObj>>()) {
    json a = json::array();
    for (const auto& x : v.as<std::shared_ptr<script::TupleObj>>()->items) a.push_back(encode(x));
    return {{"__tuple__", a}};
  }
  if (v.is<std::shared_ptr<script::DictObj>>()) {
    json o = json::object();
    json keys = json::array();
    for (const auto& [k, x] : v.as<std::shared_ptr<script::DictObj>>()->items) {
      keys.push_back(k);
      o[k] = encode(x);
    }
    return {{"__dict__", {{"keys", keys}, {"values", o}}}};
  }
  if (v.is_array()) {
    const NdArray& a = *v.as<script::ArrayPtr>();
    json data = json::array();
    for (const Complex& z : a.data()) {
      if (a.is_complex()) {
        data.push_back({real_json(z.real()), real_json(z.imag())});
      } else {
        data.push_back(real_json(z.real()));
      }
    }
    return {{"__array__", {{"shape", a.shape()}, {"dtype", a.is_complex() ? "complex128" : "float64"}, {"data", data}}}};
  }
  if (v.is_operator()) {
    const auto& m = *v.as<script::OperatorPtr>();
    json entries = json::array();
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
      for (numerics::SparseOperator::InnerIterator it(m, k); it; ++it) {
        entries.push_back({it.row(), it.col(), real_json(it.value().real()), real_json(it.value().imag())});
      }
    }
    return {{"__operator__", {{"dim", m.rows()}, {"entries", entries}}}};
  }
  return {{"__object__", v.type_name()}};
}

Value decode(const json& j) {
  if (j.is_null()) return Value();
  if (j.is_boolean()) return Value(j.get<bool>());
  if (j.is_number_integer()) return Value(j.get<std::int64_t>());
  if (j.is_number()) return Value(j.get<double>());
  if (j.is_string()) return Value(j.get<std::string>());
  if (j.is_array()) {
    std::vector<Value> items;
    for (const auto& x : j) items.push_back(decode(x));
    return Value::list(std::move(items));
  }
  if (j.contains("__float__")) return Value(real_from(j["__float__"]));
  if (j.contains("__complex__")) return Value(Complex(real_from(j["__complex__"][0]), real_from(j["__complex__"][1])));
  if (j.contains("__tuple__")) {
    std::vector<Value> items;
    for (const auto& x : j["__tuple__"]) items.push_back(decode(x));
    return Value::tuple(std::move(items));
  }
  if (j.contains("__dict__")) {
    Value d = Value::dict();
    auto& obj = *std::const_pointer_cast<script::DictObj>(d.as<std::shared_ptr<script::DictObj>>());
    for (const auto& k : j["__dict__"]["keys"]) obj.set(k.get<std::string>(), decode(j["__dict__"]["values"][k.get<std::string>()]));
    return d;
  }
  if (j.contains("__array__")) {
    const auto& a = j["__array__"];
    Shape shape = a.at("shape").get<Shape>();
    bool cplx = a.value("dtype", std::string("float64")) == "complex128";
    std::vector<Complex> data;
    for (const auto& x : a.at("data")) {
      data.push_back(cplx ? Complex(real_from(x.at(0)), real_from(x.at(1))) : Complex(real_from(x), 0.0));
    }
    if (data.size() != shape_size(shape)) throw Error(ErrorKind::shape, "array data does not match its shape");
    return Value(NdArray(std::move(shape), std::move(data), cplx));
  }
  if (j.contains("__operator__")) {
    auto dim = j["__operator__"].at("dim").get<Eigen::Index>();
    std::vector<Eigen::Triplet<Complex>> trips;
    for (const auto& e : j["__operator__"].at("entries")) {
      trips.emplace_back(e.at(0).get<Eigen::Index>(), e.at(1).get<Eigen::Index>(), Complex(real_from(e.at(2)), real_from(e.at(3))));
    }
    numerics::SparseOperator m(dim, dim);
    m.setFromTriplets(trips.begin(), trips.end());
    return Value(std::move(m));
  }
  if (j.contains("__object__")) return Value();
  Value d = Value::dict();
  auto& obj = *std::const_pointer_cast<script::DictObj>(d.as<std::shared_ptr<script::DictObj>>());
  for (auto it = j.begin(); it != j.end(); ++it) obj.set(it.key(), decode(it.value()));
  return d;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t digest(const Value& v) { return fnv1a(encode(v).dump()); }

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string digest_hex(const Value& v) { return hex64(digest(v)); }

std::string summarize(const Value& v) {
  if (v.is_array()) {
    const NdArray& a = *v.as<script::ArrayPtr>();
    if (a.size() >= full_listing_limit) return "array of shape " + shape_text(a.shape());
    if (a.ndim() == 0) return script::repr(a.is_complex() ? Value(a[0]) : Value(a[0].real()));
    return script::repr(v);
  }
  if (v.is_operator()) {
    const auto& m = *v.as<script::OperatorPtr>();
    return "operator of shape [" + std::to_string(m.rows()) + ", " + std::to_string(m.cols()) + "]";
  }
  if (v.is<std::shared_ptr<script::DictObj>>()) {
    std::string s = "{";
    bool first = true;
    for (const auto& [k, x] : v.as<std::shared_ptr<script::DictObj>>()->items) {
      s += (first ? "'" : ", '") + k + "': " + summarize(x);
      first = false;
    }
    return s + "}";
  }
  if (v.is_sequence()) {
    const auto& items = script::sequence_items(v);
    bool all_numbers = true;
    for (const auto& x : items) all_numbers = all_numbers && x.is_number();
    if (all_numbers && items.size() >= full_listing_limit) return "list of length " + std::to_string(items.size());
    bool list = v.is<std::shared_ptr<script::ListObj>>();
    std::string s = list ? "[" : "(";
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? ", " : "") + summarize(items[i]);
    if (!list && items.size() == 1) s += ",";
    return s + (list ? "]" : ")");
  }
  if (v.is<std::string>()) return v.as<std::string>();
  return script::repr(v);
}

}  // namespace sciexp::session
