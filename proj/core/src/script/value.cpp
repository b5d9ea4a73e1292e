// SPDX-License-Identifier: Apache-2.0
#include "sciexp/script/value.hpp"

#include "sciexp/error.hpp"

namespace sciexp::script {

const Value* DictObj::find(const std::string& key) const {
  for (const auto& [k, v] : items) {
    if (k == key) return &v;
  }
  return nullptr;
}

void DictObj::set(const std::string& key, Value v) {
  for (auto& [k, existing] : items) {
    if (k == key) {
      existing = std::move(v);
      return;
    }
  }
  items.emplace_back(key, std::move(v));
}

std::int64_t RangeObj::length() const {
  if (step > 0) return stop > start ? (stop - start + step - 1) / step : 0;
  return start > stop ? (start - stop - step - 1) / (-step) : 0;
}

Value Value::list(std::vector<Value> items) {
  auto l = std::make_shared<ListObj>();
  l->items = std::move(items);
  return Value(std::move(l));
}

Value Value::tuple(std::vector<Value> items) {
  auto t = std::make_shared<TupleObj>();
  t->items = std::move(items);
  return Value(std::move(t));
}

Value Value::dict() { return Value(std::make_shared<DictObj>()); }

Value Value::builtin(std::string name, BuiltinFn fn) {
  return Value(std::make_shared<BuiltinObj>(BuiltinObj{std::move(name), std::move(fn)}));
}

std::string Value::type_name() const {
  struct Visitor {
    std::string operator()(const NoneType&) const { return "NoneType"; }
    std::string operator()(bool) const { return "bool"; }
    std::string operator()(std::int64_t) const { return "int"; }
    std::string operator()(double) const { return "float"; }
    std::string operator()(const Complex&) const { return "complex"; }
    std::string operator()(const std::string&) const { return "str"; }
    std::string operator()(const std::shared_ptr<ListObj>&) const { return "list"; }
    std::string operator()(const std::shared_ptr<TupleObj>&) const { return "tuple"; }
    std::string operator()(const std::shared_ptr<DictObj>&) const { return "dict"; }
    std::string operator()(const ArrayPtr&) const { return "Array"; }
    std::string operator()(const OperatorPtr&) const { return "BCOO"; }
    std::string operator()(const std::shared_ptr<FunctionObj>&) const { return "function"; }
    std::string operator()(const std::shared_ptr<BuiltinObj>&) const { return "builtin_function"; }
    std::string operator()(const std::shared_ptr<ModuleObj>&) const { return "module"; }
    std::string operator()(const SliceObj&) const { return "slice"; }
    std::string operator()(const RangeObj&) const { return "range"; }
    std::string operator()(const std::shared_ptr<AtObj>&) const { return "_IndexUpdateHelper"; }
  };
  return std::visit(Visitor{}, v_);
}

const std::vector<Value>& sequence_items(const Value& v) {
  if (v.is<std::shared_ptr<ListObj>>()) return v.as<std::shared_ptr<ListObj>>()->items;
  if (v.is<std::shared_ptr<TupleObj>>()) return v.as<std::shared_ptr<TupleObj>>()->items;
  throw Error(ErrorKind::script, "TypeError: expected a list or tuple, got " + v.type_name());
}

}  // namespace sciexp::script
