// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sciexp/script/value.hpp"

namespace sciexp::script {

struct Expr;
struct Stmt;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;
using Block = std::vector<StmtPtr>;

enum class BinaryOp { add, sub, mul, div, floordiv, mod, pow, matmul, bit_and, bit_or, bit_xor };
enum class UnaryOp { neg, pos, not_, invert };
enum class CompareOp { eq, ne, lt, le, gt, ge, in, not_in, is, is_not };

struct FunctionDef {
  std::string name;
  std::vector<std::string> params;
  std::vector<ExprPtr> defaults;  // aligned to the trailing params
  Block body;
  ExprPtr lambda_body;  // set for lambdas instead of body
  std::vector<ExprPtr> decorators;
  int line = 0;
};

struct Comprehension {
  ExprPtr target;
  ExprPtr iter;
  std::vector<ExprPtr> conditions;
};

struct Expr {
  enum class Kind {
    constant, name, attribute, subscript, call, binary, unary, bool_and, bool_or, compare,
    if_exp, list, tuple, dict, slice, lambda, list_comp, dict_comp
  };

  Kind kind;
  int line = 0;
  Value constant;
  std::string name;  // identifier / attribute name
  BinaryOp bin_op = BinaryOp::add;
  UnaryOp un_op = UnaryOp::neg;
  std::vector<CompareOp> cmp_ops;
  ExprPtr a, b, c;  // operands; slice: start/stop/step
  std::vector<ExprPtr> items;  // call args, elements, compare rhs, dict values
  std::vector<ExprPtr> keys;   // dict keys
  std::vector<std::pair<std::string, ExprPtr>> kwargs;
  std::shared_ptr<const FunctionDef> function;  // lambda
  std::vector<Comprehension> generators;

  Expr(Kind k, int l) : kind(k), line(l) {}
};

struct ImportName {
  std::string module;  // dotted module path
  std::string name;    // imported member for `from x import name`, empty otherwise
  std::string alias;   // binding name
};

struct Stmt {
  enum class Kind { expr, assign, aug_assign, if_, for_, while_, def, return_, pass, break_, continue_, import };

  Kind kind;
  int line = 0;
  std::vector<ExprPtr> targets;  // assignment targets (chained a = b = v)
  ExprPtr value;                 // expression / assigned value / return value / loop iterable
  ExprPtr target;                // for-loop target, aug-assign target
  BinaryOp op = BinaryOp::add;   // aug-assign
  ExprPtr condition;
  Block body;
  Block orelse;
  std::shared_ptr<const FunctionDef> function;
  std::vector<ImportName> imports;

  Stmt(Kind k, int l) : kind(k), line(l) {}
};

struct Module {
  Block body;
};

/// Parses a Python-subset source module. Throws ErrorKind::script with a line
/// number on syntax errors.
std::shared_ptr<const Module> parse_module(std::string_view source);

/// Parses a single expression.
std::shared_ptr<const Expr> parse_expression(std::string_view source);

}  // namespace sciexp::script
