// SPDX-License-Identifier: Apache-2.0
#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <string>
#include <string_view>

#include "sciexp/error.hpp"
#include "sciexp/script/ast.hpp"

namespace sciexp::script {

namespace {

enum class Tok { name, number, string, op, newline, indent, dedent, end };

struct Token {
  Tok kind;
  std::string text;
  Value number;
  int line;
};

[[noreturn]] void syntax_error(int line, const std::string& what) {
  throw Error(ErrorKind::script, "line " + std::to_string(line) + ": SyntaxError: " + what);
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    bool line_start = true;
    while (pos_ < src_.size()) {
      if (line_start && depth_ == 0) {
        if (!handle_indentation()) continue;
        line_start = false;
      }
      char c = src_[pos_];
      if (c == '\n') {
        ++pos_;
        if (depth_ == 0) {
          emit_newline();
          line_start = true;
        }
        ++line_;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
        ++pos_;
        continue;
      }
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        continue;
      }
      if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
        pos_ += 2;
        ++line_;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number();
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          ++pos_;
        }
        std::string word(src_.substr(start, pos_ - start));
        if (pos_ < src_.size() && (src_[pos_] == '\'' || src_[pos_] == '"') && is_string_prefix(word)) {
          lex_string();
          continue;
        }
        tokens_.push_back({Tok::name, std::move(word), {}, line_});
        continue;
      }
      if (c == '\'' || c == '"') {
        lex_string();
        continue;
      }
      lex_operator();
    }
    if (!tokens_.empty() && tokens_.back().kind != Tok::newline) emit_newline();
    while (indents_.size() > 1) {
      indents_.pop_back();
      tokens_.push_back({Tok::dedent, "", {}, line_});
    }
    tokens_.push_back({Tok::end, "", {}, line_});
    return std::move(tokens_);
  }

 private:
  static bool is_string_prefix(const std::string& w) {
    static const std::array<std::string_view, 8> prefixes{"r", "f", "b", "u", "R", "F", "rf", "fr"};
    for (auto p : prefixes) {
      if (w == p) return true;
    }
    return false;
  }

  void emit_newline() {
    if (!tokens_.empty() && tokens_.back().kind != Tok::newline && tokens_.back().kind != Tok::indent &&
        tokens_.back().kind != Tok::dedent) {
      tokens_.push_back({Tok::newline, "", {}, line_});
    }
  }

  // Returns false when the line was blank or a comment (and was consumed).
  bool handle_indentation() {
    std::size_t col = 0;
    std::size_t p = pos_;
    while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t' || src_[p] == '\r' || src_[p] == '\f')) {
      col = src_[p] == '\t' ? (col / 8 + 1) * 8 : (src_[p] == ' ' ? col + 1 : col);
      ++p;
    }
    if (p >= src_.size()) {
      pos_ = p;
      return false;
    }
    if (src_[p] == '\n' || src_[p] == '#') {
      while (p < src_.size() && src_[p] != '\n') ++p;
      if (p < src_.size()) {
        ++p;
        ++line_;
      }
      pos_ = p;
      return false;
    }
    pos_ = p;
    if (col > indents_.back()) {
      indents_.push_back(col);
      tokens_.push_back({Tok::indent, "", {}, line_});
    } else {
      while (col < indents_.back()) {
        indents_.pop_back();
        tokens_.push_back({Tok::dedent, "", {}, line_});
      }
      if (col != indents_.back()) syntax_error(line_, "inconsistent dedent");
    }
    return true;
  }

  void lex_number() {
    std::size_t start = pos_;
    bool is_float = false;
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() && (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X')) {
      pos_ += 2;
      while (pos_ < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      std::string digits(src_.substr(start + 2, pos_ - start - 2));
      tokens_.push_back({Tok::number, "", Value(static_cast<std::int64_t>(std::stoll(digits, nullptr, 16))), line_});
      return;
    }
    auto digits = [&] {
      while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      is_float = true;
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        is_float = true;
        digits();
      } else {
        pos_ = save;
      }
    }
    std::string text;
    for (char ch : src_.substr(start, pos_ - start)) {
      if (ch != '_') text.push_back(ch);
    }
    bool imaginary = pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J');
    if (imaginary) ++pos_;
    double d = std::strtod(text.c_str(), nullptr);
    Value v;
    if (imaginary) {
      v = Value(Complex(0.0, d));
    } else if (is_float) {
      v = Value(d);
    } else {
      std::int64_t i = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), i);
      v = ec == std::errc() ? Value(i) : Value(d);
    }
    tokens_.push_back({Tok::number, text, std::move(v), line_});
  }

  void lex_string() {
    char quote = src_[pos_];
    bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote;
    pos_ += triple ? 3 : 1;
    std::string out;
    int start_line = line_;
    for (;;) {
      if (pos_ >= src_.size()) syntax_error(start_line, "unterminated string literal");
      char c = src_[pos_];
      if (triple) {
        if (c == quote && pos_ + 2 < src_.size() + 0 && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote) {
          pos_ += 3;
          break;
        }
      } else if (c == quote) {
        ++pos_;
        break;
      } else if (c == '\n') {
        syntax_error(start_line, "unterminated string literal");
      }
      if (c == '\n') ++line_;
      if (c == '\\' && pos_ + 1 < src_.size()) {
        char e = src_[pos_ + 1];
        pos_ += 2;
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '\\': out.push_back('\\'); break;
          case '\'': out.push_back('\''); break;
          case '"': out.push_back('"'); break;
          case '\n': ++line_; break;
          default: out.push_back('\\'); out.push_back(e); break;
        }
        continue;
      }
      out.push_back(c);
      ++pos_;
    }
    // Adjacent literals concatenate.
    if (!tokens_.empty() && tokens_.back().kind == Tok::string) {
      tokens_.back().text += out;
      return;
    }
    tokens_.push_back({Tok::string, std::move(out), {}, start_line});
  }

  void lex_operator() {
    static const std::array<std::string_view, 24> multi{"**=", "//=", ">>=", "<<=", "**", "//", "==", "!=",
                                                       "<=",  ">=",  "+=",  "-=",  "*=", "/=", "%=", "@=",
                                                       "&=",  "|=",  "^=",  "->",  ":=", "<<", ">>", "..."};
    for (auto m : multi) {
      if (src_.substr(pos_, m.size()) == m) {
        tokens_.push_back({Tok::op, std::string(m), {}, line_});
        pos_ += m.size();
        return;
      }
    }
    char c = src_[pos_];
    static constexpr std::string_view singles = "+-*/%@<>=()[]{},:.;&|^~";
    if (singles.find(c) == std::string_view::npos) {
      syntax_error(line_, std::string("unexpected character '") + c + "'");
    }
    if (c == '(' || c == '[' || c == '{') ++depth_;
    if (c == ')' || c == ']' || c == '}') depth_ = depth_ > 0 ? depth_ - 1 : 0;
    tokens_.push_back({Tok::op, std::string(1, c), {}, line_});
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int depth_ = 0;
  std::vector<std::size_t> indents_;
  std::vector<Token> tokens_;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Block parse_file() {
    Block body;
    while (peek().kind != Tok::end) {
      if (peek().kind == Tok::newline) {
        ++pos_;
        continue;
      }
      parse_statement(body);
    }
    return body;
  }

  ExprPtr parse_single_expression() {
    while (peek().kind == Tok::newline) ++pos_;
    auto e = parse_testlist();
    while (peek().kind == Tok::newline) ++pos_;
    if (peek().kind != Tok::end) syntax_error(peek().line, "unexpected trailing input");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_op(std::string_view op) const { return peek().kind == Tok::op && peek().text == op; }
  bool at_name(std::string_view kw) const { return peek().kind == Tok::name && peek().text == kw; }
  bool accept_op(std::string_view op) {
    if (at_op(op)) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool accept_name(std::string_view kw) {
    if (at_name(kw)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_op(std::string_view op) {
    if (!accept_op(op)) syntax_error(peek().line, "expected '" + std::string(op) + "'" + near());
  }
  void expect_name(std::string_view kw) {
    if (!accept_name(kw)) syntax_error(peek().line, "expected '" + std::string(kw) + "'" + near());
  }
  std::string near() const {
    const auto& t = peek();
    if (t.kind == Tok::newline) return " before end of line";
    if (t.kind == Tok::end) return " before end of input";
    if (t.kind == Tok::indent || t.kind == Tok::dedent) return " (indentation)";
    return " near '" + t.text + "'";
  }
  std::string expect_identifier() {
    if (peek().kind != Tok::name || is_keyword(peek().text)) {
      syntax_error(peek().line, "expected identifier" + near());
    }
    return toks_[pos_++].text;
  }
  static bool is_keyword(const std::string& s) {
    static const std::array<std::string_view, 26> kws{
        "def", "return", "if", "elif", "else", "for", "in", "while", "break", "continue", "pass", "import", "from",
        "as", "not", "and", "or", "is", "lambda", "None", "True", "False", "global", "nonlocal", "assert", "del"};
    for (auto k : kws) {
      if (s == k) return true;
    }
    return false;
  }

  void parse_statement(Block& out) {
    const auto& t = peek();
    if (t.kind == Tok::indent) syntax_error(t.line, "unexpected indent");
    if (t.kind == Tok::name) {
      if (t.text == "def") return out.push_back(parse_def({}));
      if (t.text == "if") return out.push_back(parse_if());
      if (t.text == "for") return out.push_back(parse_for());
      if (t.text == "while") return out.push_back(parse_while());
      if (t.text == "try" || t.text == "with" || t.text == "class") {
        syntax_error(t.line, "'" + t.text + "' statements are not supported");
      }
    }
    if (at_op("@")) {
      std::vector<ExprPtr> decorators;
      while (accept_op("@")) {
        decorators.push_back(parse_test());
        expect_newline();
      }
      if (!at_name("def")) syntax_error(peek().line, "decorator must precede a function definition");
      return out.push_back(parse_def(std::move(decorators)));
    }
    parse_simple_line(out);
  }

  void expect_newline() {
    if (peek().kind == Tok::newline) {
      ++pos_;
      return;
    }
    if (peek().kind == Tok::end || peek().kind == Tok::dedent) return;
    syntax_error(peek().line, "expected end of statement" + near());
  }

  void parse_simple_line(Block& out) {
    out.push_back(parse_small());
    while (accept_op(";")) {
      if (peek().kind == Tok::newline || peek().kind == Tok::end) break;
      out.push_back(parse_small());
    }
    expect_newline();
  }

  StmtPtr parse_small() {
    int line = peek().line;
    if (accept_name("pass")) return std::make_unique<Stmt>(Stmt::Kind::pass, line);
    if (accept_name("break")) return std::make_unique<Stmt>(Stmt::Kind::break_, line);
    if (accept_name("continue")) return std::make_unique<Stmt>(Stmt::Kind::continue_, line);
    if (accept_name("return")) {
      auto s = std::make_unique<Stmt>(Stmt::Kind::return_, line);
      if (peek().kind != Tok::newline && peek().kind != Tok::end && !at_op(";")) s->value = parse_testlist();
      return s;
    }
    if (at_name("global") || at_name("nonlocal")) {
      ++pos_;
      expect_identifier();
      while (accept_op(",")) expect_identifier();
      return std::make_unique<Stmt>(Stmt::Kind::pass, line);
    }
    if (accept_name("assert")) {
      // assert cond[, msg] -> if not cond: raise
      auto s = std::make_unique<Stmt>(Stmt::Kind::expr, line);
      auto call = std::make_unique<Expr>(Expr::Kind::call, line);
      auto fn = std::make_unique<Expr>(Expr::Kind::name, line);
      fn->name = "__assert__";
      call->a = std::move(fn);
      call->items.push_back(parse_test());
      if (accept_op(",")) call->items.push_back(parse_test());
      s->value = std::move(call);
      return s;
    }
    if (at_name("import") || at_name("from")) return parse_import();
    if (at_name("del")) syntax_error(line, "'del' is not supported");

    auto first = parse_testlist(true);
    if (accept_op(":")) {
      // annotated assignment: x: float = v
      parse_test();
      auto s = std::make_unique<Stmt>(Stmt::Kind::assign, line);
      if (accept_op("=")) {
        s->targets.push_back(std::move(first));
        s->value = parse_testlist();
        return s;
      }
      return std::make_unique<Stmt>(Stmt::Kind::pass, line);
    }
    static const std::array<std::pair<std::string_view, BinaryOp>, 11> aug{
        {{"+=", BinaryOp::add}, {"-=", BinaryOp::sub}, {"*=", BinaryOp::mul}, {"/=", BinaryOp::div},
         {"//=", BinaryOp::floordiv}, {"%=", BinaryOp::mod}, {"**=", BinaryOp::pow}, {"@=", BinaryOp::matmul},
         {"&=", BinaryOp::bit_and}, {"|=", BinaryOp::bit_or}, {"^=", BinaryOp::bit_xor}}};
    for (auto [text, op] : aug) {
      if (accept_op(text)) {
        auto s = std::make_unique<Stmt>(Stmt::Kind::aug_assign, line);
        check_target(*first);
        s->target = std::move(first);
        s->op = op;
        s->value = parse_testlist();
        return s;
      }
    }
    if (at_op("=")) {
      auto s = std::make_unique<Stmt>(Stmt::Kind::assign, line);
      s->targets.push_back(std::move(first));
      while (accept_op("=")) {
        auto next = parse_testlist(true);
        s->targets.push_back(std::move(next));
      }
      s->value = std::move(s->targets.back());
      s->targets.pop_back();
      for (auto& t : s->targets) check_target(*t);
      return s;
    }
    auto s = std::make_unique<Stmt>(Stmt::Kind::expr, line);
    s->value = std::move(first);
    return s;
  }

  void check_target(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::name:
      case Expr::Kind::subscript:
      case Expr::Kind::attribute: return;
      case Expr::Kind::tuple:
      case Expr::Kind::list:
        for (const auto& item : e.items) check_target(*item);
        return;
      default: syntax_error(e.line, "cannot assign to expression");
    }
  }

  StmtPtr parse_import() {
    int line = peek().line;
    auto s = std::make_unique<Stmt>(Stmt::Kind::import, line);
    if (accept_name("import")) {
      do {
        ImportName in;
        in.module = parse_dotted();
        in.alias = accept_name("as") ? expect_identifier() : in.module.substr(0, in.module.find('.'));
        if (in.alias == in.module.substr(0, in.module.find('.')) && in.module.find('.') != std::string::npos) {
          // `import jax.numpy` binds `jax`
          in.name = "__top__";
        }
        s->imports.push_back(std::move(in));
      } while (accept_op(","));
      return s;
    }
    expect_name("from");
    std::string module = parse_dotted();
    expect_name("import");
    bool paren = accept_op("(");
    do {
      if (paren && at_op(")")) break;
      ImportName in;
      in.module = module;
      in.name = accept_op("*") ? "*" : expect_identifier();
      in.alias = accept_name("as") ? expect_identifier() : in.name;
      s->imports.push_back(std::move(in));
    } while (accept_op(","));
    if (paren) expect_op(")");
    return s;
  }

  std::string parse_dotted() {
    std::string name = expect_identifier();
    while (accept_op(".")) name += "." + expect_identifier();
    return name;
  }

  Block parse_suite() {
    expect_op(":");
    Block body;
    if (peek().kind != Tok::newline) {
      parse_simple_line(body);
      return body;
    }
    ++pos_;
    if (peek().kind != Tok::indent) syntax_error(peek().line, "expected an indented block");
    ++pos_;
    while (peek().kind != Tok::dedent && peek().kind != Tok::end) {
      if (peek().kind == Tok::newline) {
        ++pos_;
        continue;
      }
      parse_statement(body);
    }
    if (peek().kind == Tok::dedent) ++pos_;
    return body;
  }

  StmtPtr parse_def(std::vector<ExprPtr> decorators) {
    int line = peek().line;
    expect_name("def");
    auto def = std::make_shared<FunctionDef>();
    def->line = line;
    def->name = expect_identifier();
    def->decorators = std::move(decorators);
    expect_op("(");
    parse_params(*def, ")");
    expect_op(")");
    if (accept_op("->")) parse_test();
    def->body = parse_suite();
    auto s = std::make_unique<Stmt>(Stmt::Kind::def, line);
    s->function = std::move(def);
    return s;
  }

  void parse_params(FunctionDef& def, std::string_view close) {
    while (!at_op(close)) {
      if (at_op("*") || at_op("**")) syntax_error(peek().line, "variadic parameters are not supported");
      def.params.push_back(expect_identifier());
      if (close == ")" && accept_op(":")) parse_test();
      if (accept_op("=")) {
        def.defaults.push_back(parse_test());
      } else if (!def.defaults.empty()) {
        syntax_error(peek().line, "non-default parameter follows default parameter");
      }
      if (!accept_op(",")) break;
    }
  }

  StmtPtr parse_if() {
    int line = peek().line;
    ++pos_;  // if / elif
    auto s = std::make_unique<Stmt>(Stmt::Kind::if_, line);
    s->condition = parse_test();
    s->body = parse_suite();
    if (at_name("elif")) {
      s->orelse.push_back(parse_if());
    } else if (accept_name("else")) {
      s->orelse = parse_suite();
    }
    return s;
  }

  StmtPtr parse_for() {
    int line = peek().line;
    expect_name("for");
    auto s = std::make_unique<Stmt>(Stmt::Kind::for_, line);
    s->target = parse_target_list();
    check_target(*s->target);
    expect_name("in");
    s->value = parse_testlist();
    s->body = parse_suite();
    if (accept_name("else")) s->orelse = parse_suite();
    return s;
  }

  StmtPtr parse_while() {
    int line = peek().line;
    expect_name("while");
    auto s = std::make_unique<Stmt>(Stmt::Kind::while_, line);
    s->condition = parse_test();
    s->body = parse_suite();
    if (accept_name("else")) s->orelse = parse_suite();
    return s;
  }

  ExprPtr parse_target_list() {
    int line = peek().line;
    auto first = parse_bitor();
    if (!at_op(",")) return first;
    auto tup = std::make_unique<Expr>(Expr::Kind::tuple, line);
    tup->items.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_name("in") || at_op("=")) break;
      tup->items.push_back(parse_bitor());
    }
    return tup;
  }

  // testlist: test (',' test)* [','] -> tuple when a comma is present.
  ExprPtr parse_testlist(bool allow_star = false) {
    (void)allow_star;
    int line = peek().line;
    auto first = parse_test();
    if (!at_op(",")) return first;
    auto tup = std::make_unique<Expr>(Expr::Kind::tuple, line);
    tup->items.push_back(std::move(first));
    while (accept_op(",")) {
      if (ends_testlist()) break;
      tup->items.push_back(parse_test());
    }
    return tup;
  }

  bool ends_testlist() const {
    const auto& t = peek();
    if (t.kind == Tok::newline || t.kind == Tok::end) return true;
    if (t.kind == Tok::op && (t.text == "=" || t.text == ")" || t.text == "]" || t.text == "}" || t.text == ":" ||
                              t.text == ";" || t.text.size() == 2 && t.text[1] == '=')) {
      return true;
    }
    return false;
  }

  ExprPtr parse_test() {
    if (at_name("lambda")) return parse_lambda();
    int line = peek().line;
    auto value = parse_or();
    if (accept_name("if")) {
      auto e = std::make_unique<Expr>(Expr::Kind::if_exp, line);
      e->b = parse_or();
      expect_name("else");
      e->c = parse_test();
      e->a = std::move(value);
      return e;
    }
    return value;
  }

  ExprPtr parse_lambda() {
    int line = peek().line;
    expect_name("lambda");
    auto def = std::make_shared<FunctionDef>();
    def->name = "<lambda>";
    def->line = line;
    parse_params(*def, ":");
    expect_op(":");
    def->lambda_body = parse_test();
    auto e = std::make_unique<Expr>(Expr::Kind::lambda, line);
    e->function = std::move(def);
    return e;
  }

  ExprPtr parse_or() {
    int line = peek().line;
    auto left = parse_and();
    while (accept_name("or")) {
      auto e = std::make_unique<Expr>(Expr::Kind::bool_or, line);
      e->a = std::move(left);
      e->b = parse_and();
      left = std::move(e);
    }
    return left;
  }

  ExprPtr parse_and() {
    int line = peek().line;
    auto left = parse_not();
    while (accept_name("and")) {
      auto e = std::make_unique<Expr>(Expr::Kind::bool_and, line);
      e->a = std::move(left);
      e->b = parse_not();
      left = std::move(e);
    }
    return left;
  }

  ExprPtr parse_not() {
    int line = peek().line;
    if (accept_name("not")) {
      auto e = std::make_unique<Expr>(Expr::Kind::unary, line);
      e->un_op = UnaryOp::not_;
      e->a = parse_not();
      return e;
    }
    return parse_comparison();
  }

  ExprPtr parse_comparison() {
    int line = peek().line;
    auto left = parse_bitor();
    std::unique_ptr<Expr> cmp;
    for (;;) {
      std::optional<CompareOp> op;
      if (accept_op("==")) op = CompareOp::eq;
      else if (accept_op("!=")) op = CompareOp::ne;
      else if (accept_op("<=")) op = CompareOp::le;
      else if (accept_op(">=")) op = CompareOp::ge;
      else if (accept_op("<")) op = CompareOp::lt;
      else if (accept_op(">")) op = CompareOp::gt;
      else if (accept_name("in")) op = CompareOp::in;
      else if (at_name("not") && peek(1).kind == Tok::name && peek(1).text == "in") {
        pos_ += 2;
        op = CompareOp::not_in;
      } else if (accept_name("is")) {
        op = accept_name("not") ? CompareOp::is_not : CompareOp::is;
      }
      if (!op) break;
      if (!cmp) {
        cmp = std::make_unique<Expr>(Expr::Kind::compare, line);
        cmp->a = std::move(left);
      }
      cmp->cmp_ops.push_back(*op);
      cmp->items.push_back(parse_bitor());
    }
    return cmp ? std::move(cmp) : std::move(left);
  }

  ExprPtr binary(ExprPtr l, BinaryOp op, ExprPtr r, int line) {
    auto e = std::make_unique<Expr>(Expr::Kind::binary, line);
    e->bin_op = op;
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
  }

  ExprPtr parse_bitor() {
    int line = peek().line;
    auto left = parse_bitxor();
    while (at_op("|")) {
      ++pos_;
      left = binary(std::move(left), BinaryOp::bit_or, parse_bitxor(), line);
    }
    return left;
  }
  ExprPtr parse_bitxor() {
    int line = peek().line;
    auto left = parse_bitand();
    while (at_op("^")) {
      ++pos_;
      left = binary(std::move(left), BinaryOp::bit_xor, parse_bitand(), line);
    }
    return left;
  }
  ExprPtr parse_bitand() {
    int line = peek().line;
    auto left = parse_arith();
    while (at_op("&")) {
      ++pos_;
      left = binary(std::move(left), BinaryOp::bit_and, parse_arith(), line);
    }
    return left;
  }

  ExprPtr parse_arith() {
    int line = peek().line;
    auto left = parse_term();
    for (;;) {
      if (accept_op("+")) left = binary(std::move(left), BinaryOp::add, parse_term(), line);
      else if (accept_op("-")) left = binary(std::move(left), BinaryOp::sub, parse_term(), line);
      else break;
    }
    return left;
  }

  ExprPtr parse_term() {
    int line = peek().line;
    auto left = parse_factor();
    for (;;) {
      if (accept_op("*")) left = binary(std::move(left), BinaryOp::mul, parse_factor(), line);
      else if (accept_op("/")) left = binary(std::move(left), BinaryOp::div, parse_factor(), line);
      else if (accept_op("//")) left = binary(std::move(left), BinaryOp::floordiv, parse_factor(), line);
      else if (accept_op("%")) left = binary(std::move(left), BinaryOp::mod, parse_factor(), line);
      else if (accept_op("@")) left = binary(std::move(left), BinaryOp::matmul, parse_factor(), line);
      else break;
    }
    return left;
  }

  ExprPtr parse_factor() {
    int line = peek().line;
    std::optional<UnaryOp> op;
    if (accept_op("-")) op = UnaryOp::neg;
    else if (accept_op("+")) op = UnaryOp::pos;
    else if (accept_op("~")) op = UnaryOp::invert;
    if (op) {
      auto e = std::make_unique<Expr>(Expr::Kind::unary, line);
      e->un_op = *op;
      e->a = parse_factor();
      return e;
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    int line = peek().line;
    auto base = parse_atom_expr();
    if (accept_op("**")) return binary(std::move(base), BinaryOp::pow, parse_factor(), line);
    return base;
  }

  ExprPtr parse_atom_expr() {
    auto e = parse_atom();
    for (;;) {
      int line = peek().line;
      if (accept_op("(")) {
        auto call = std::make_unique<Expr>(Expr::Kind::call, line);
        call->a = std::move(e);
        parse_call_args(*call);
        expect_op(")");
        e = std::move(call);
      } else if (accept_op("[")) {
        auto sub = std::make_unique<Expr>(Expr::Kind::subscript, line);
        sub->a = std::move(e);
        sub->b = parse_subscript_list();
        expect_op("]");
        e = std::move(sub);
      } else if (accept_op(".")) {
        auto attr = std::make_unique<Expr>(Expr::Kind::attribute, line);
        attr->a = std::move(e);
        attr->name = expect_identifier_or_keyword();
        e = std::move(attr);
      } else {
        break;
      }
    }
    return e;
  }

  std::string expect_identifier_or_keyword() {
    if (peek().kind != Tok::name) syntax_error(peek().line, "expected attribute name" + near());
    return toks_[pos_++].text;
  }

  void parse_call_args(Expr& call) {
    while (!at_op(")")) {
      if (at_op("*") || at_op("**")) syntax_error(peek().line, "argument unpacking is not supported");
      if (peek().kind == Tok::name && peek(1).kind == Tok::op && peek(1).text == "=") {
        std::string key = toks_[pos_].text;
        pos_ += 2;
        call.kwargs.emplace_back(std::move(key), parse_test());
      } else {
        int line = peek().line;
        auto arg = parse_test();
        if (at_name("for")) {
          auto comp = std::make_unique<Expr>(Expr::Kind::list_comp, line);
          comp->a = std::move(arg);
          parse_comprehension(*comp);
          arg = std::move(comp);
        }
        call.items.push_back(std::move(arg));
      }
      if (!accept_op(",")) break;
    }
  }

  ExprPtr parse_subscript_list() {
    int line = peek().line;
    auto first = parse_subscript();
    if (!at_op(",")) return first;
    auto tup = std::make_unique<Expr>(Expr::Kind::tuple, line);
    tup->items.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_op("]")) break;
      tup->items.push_back(parse_subscript());
    }
    return tup;
  }

  ExprPtr parse_subscript() {
    int line = peek().line;
    ExprPtr start;
    if (!at_op(":")) {
      start = parse_test();
      if (!at_op(":")) return start;
    }
    auto s = std::make_unique<Expr>(Expr::Kind::slice, line);
    s->a = std::move(start);
    expect_op(":");
    if (!at_op(":") && !at_op("]") && !at_op(",")) s->b = parse_test();
    if (accept_op(":")) {
      if (!at_op("]") && !at_op(",")) s->c = parse_test();
    }
    return s;
  }

  void parse_comprehension(Expr& comp) {
    while (accept_name("for")) {
      Comprehension gen;
      gen.target = parse_target_list();
      check_target(*gen.target);
      expect_name("in");
      gen.iter = parse_or();
      while (at_name("if")) {
        ++pos_;
        gen.conditions.push_back(parse_or());
      }
      comp.generators.push_back(std::move(gen));
    }
  }

  ExprPtr parse_atom() {
    const Token& t = peek();
    int line = t.line;
    if (t.kind == Tok::number) {
      auto e = std::make_unique<Expr>(Expr::Kind::constant, line);
      e->constant = t.number;
      ++pos_;
      return e;
    }
    if (t.kind == Tok::string) {
      auto e = std::make_unique<Expr>(Expr::Kind::constant, line);
      e->constant = Value(t.text);
      ++pos_;
      return e;
    }
    if (t.kind == Tok::name) {
      if (t.text == "None" || t.text == "True" || t.text == "False") {
        auto e = std::make_unique<Expr>(Expr::Kind::constant, line);
        if (t.text == "True") e->constant = Value(true);
        else if (t.text == "False") e->constant = Value(false);
        ++pos_;
        return e;
      }
      if (is_keyword(t.text)) syntax_error(line, "unexpected keyword '" + t.text + "'");
      auto e = std::make_unique<Expr>(Expr::Kind::name, line);
      e->name = t.text;
      ++pos_;
      return e;
    }
    if (accept_op("(")) {
      if (accept_op(")")) return std::make_unique<Expr>(Expr::Kind::tuple, line);
      auto first = parse_test();
      if (at_name("for")) {
        auto comp = std::make_unique<Expr>(Expr::Kind::list_comp, line);
        comp->a = std::move(first);
        parse_comprehension(*comp);
        expect_op(")");
        return comp;
      }
      if (accept_op(")")) return first;
      auto tup = std::make_unique<Expr>(Expr::Kind::tuple, line);
      tup->items.push_back(std::move(first));
      while (accept_op(",")) {
        if (at_op(")")) break;
        tup->items.push_back(parse_test());
      }
      expect_op(")");
      return tup;
    }
    if (accept_op("[")) {
      auto list = std::make_unique<Expr>(Expr::Kind::list, line);
      if (accept_op("]")) return list;
      auto first = parse_test();
      if (at_name("for")) {
        auto comp = std::make_unique<Expr>(Expr::Kind::list_comp, line);
        comp->a = std::move(first);
        parse_comprehension(*comp);
        expect_op("]");
        return comp;
      }
      list->items.push_back(std::move(first));
      while (accept_op(",")) {
        if (at_op("]")) break;
        list->items.push_back(parse_test());
      }
      expect_op("]");
      return list;
    }
    if (accept_op("{")) {
      auto dict = std::make_unique<Expr>(Expr::Kind::dict, line);
      if (accept_op("}")) return dict;
      auto key = parse_test();
      expect_op(":");
      auto value = parse_test();
      if (at_name("for")) {
        auto comp = std::make_unique<Expr>(Expr::Kind::dict_comp, line);
        comp->a = std::move(key);
        comp->b = std::move(value);
        parse_comprehension(*comp);
        expect_op("}");
        return comp;
      }
      dict->keys.push_back(std::move(key));
      dict->items.push_back(std::move(value));
      while (accept_op(",")) {
        if (at_op("}")) break;
        dict->keys.push_back(parse_test());
        expect_op(":");
        dict->items.push_back(parse_test());
      }
      expect_op("}");
      return dict;
    }
    syntax_error(line, "invalid syntax" + near());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

std::shared_ptr<const Module> parse_module(std::string_view source) {
  Parser p(Lexer(source).run());
  auto m = std::make_shared<Module>();
  m->body = p.parse_file();
  return m;
}

std::shared_ptr<const Expr> parse_expression(std::string_view source) {
  Parser p(Lexer(source).run());
  return p.parse_single_expression();
}

}  // namespace sciexp::script
