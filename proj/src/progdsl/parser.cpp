#include <algorithm>
#include <set>

#include "cfrag/progdsl.hpp"
#include "lexer.hpp"

namespace cfrag::dsl {

std::string_view builtin_name(Builtin b) {
  switch (b) {
    case Builtin::MaxByValue: return "max_by_value";
    case Builtin::MinByValue: return "min_by_value";
    case Builtin::TopN: return "top_n";
  }
  return "?";
}

namespace {

using detail::Tok;
using detail::Token;

std::optional<Builtin> lookup_builtin(std::string_view name) {
  for (auto b : {Builtin::MaxByValue, Builtin::MinByValue, Builtin::TopN}) {
    if (builtin_name(b) == name) return b;
  }
  return std::nullopt;
}

std::size_t builtin_arity(Builtin b) { return b == Builtin::TopN ? 2 : 1; }

// Parse failures unwind via this exception and are converted to ExecError
// at the parse() boundary.
struct Failure {
  ExecError error;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const Limits& limits)
      : toks_(std::move(tokens)), limits_(limits) {}

  Program program() {
    Program prog;
    skip_newlines();
    if (peek().kind == Tok::End) fail(peek(), "empty program");
    while (peek().kind != Tok::End) {
      prog.statements.push_back(statement());
      if (peek().kind != Tok::End) {
        expect(Tok::Newline, "end of statement");
        skip_newlines();
      }
    }
    return prog;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const Token& at, std::string msg) {
    throw Failure{ExecError{ErrorKind::ParseError, std::move(msg), at.pos.line, at.pos.column}};
  }

  const Token& expect(Tok kind, std::string_view what) {
    if (peek().kind != kind) {
      fail(peek(), "expected " + std::string(what) + ", found " +
                       std::string(detail::describe(peek().kind)) +
                       (peek().text.empty() ? "" : " '" + peek().text + "'"));
    }
    return take();
  }

  void skip_newlines() {
    while (peek().kind == Tok::Newline) take();
  }

  Statement statement() {
    const Token& name = expect(Tok::Ident, "variable name");
    if (lookup_builtin(name.text)) fail(name, "cannot assign to builtin " + name.text);
    Statement st;
    st.target = name.text;
    st.pos = name.pos;
    expect(Tok::Assign, "'='");
    st.value = expression();
    return st;
  }

  static int child_height(const ExprPtr& p) { return p ? p->height : 0; }

  static int height_of(const UnaryOp& n) { return child_height(n.operand); }
  static int height_of(const BinaryOp& n) {
    return std::max(child_height(n.lhs), child_height(n.rhs));
  }
  static int height_of(const ListLit& n) {
    int h = 0;
    for (const auto& item : n.items) h = std::max(h, child_height(item));
    return h;
  }
  static int height_of(const DictLit& n) {
    int h = 0;
    for (const auto& kv : n.entries) h = std::max(h, child_height(kv.second));
    return h;
  }
  static int height_of(const Call& n) {
    int h = 0;
    for (const auto& arg : n.args) h = std::max(h, child_height(arg));
    return h;
  }
  static int height_of(const auto&) { return 0; }

  // Deep trees would exhaust the stack in evaluation and destruction.
  ExprPtr make(SourcePos pos, auto node) {
    auto e = std::make_unique<Expr>();
    e->height = height_of(node) + 1;
    if (e->height > limits_.max_depth) {
      throw Failure{ExecError{ErrorKind::ParseError, "expression nested too deeply", pos.line,
                              pos.column}};
    }
    e->node = std::move(node);
    e->pos = pos;
    return e;
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser, const Token& at) : p(parser) {
      if (++p.depth_ > p.limits_.max_depth) p.fail(at, "expression nested too deeply");
    }
    ~DepthGuard() { --p.depth_; }
  };

  ExprPtr expression() {
    DepthGuard guard(*this, peek());
    auto lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Token& op = take();
      auto rhs = term();
      lhs = make(op.pos, BinaryOp{op.text[0], std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  ExprPtr term() {
    auto lhs = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Token& op = take();
      auto rhs = unary();
      lhs = make(op.pos, BinaryOp{op.text[0], std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  ExprPtr unary() {
    if (peek().kind == Tok::Minus || peek().kind == Tok::Plus) {
      DepthGuard guard(*this, peek());
      const Token& op = take();
      return make(op.pos, UnaryOp{op.text[0], unary()});
    }
    return primary();
  }

  ExprPtr primary() {
    const Token& tok = peek();
    switch (tok.kind) {
      case Tok::Number:
        take();
        return make(tok.pos, NumberLit{tok.number});
      case Tok::String:
        take();
        return make(tok.pos, StringLit{tok.text});
      case Tok::Ident:
        return identifier();
      case Tok::LParen: {
        take();
        auto inner = expression();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::LBracket:
        return list();
      case Tok::LBrace:
        return dict();
      default:
        fail(tok, "expected an expression, found " + std::string(detail::describe(tok.kind)));
    }
  }

  ExprPtr identifier() {
    const Token& name = take();
    auto builtin = lookup_builtin(name.text);
    if (peek().kind != Tok::LParen) {
      if (builtin) fail(name, "builtin " + name.text + " must be called");
      return make(name.pos, VarRef{name.text});
    }
    if (!builtin) fail(name, "unknown function " + name.text);
    take();  // (
    Call call{*builtin, {}};
    if (peek().kind != Tok::RParen) {
      call.args.push_back(expression());
      while (peek().kind == Tok::Comma) {
        take();
        call.args.push_back(expression());
      }
    }
    expect(Tok::RParen, "')'");
    if (call.args.size() != builtin_arity(*builtin)) {
      fail(name, name.text + " expects " + std::to_string(builtin_arity(*builtin)) +
                     " argument(s), got " + std::to_string(call.args.size()));
    }
    return make(name.pos, std::move(call));
  }

  ExprPtr list() {
    const Token& open = take();
    ListLit lit;
    while (peek().kind != Tok::RBracket) {
      lit.items.push_back(expression());
      if (peek().kind == Tok::Comma) {
        take();
      } else if (peek().kind != Tok::RBracket) {
        expect(Tok::RBracket, "',' or ']'");
      }
    }
    take();
    return make(open.pos, std::move(lit));
  }

  ExprPtr dict() {
    const Token& open = take();
    DictLit lit;
    std::set<std::string> keys;
    while (peek().kind != Tok::RBrace) {
      const Token& key = expect(Tok::String, "string key");
      if (!keys.insert(key.text).second) fail(key, "duplicate dictionary key \"" + key.text + "\"");
      expect(Tok::Colon, "':'");
      lit.entries.emplace_back(key.text, expression());
      if (peek().kind == Tok::Comma) {
        take();
      } else if (peek().kind != Tok::RBrace) {
        expect(Tok::RBrace, "',' or '}'");
      }
    }
    take();
    return make(open.pos, std::move(lit));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  const Limits& limits_;
};

}  // namespace

Outcome<Program> parse(std::string_view source, const Limits& limits) {
  auto tokens = detail::tokenize(source);
  if (!tokens) return tokens.error();
  try {
    Parser parser(std::move(tokens).value(), limits);
    return parser.program();
  } catch (const Failure& f) {
    return f.error;
  }
}

}  // namespace cfrag::dsl
