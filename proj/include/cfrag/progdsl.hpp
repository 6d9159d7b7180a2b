#pragma once

// The restricted answer-program language.
//
//   program := stmt (NEWLINE stmt)*
//   stmt    := IDENT "=" expr
//   expr    := arithmetic over numbers and identifiers with + - * / ( )
//            | {"key": expr, ...} | [expr, ...] | STRING
//            | max_by_value(dict) | min_by_value(dict) | top_n(dict, n)
//
// Newlines inside brackets are ignored. Comments, keywords, loops, attribute
// access and any other function call are parse errors. The variable `answer`
// must hold a list after the last statement.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace cfrag::dsl {

struct AnswerItem {
  std::optional<std::string> label;  // set for key-value answers
  double value = 0.0;

  bool operator==(const AnswerItem&) const = default;
};

using AnswerList = std::vector<AnswerItem>;

inline AnswerItem number(double v) { return {std::nullopt, v}; }
inline AnswerItem labeled(std::string label, double v) { return {std::move(label), v}; }

// Numbers serialize as JSON numbers, labeled items as [label, number].
nlohmann::json to_json(const AnswerList& answers);
AnswerList answers_from_json(const nlohmann::json& j);  // throws DataError

enum class ErrorKind {
  ParseError,
  UndefinedVariable,
  DivisionByZero,
  MissingAnswer,
  TypeError,
  StepLimitExceeded,
};

std::string_view to_string(ErrorKind k);

struct ExecError {
  ErrorKind kind;
  std::string message;
  int line = 0;  // 1-based; 0 when not tied to a position
  int column = 0;

  std::string describe() const;
};

template <typename T>
class Outcome {
 public:
  Outcome(T value) : v_(std::move(value)) {}
  Outcome(ExecError error) : v_(std::move(error)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    if (!ok()) throw std::logic_error("Outcome::value on error: " + error().describe());
    return std::get<0>(v_);
  }
  T&& value() && {
    if (!ok()) throw std::logic_error("Outcome::value on error: " + error().describe());
    return std::get<0>(std::move(v_));
  }
  const ExecError& error() const { return std::get<1>(v_); }

 private:
  std::variant<T, ExecError> v_;
};

// ---------------------------------------------------------------------------
// AST

struct SourcePos {
  int line = 1;
  int column = 1;
};

struct Expr;
using ExprPtr = std::unique_ptr<const Expr>;

enum class Builtin { MaxByValue, MinByValue, TopN };

std::string_view builtin_name(Builtin b);

struct NumberLit {
  double value;
};
struct StringLit {
  std::string value;
};
struct VarRef {
  std::string name;
};
struct UnaryOp {
  char op;  // '-' or '+'
  ExprPtr operand;
};
struct BinaryOp {
  char op;  // + - * /
  ExprPtr lhs;
  ExprPtr rhs;
};
struct ListLit {
  std::vector<ExprPtr> items;
};
struct DictLit {
  std::vector<std::pair<std::string, ExprPtr>> entries;
};
struct Call {
  Builtin fn;
  std::vector<ExprPtr> args;
};

struct Expr {
  std::variant<NumberLit, StringLit, VarRef, UnaryOp, BinaryOp, ListLit, DictLit, Call> node;
  SourcePos pos;
  int height = 1;  // subtree height, bounded by Limits::max_depth
};

struct Statement {
  std::string target;
  ExprPtr value;
  SourcePos pos;
};

struct Program {
  std::vector<Statement> statements;
};

struct Limits {
  int max_steps = 10000;  // evaluated AST nodes per program
  int max_depth = 200;    // expression nesting accepted by the parser
};

Outcome<Program> parse(std::string_view source, const Limits& limits = {});
Outcome<AnswerList> execute(const Program& program, const Limits& limits = {});

// parse + execute
Outcome<AnswerList> run(std::string_view source, const Limits& limits = {});

// ---------------------------------------------------------------------------
// Builtins over insertion-ordered numeric dictionaries. Ties resolve to the
// earlier entry.

using NumericDict = std::vector<std::pair<std::string, double>>;

AnswerItem max_by_value(const NumericDict& d);  // throws std::invalid_argument on empty
AnswerItem min_by_value(const NumericDict& d);
AnswerList top_n(const NumericDict& d, long n);  // n >= 1; clamps to d.size()

}  // namespace cfrag::dsl
