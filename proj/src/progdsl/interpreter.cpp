#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_map>

#include "cfrag/progdsl.hpp"

namespace cfrag::dsl {

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UndefinedVariable: return "UndefinedVariable";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::MissingAnswer: return "MissingAnswer";
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::StepLimitExceeded: return "StepLimitExceeded";
  }
  return "Error";
}

std::string ExecError::describe() const {
  std::string out(to_string(kind));
  if (line > 0) out += " at " + std::to_string(line) + ":" + std::to_string(column);
  if (!message.empty()) out += ": " + message;
  return out;
}

AnswerItem max_by_value(const NumericDict& d) {
  if (d.empty()) throw std::invalid_argument("max_by_value of an empty dictionary");
  const auto* best = &d.front();
  for (const auto& kv : d) {
    if (kv.second > best->second) best = &kv;
  }
  return labeled(best->first, best->second);
}

AnswerItem min_by_value(const NumericDict& d) {
  if (d.empty()) throw std::invalid_argument("min_by_value of an empty dictionary");
  const auto* best = &d.front();
  for (const auto& kv : d) {
    if (kv.second < best->second) best = &kv;
  }
  return labeled(best->first, best->second);
}

AnswerList top_n(const NumericDict& d, long n) {
  if (n < 1) throw std::invalid_argument("top_n requires n >= 1");
  NumericDict sorted = d;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(n), sorted.size());
  AnswerList out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(labeled(sorted[i].first, sorted[i].second));
  return out;
}

namespace {

struct Value;
using ListValue = std::vector<Value>;
using DictValue = std::vector<std::pair<std::string, Value>>;

struct Labeled {
  std::string label;
  double value;
};

struct Value {
  std::variant<double, std::string, Labeled, std::shared_ptr<const ListValue>,
               std::shared_ptr<const DictValue>>
      v;
};

std::string_view type_name(const Value& v) {
  switch (v.v.index()) {
    case 0: return "number";
    case 1: return "string";
    case 2: return "pair";
    case 3: return "list";
    default: return "dict";
  }
}

struct Abort {
  ExecError error;
};

class Interpreter {
 public:
  explicit Interpreter(const Limits& limits) : limits_(limits) {}

  AnswerList run(const Program& program) {
    for (const auto& st : program.statements) env_[st.target] = eval(*st.value);
    auto it = env_.find("answer");
    if (it == env_.end()) abort(ErrorKind::MissingAnswer, "program never assigns `answer`", {0, 0});
    return to_answers(it->second);
  }

 private:
  [[noreturn]] static void abort(ErrorKind kind, std::string msg, SourcePos pos) {
    throw Abort{ExecError{kind, std::move(msg), pos.line, pos.column}};
  }

  void step(const Expr& e) {
    if (++steps_ > limits_.max_steps) {
      abort(ErrorKind::StepLimitExceeded,
            "more than " + std::to_string(limits_.max_steps) + " evaluation steps", e.pos);
    }
  }

  double as_number(const Value& v, const Expr& at, std::string_view context) {
    if (const auto* d = std::get_if<double>(&v.v)) return *d;
    abort(ErrorKind::TypeError,
          std::string(context) + " needs a number, got " + std::string(type_name(v)), at.pos);
  }

  Value eval(const Expr& e) {
    step(e);
    return std::visit([&](const auto& node) { return eval_node(node, e); }, e.node);
  }

  Value eval_node(const NumberLit& n, const Expr&) { return {n.value}; }
  Value eval_node(const StringLit& s, const Expr&) { return {s.value}; }

  Value eval_node(const VarRef& r, const Expr& e) {
    auto it = env_.find(r.name);
    if (it == env_.end()) abort(ErrorKind::UndefinedVariable, r.name, e.pos);
    return it->second;
  }

  Value eval_node(const UnaryOp& u, const Expr& e) {
    const double x = as_number(eval(*u.operand), e, "unary operator");
    return {u.op == '-' ? -x : x};
  }

  Value eval_node(const BinaryOp& b, const Expr& e) {
    const auto context = std::string("operator '") + b.op + "'";
    const double lhs = as_number(eval(*b.lhs), e, context);
    const double rhs = as_number(eval(*b.rhs), e, context);
    double out = 0.0;
    switch (b.op) {
      case '+': out = lhs + rhs; break;
      case '-': out = lhs - rhs; break;
      case '*': out = lhs * rhs; break;
      case '/':
        if (rhs == 0.0) abort(ErrorKind::DivisionByZero, "division by zero", e.pos);
        out = lhs / rhs;
        break;
    }
    if (!std::isfinite(out)) abort(ErrorKind::TypeError, "arithmetic overflow", e.pos);
    return {out};
  }

  Value eval_node(const ListLit& l, const Expr&) {
    auto items = std::make_shared<ListValue>();
    items->reserve(l.items.size());
    for (const auto& item : l.items) items->push_back(eval(*item));
    return {std::shared_ptr<const ListValue>(std::move(items))};
  }

  Value eval_node(const DictLit& d, const Expr&) {
    auto entries = std::make_shared<DictValue>();
    entries->reserve(d.entries.size());
    for (const auto& [key, expr] : d.entries) entries->emplace_back(key, eval(*expr));
    return {std::shared_ptr<const DictValue>(std::move(entries))};
  }

  NumericDict numeric_dict(const Value& v, const Expr& at, std::string_view fn) {
    const auto* dict = std::get_if<std::shared_ptr<const DictValue>>(&v.v);
    if (dict == nullptr) {
      abort(ErrorKind::TypeError,
            std::string(fn) + " needs a dict, got " + std::string(type_name(v)), at.pos);
    }
    NumericDict out;
    out.reserve((*dict)->size());
    for (const auto& [key, value] : **dict) {
      const auto* num = std::get_if<double>(&value.v);
      if (num == nullptr) {
        abort(ErrorKind::TypeError,
              std::string(fn) + ": value for \"" + key + "\" is not a number", at.pos);
      }
      out.emplace_back(key, *num);
    }
    if (out.empty()) abort(ErrorKind::TypeError, std::string(fn) + " of an empty dict", at.pos);
    return out;
  }

  Value eval_node(const Call& c, const Expr& e) {
    const auto fn = builtin_name(c.fn);
    const auto dict = numeric_dict(eval(*c.args[0]), e, fn);
    switch (c.fn) {
      case Builtin::MaxByValue: {
        auto item = max_by_value(dict);
        return {Labeled{*item.label, item.value}};
      }
      case Builtin::MinByValue: {
        auto item = min_by_value(dict);
        return {Labeled{*item.label, item.value}};
      }
      case Builtin::TopN: {
        const double n = as_number(eval(*c.args[1]), e, "top_n count");
        if (n < 1.0 || n != std::floor(n) || n > 1e9) {
          abort(ErrorKind::TypeError, "top_n count must be a positive integer", e.pos);
        }
        auto items = std::make_shared<ListValue>();
        for (auto& item : top_n(dict, static_cast<long>(n))) {
          items->push_back({Labeled{std::move(*item.label), item.value}});
        }
        return {std::shared_ptr<const ListValue>(std::move(items))};
      }
    }
    abort(ErrorKind::TypeError, "unknown builtin", e.pos);
  }

  AnswerList to_answers(const Value& v) {
    const auto* list = std::get_if<std::shared_ptr<const ListValue>>(&v.v);
    if (list == nullptr) {
      abort(ErrorKind::TypeError, "`answer` must be a list, got " + std::string(type_name(v)),
            {0, 0});
    }
    AnswerList out;
    out.reserve((*list)->size());
    for (const auto& item : **list) {
      if (const auto* d = std::get_if<double>(&item.v)) {
        out.push_back(number(*d));
      } else if (const auto* l = std::get_if<Labeled>(&item.v)) {
        out.push_back(labeled(l->label, l->value));
      } else if (const auto* pair = std::get_if<std::shared_ptr<const ListValue>>(&item.v);
                 pair != nullptr && (*pair)->size() == 2 &&
                 std::holds_alternative<std::string>((**pair)[0].v) &&
                 std::holds_alternative<double>((**pair)[1].v)) {
        out.push_back(labeled(std::get<std::string>((**pair)[0].v), std::get<double>((**pair)[1].v)));
      } else {
        abort(ErrorKind::TypeError,
              "`answer` items must be numbers or [name, number] pairs, got " +
                  std::string(type_name(item)),
              {0, 0});
      }
    }
    return out;
  }

  const Limits& limits_;
  int steps_ = 0;
  std::unordered_map<std::string, Value> env_;
};

}  // namespace

Outcome<AnswerList> execute(const Program& program, const Limits& limits) {
  try {
    return Interpreter(limits).run(program);
  } catch (const Abort& a) {
    return a.error;
  }
}

Outcome<AnswerList> run(std::string_view source, const Limits& limits) {
  auto program = parse(source, limits);
  if (!program) return program.error();
  return execute(program.value(), limits);
}

}  // namespace cfrag::dsl
