#include "doctest.h"

#include "oracles/expr_oracle.hpp"

#include "cfrag/progdsl.hpp"
#include "cfrag/util/errors.hpp"

using namespace cfrag;
using namespace cfrag::dsl;

namespace {

const char* kCalcProgram =
    "total_carbon=505.0\n"
    "manufacturing_percent=0.5\n"
    "display_percent=0.24\n"
    "manufacturing_carbon=total_carbon*manufacturing_percent\n"
    "display_carbon=total_carbon*manufacturing_percent*display_percent\n"
    "answer=[manufacturing_carbon, display_carbon]";

ErrorKind error_of(std::string_view src) {
  auto r = run(src);
  REQUIRE_FALSE(r.ok());
  return r.error().kind;
}

}  // namespace

TEST_CASE("calculation program parses into six statements") {
  auto p = parse(kCalcProgram);
  REQUIRE(p.ok());
  CHECK(p.value().statements.size() == 6);
  CHECK(p.value().statements.back().target == "answer");
}

TEST_CASE("calculation program evaluates to the hand result") {
  auto r = run(kCalcProgram);
  REQUIRE(r.ok());
  REQUIRE(r.value().size() == 2);
  CHECK(r.value()[0].value == doctest::Approx(252.5).epsilon(1e-12));
  CHECK(r.value()[1].value == doctest::Approx(60.6).epsilon(1e-12));
  CHECK_FALSE(r.value()[0].label);
}

TEST_CASE("simple arithmetic") {
  auto r = run("x=2\ny=x*3\nanswer=[y]");
  REQUIRE(r.ok());
  CHECK(r.value() == AnswerList{number(6.0)});
  CHECK(run("answer=[-(2+3)*2, 7/2, +1]").value() == AnswerList{number(-10), number(3.5), number(1)});
}

TEST_CASE("grammar rejects constructs outside the subset") {
  CHECK(error_of("import os") == ErrorKind::ParseError);
  CHECK(error_of("x = open('f')\nanswer=[1]") == ErrorKind::ParseError);
  CHECK(error_of("x=1 # comment\nanswer=[x]") == ErrorKind::ParseError);
  CHECK(error_of("for i in x:\n  y=1") == ErrorKind::ParseError);
  CHECK(error_of("x=a.b\nanswer=[x]") == ErrorKind::ParseError);
  CHECK(error_of("answer=[1]; x=2") == ErrorKind::ParseError);
  CHECK(error_of("answer=[1,2") == ErrorKind::ParseError);
}

TEST_CASE("unbalanced bracket reports end of input") {
  auto r = run("answer=[1,2");
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().line == 1);
  CHECK(r.error().column == 12);
}

TEST_CASE("newlines inside brackets are ignored") {
  auto r = run("c={\n\"a\": 1,\n\"b\": 2\n}\nanswer=[\n max_by_value(c)\n]");
  REQUIRE(r.ok());
  CHECK(r.value() == AnswerList{labeled("b", 2)});
}

TEST_CASE("runtime errors are classified") {
  CHECK(error_of("x=1/0\nanswer=[x]") == ErrorKind::DivisionByZero);
  CHECK(error_of("answer=[y]") == ErrorKind::UndefinedVariable);
  CHECK(error_of("x=1") == ErrorKind::MissingAnswer);
  CHECK(error_of("answer=5") == ErrorKind::TypeError);
  CHECK(error_of("x=[1]+2\nanswer=[x]") == ErrorKind::TypeError);
  CHECK(error_of("answer=[max_by_value(3)]") == ErrorKind::TypeError);
  CHECK(error_of("answer=[\"s\"+1]") == ErrorKind::TypeError);
}

TEST_CASE("step limit stops runaway programs") {
  std::string src = "x0=1\n";
  for (int i = 1; i < 200; ++i) src += "x" + std::to_string(i) + "=x" + std::to_string(i - 1) + "+x" + std::to_string(i - 1) + "+1\n";
  src += "answer=[x199]";
  Limits tight;
  tight.max_steps = 50;
  auto r = run(src, tight);
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().kind == ErrorKind::StepLimitExceeded);
}

TEST_CASE("deep nesting is rejected instead of overflowing") {
  std::string deep = "answer=[" + std::string(5000, '(') + "1" + std::string(5000, ')') + "]";
  CHECK(error_of(deep) == ErrorKind::ParseError);
  std::string chain = "answer=[1";
  for (int i = 0; i < 5000; ++i) chain += "+1";
  chain += "]";
  CHECK(error_of(chain) == ErrorKind::ParseError);
}

TEST_CASE("builtins: argmax, argmin and top_n") {
  CHECK(run("answer=[max_by_value({\"display\":24,\"mainboard\":30})]").value() ==
        AnswerList{labeled("mainboard", 30)});
  CHECK(run("answer=[min_by_value({\"display\":24,\"mainboard\":30})]").value() ==
        AnswerList{labeled("display", 24)});
  CHECK(top_n({{"a", 5}, {"b", 9}, {"c", 7}}, 2) == AnswerList{labeled("b", 9), labeled("c", 7)});
  CHECK(top_n({{"a", 5}}, 3) == AnswerList{labeled("a", 5)});
  CHECK(top_n({{"a", 5}, {"b", 5}}, 1) == AnswerList{labeled("a", 5)});
  CHECK(max_by_value({{"a", 5}, {"b", 5}}) == labeled("a", 5));
  CHECK_THROWS_AS(max_by_value({}), std::invalid_argument);
  CHECK(run("answer=top_n({\"a\":1,\"b\":3}, 5)").value() == AnswerList{labeled("b", 3), labeled("a", 1)});
  CHECK(error_of("answer=top_n({\"a\":1}, 0)") == ErrorKind::TypeError);
  CHECK(error_of("answer=[max_by_value({})]") == ErrorKind::TypeError);
}

TEST_CASE("answer json round trip") {
  const AnswerList a{number(1.5), labeled("ssd", 21.0)};
  const auto j = to_json(a);
  CHECK(j.dump() == "[1.5,[\"ssd\",21.0]]");
  CHECK(answers_from_json(j) == a);
  CHECK_THROWS_AS(answers_from_json(nlohmann::json::object()), DataError);
  CHECK_THROWS_AS(answers_from_json(nlohmann::json::parse("[[1,2]]")), DataError);
}

TEST_CASE("interpreter agrees with the independent evaluator") {
  oracle::ExprGenerator gen(99);
  for (int i = 0; i < 300; ++i) {
    const auto p = gen.program();
    auto r = run(p.source);
    REQUIRE_MESSAGE(r.ok(), p.source);
    REQUIRE(r.value().size() == 1);
    CHECK_MESSAGE(oracle::close_relative(r.value()[0].value, p.expected), p.source);
  }
}
