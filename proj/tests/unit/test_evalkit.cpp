#include "doctest.h"
#include "helpers.hpp"

#include <random>

#include "cfrag/evalkit.hpp"
#include "cfrag/util/errors.hpp"

using namespace cfrag;
using namespace cfrag::eval;
using dsl::AnswerList;
using dsl::labeled;
using dsl::number;

namespace {

qagen::QAItem gold(std::string id, AnswerList answers,
                   qagen::QuestionType t = qagen::QuestionType::calculation()) {
  qagen::QAItem i;
  i.qa_id = std::move(id);
  i.doc_id = "d";
  i.qtype = t;
  i.gold_answers = std::move(answers);
  i.split = qagen::Split::Test;
  return i;
}

}  // namespace

TEST_CASE("exact match") {
  CHECK(exact_match({number(252.5), number(60.6)}, {number(252.5), number(60.6)}));
  CHECK_FALSE(exact_match({number(60.6), number(252.5)}, {number(252.5), number(60.6)}));
  CHECK(exact_match({number(252.504)}, {number(252.5)}));
  CHECK_FALSE(exact_match({number(252.51)}, {number(252.5)}));
  CHECK(exact_match({number(252.51)}, {number(252.5)}, 1));
  CHECK_FALSE(exact_match({number(1)}, {number(1), number(2)}));
  CHECK(exact_match({labeled(" SSD ", 21)}, {labeled("ssd", 21)}));
  CHECK_FALSE(exact_match({labeled("hdd", 21)}, {labeled("ssd", 21)}));
  CHECK_FALSE(exact_match({number(21)}, {labeled("ssd", 21)}));
  CHECK_FALSE(exact_match({}, {number(1)}));
}

TEST_CASE("positional error terms") {
  CHECK(error_terms({number(13)}, {number(10)}) == std::vector<double>{3});
  CHECK(error_terms({}, {number(10)}) == std::vector<double>{10});
  CHECK(error_terms({number(1), number(2), number(99)}, {number(1), number(5)}) == std::vector<double>{0, 3});
  CHECK(error_terms({labeled("a", 4)}, {labeled("b", 6)}) == std::vector<double>{2});
}

TEST_CASE("rmse and mae by hand") {
  const std::vector<qagen::QAItem> golds{gold("q", {number(10)})};
  std::vector<Prediction> preds{{"q", {number(13)}, std::nullopt, ""}};
  auto s = rmse_mae(preds, golds);
  CHECK(s.rmse == doctest::Approx(3.0));
  CHECK(s.mae == doctest::Approx(3.0));
  preds[0] = {"q", {}, FailureKind::ExecFailure, "boom"};
  s = rmse_mae(preds, golds);
  CHECK(s.mae == doctest::Approx(10.0));
  preds[0] = {"q", {number(10)}, std::nullopt, ""};
  s = rmse_mae(preds, golds);
  CHECK(s.rmse == 0.0);
  CHECK(s.mae == 0.0);
  preds[0].qa_id = "zz";
  CHECK_THROWS_AS(rmse_mae(preds, golds), DataError);
}

TEST_CASE("rmse never below mae") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> v(-100, 100);
  std::uniform_int_distribution<int> len(0, 5);
  for (int set = 0; set < 100; ++set) {
    std::vector<qagen::QAItem> golds;
    std::vector<Prediction> preds;
    for (int q = 0; q < 20; ++q) {
      AnswerList g, p;
      const int n = 1 + len(rng) % 5;
      for (int i = 0; i < n; ++i) g.push_back(number(v(rng)));
      for (int i = len(rng); i > 0; --i) p.push_back(number(v(rng)));
      golds.push_back(gold("q" + std::to_string(q), g));
      preds.push_back({golds.back().qa_id, p, std::nullopt, ""});
    }
    const auto s = rmse_mae(preds, golds);
    CHECK(s.rmse >= s.mae - 1e-12);
  }
}

TEST_CASE("report rows and totality") {
  std::vector<qagen::QAItem> golds{
      gold("a", {number(1)}, qagen::QuestionType::word_match()),
      gold("b", {number(1), number(2)}),
      gold("c", {labeled("x", 3)}, qagen::QuestionType::max_min(qagen::Extremum::Max)),
      gold("d", {number(4)}),
  };
  std::vector<Prediction> preds{
      {"d", {}, FailureKind::ParseFailure, "bad"},
      {"a", {number(1)}, std::nullopt, ""},
      {"b", {number(1), number(2)}, std::nullopt, ""},
      {"c", {labeled("y", 3)}, std::nullopt, ""},
  };
  const auto r = build_report(preds, golds, {});
  CHECK(r.overall.questions == 4);
  CHECK(r.overall.em_percent == doctest::Approx(50.0));
  REQUIRE(r.by_type.size() == 3);
  CHECK(r.by_type[0].name == "Word Match");
  CHECK(r.by_type[1].name == "Max/Min");
  CHECK(r.by_type[2].name == "Calculation");
  REQUIRE(r.by_arity.size() == 2);
  CHECK(r.by_arity[0].name == "1");
  CHECK(r.by_arity[0].questions == 3);
  CHECK(r.failures.at("ParseFailure") == 1);
  // error terms: a 0, b 0 0, c 0, d 4 -> mae 4/5
  CHECK(r.overall.mae == doctest::Approx(0.8));
  CHECK(r.overall.rmse == doctest::Approx(std::sqrt(16.0 / 5.0)));

  CHECK(build_report_serial(preds, golds, {}) == r);
  CHECK(r.to_json().dump() == build_report(preds, golds, {}).to_json().dump());
  CHECK(r.to_text().find("EM(%)") != std::string::npos);
  CHECK(r.to_json()["overall"]["em"] == 50.0);
}

TEST_CASE("em percent is rounded to two decimals") {
  std::vector<qagen::QAItem> golds;
  std::vector<Prediction> preds;
  for (int i = 0; i < 3; ++i) {
    golds.push_back(gold("q" + std::to_string(i), {number(1)}));
    preds.push_back({golds.back().qa_id, {number(i == 0 ? 1 : 0)}, std::nullopt, ""});
  }
  CHECK(build_report(preds, golds, {}).overall.em_percent == 33.33);
}

TEST_CASE("missing or unknown predictions are listed") {
  std::vector<qagen::QAItem> golds{gold("q1", {number(1)}), gold("q2", {number(1)})};
  std::vector<Prediction> preds{{"q1", {number(1)}, std::nullopt, ""}};
  try {
    (void)build_report(preds, golds, {});
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("q2") != std::string::npos);
  }
  preds.push_back({"q2", {}, std::nullopt, ""});
  preds.push_back({"q2", {}, std::nullopt, ""});
  CHECK_THROWS_AS(build_report(preds, golds, {}), DataError);
}

TEST_CASE("parallel report equals serial on a large set") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> v(0, 500);
  std::vector<qagen::QAItem> golds;
  std::vector<Prediction> preds;
  for (int q = 0; q < 3000; ++q) {
    golds.push_back(gold("q" + std::to_string(q), {number(std::round(v(rng) * 100) / 100)}));
    AnswerList p = q % 3 ? golds.back().gold_answers : AnswerList{number(v(rng))};
    preds.push_back({golds.back().qa_id, p, std::nullopt, ""});
  }
  std::shuffle(preds.begin(), preds.end(), rng);
  StageStats st;
  st.hit_at_k[1] = 0.5;
  CHECK(build_report(preds, golds, st) == build_report_serial(preds, golds, st));
}

TEST_CASE("predictions file round trip") {
  testing::TempDir dir;
  const std::vector<Prediction> preds{{"a", {number(1.25), labeled("ssd", 3)}, std::nullopt, ""},
                                      {"b", {}, FailureKind::WrongDoc, "picked d2"}};
  write_predictions(dir / "p.jsonl", preds);
  CHECK(read_predictions(dir / "p.jsonl") == preds);
  for (auto k : {FailureKind::ParseFailure, FailureKind::ExecFailure, FailureKind::GenerationFailure,
                 FailureKind::WrongDoc}) {
    CHECK(parse_failure_kind(to_string(k)) == k);
  }
  testing::write_file(dir / "bad.jsonl", "{\"qa_id\":\"a\",\"answers\":[],\"failure\":\"nope\"}\n");
  CHECK_THROWS_AS(read_predictions(dir / "bad.jsonl"), DataError);
}
