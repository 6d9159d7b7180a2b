#include "doctest.h"
#include "helpers.hpp"

#include <set>

#include "cfrag/critic.hpp"
#include "cfrag/progdsl.hpp"
#include "cfrag/reasoner.hpp"
#include "cfrag/training.hpp"

using namespace cfrag;
using namespace cfrag::reasoner;

namespace {

const std::string kReference = testing::hp_text("Book 840 G9", "laptop", "505.0",
                                                {{"Display", "24"}, {"Mainboard and other boards", "30"}},
                                                "50", "45");

QuestionSpec calc_question() {
  return {"q1", qagen::QuestionType::calculation(), "What are the carbon footprints of manufacturing and display?",
          {"manufacturing", "display"}};
}

}  // namespace

TEST_CASE("oracle on the right reference") {
  const auto out = oracle_reason(calc_question(), kReference);
  REQUIRE(out.ok());
  CHECK(out.provenance == Provenance::Oracle);
  auto r = dsl::run(out.program_source);
  REQUIRE(r.ok());
  CHECK(r.value()[0].value == doctest::Approx(252.5).epsilon(1e-12));
  CHECK(r.value()[1].value == doctest::Approx(60.6).epsilon(1e-12));
}

TEST_CASE("oracle on a reference lacking the target") {
  const auto other = testing::hp_text("Other", "desktop", "300", {{"Chassis", "100"}});
  const auto out = oracle_reason(calc_question(), other);
  REQUIRE_FALSE(out.ok());
  CHECK(out.failure->reason == FailureReason::MissingTarget);
  const auto junk = oracle_reason(calc_question(), "not a report");
  REQUIRE_FALSE(junk.ok());
  CHECK(junk.failure->reason == FailureReason::UnreadableReference);
}

TEST_CASE("oracle max/min uses a dictionary literal") {
  QuestionSpec q{"q2", qagen::QuestionType::max_min(qagen::Extremum::Max), "Which part is largest?", {}};
  const auto out = oracle_reason(q, kReference);
  REQUIRE(out.ok());
  CHECK(out.program_source.find("components={") != std::string::npos);
  CHECK(out.program_source.find("max_by_value(") != std::string::npos);
  CHECK(dsl::run(out.program_source).value() == dsl::AnswerList{dsl::labeled("mainboard", 30)});
}

TEST_CASE("reasoner prompt layout") {
  const auto p = build_reasoner_prompt("Q?", "REF");
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = p.find(needle); pos != std::string::npos; pos = p.find(needle, pos + 1)) ++n;
    return n;
  };
  CHECK(count("### Question:") == 1);
  CHECK(count("### Reference:") == 1);
  CHECK(p.find("### Question: Q?\n### Reference: REF\n") != std::string::npos);
  CHECK(p.substr(p.size() - 13) == "### Program:\n");
  const auto empty = build_reasoner_prompt("Q?", "");
  CHECK(empty.find("### Reference: \n### Program:\n") != std::string::npos);
}

TEST_CASE("fenced program extraction") {
  auto got = [](std::string_view raw) { return std::get<std::string>(parse_reasoner_response(raw)); };
  CHECK(got("```\nanswer=[1]\n```") == "answer=[1]");
  CHECK(got("Sure:\n```python\nx=1\nanswer=[x]\n```\nDone") == "x=1\nanswer=[x]");
  CHECK(got("```\nanswer=[1]\n```\n```\nanswer=[2]\n```") == "answer=[1]");
  CHECK(got(fence("a=1\nanswer=[a]")) == "a=1\nanswer=[a]");
  const auto none = parse_reasoner_response("The answer is 5.");
  REQUIRE(std::holds_alternative<GenerationFailure>(none));
  CHECK(std::get<GenerationFailure>(none).reason == FailureReason::NoProgram);
  CHECK(std::holds_alternative<GenerationFailure>(parse_reasoner_response("```\nanswer=[1]")));
  CHECK(std::holds_alternative<GenerationFailure>(parse_reasoner_response("```\n\n```")));
}

TEST_CASE("training exports keep to the train split") {
  corpus::SynthConfig cfg;
  cfg.document_count = 20;
  const auto c = corpus::synthesize_corpus(cfg, 4);
  auto items = qagen::generate_questions(c.records, {}, 4);
  qagen::split_dataset(items, 0.8, 4);
  std::set<std::string> train_docs, test_docs;
  for (const auto& i : items) (i.split == qagen::Split::Train ? train_docs : test_docs).insert(i.doc_id);

  const auto index = retrieval::TfIdfIndex::build(c.documents);
  const corpus::DocumentStore store(c.documents);
  const auto critic_rows = training::export_critic_training(items, index, store, 5);
  const auto reasoner_rows = training::export_reasoner_training(items, store);
  REQUIRE_FALSE(critic_rows.empty());
  CHECK(critic_rows.size() == reasoner_rows.size());
  std::size_t train_items = 0;
  for (const auto& i : items) train_items += i.split == qagen::Split::Train ? 1 : 0;
  CHECK(critic_rows.size() == train_items);

  std::map<std::string, const qagen::QAItem*> by_id;
  for (const auto& i : items) by_id[i.qa_id] = &i;
  for (const auto& r : critic_rows) {
    CHECK(train_docs.count(r.doc_id));
    CHECK_FALSE(test_docs.count(r.doc_id));
    // completion is the gold's position among the top-5, or [-1]
    const auto res = retrieval::retrieve_topk(index, by_id.at(r.qa_id)->question, 5);
    CHECK(r.completion == critic::critic_completion(retrieval::rank_of(res, r.doc_id)));
  }
  for (const auto& r : reasoner_rows) {
    CHECK(train_docs.count(r.doc_id));
    const auto program = parse_reasoner_response(r.completion);
    REQUIRE(std::holds_alternative<std::string>(program));
    CHECK(std::get<std::string>(program) == by_id.at(r.qa_id)->gold_program);
    CHECK(dsl::parse(std::get<std::string>(program)).ok());
  }

  testing::TempDir dir;
  training::write_training(dir / "t.jsonl", reasoner_rows);
  CHECK(training::read_training(dir / "t.jsonl") == reasoner_rows);
}

TEST_CASE("gold missing from top-k gives [-1]") {
  // Two documents, the gold one is unreachable with k=1 for a question about the other.
  const std::vector<corpus::Document> docs{
      corpus::make_document("a", corpus::CompanyProfile::HpLifecycle, "alpha report display", 1),
      corpus::make_document("b", corpus::CompanyProfile::HpLifecycle, "beta report chassis", 1)};
  qagen::QAItem item;
  item.qa_id = "a-q01";
  item.doc_id = "a";
  item.question = "beta chassis";
  item.split = qagen::Split::Train;
  item.gold_program = "answer=[1.0]";
  const std::vector<qagen::QAItem> items{item};
  const auto index = retrieval::TfIdfIndex::build(docs);
  const corpus::DocumentStore store(docs);
  const auto rows = training::export_critic_training(items, index, store, 1);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].completion == "[-1]");
  const auto rows2 = training::export_critic_training(items, index, store, 2);
  CHECK(rows2[0].completion == "[2]");
}
