#include "doctest.h"
#include "helpers.hpp"

#include <map>
#include <regex>
#include <set>

#include "cfrag/qagen.hpp"
#include "cfrag/util/errors.hpp"

using namespace cfrag;
using namespace cfrag::qagen;
using corpus::ExtractionRecord;

namespace {

ExtractionRecord calc_record() {
  return testing::lifecycle_record("doc-a", 505.0,
                                   {{"manufacturing", 50}, {"transport", 5}, {"use", 44}, {"end_of_life", 1}},
                                   {{"display", 24}, {"mainboard", 30}, {"ssd", 10}, {"chassis", 36}});
}

dsl::AnswerList exec(const std::string& program) {
  auto r = dsl::run(program);
  REQUIRE_MESSAGE(r.ok(), program);
  return r.value();
}

ExtractionRecord record_with_pcf(std::string id, double pcf, double component_sum = 100.0) {
  auto r = testing::lifecycle_record(std::move(id), pcf, {{"manufacturing", 100}},
                                     {{"display", component_sum / 2}, {"ssd", component_sum / 2}});
  return r;
}

std::vector<ExtractionRecord> synth_records(std::size_t n, std::uint64_t seed = 1) {
  corpus::SynthConfig cfg;
  cfg.document_count = n;
  return corpus::synthesize_corpus(cfg, seed).records;
}

}  // namespace

TEST_CASE("calculation gold program reproduces the hand arithmetic") {
  const std::vector<std::string> targets{"manufacturing", "display"};
  const auto program = generate_gold_program(calc_record(), QuestionType::calculation(), targets);
  CHECK(program.find("manufacturing_carbon=total_carbon*manufacturing_percent") != std::string::npos);
  const auto a = exec(program);
  REQUIRE(a.size() == 2);
  CHECK(a[0].value == doctest::Approx(252.5).epsilon(1e-12));
  CHECK(a[1].value == doctest::Approx(60.6).epsilon(1e-12));
}

TEST_CASE("word match on the total is a bare literal") {
  const std::vector<std::string> targets{std::string(kTotalTarget)};
  CHECK(generate_gold_program(calc_record(), QuestionType::word_match(), targets) == "answer=[505.0]");
}

TEST_CASE("max/min programs use a component dictionary") {
  auto rec = testing::lifecycle_record("d", 100, {{"manufacturing", 100}},
                                       {{"display", 24}, {"mainboard", 30}, {"ssd", 10}});
  const auto max_prog = generate_gold_program(rec, QuestionType::max_min(Extremum::Max), {});
  CHECK(max_prog.find("max_by_value(components)") != std::string::npos);
  CHECK(exec(max_prog) == dsl::AnswerList{dsl::labeled("mainboard", 30.0)});
  const auto min_prog = generate_gold_program(rec, QuestionType::max_min(Extremum::Min), {});
  CHECK(exec(min_prog) == dsl::AnswerList{dsl::labeled("ssd", 10.0)});
  const auto top = generate_gold_program(rec, QuestionType::top_n(3), {});
  CHECK(exec(top) == dsl::AnswerList{dsl::labeled("mainboard", 30), dsl::labeled("display", 24),
                                     dsl::labeled("ssd", 10)});
}

TEST_CASE("targets the record cannot serve raise GenerationError") {
  const std::vector<std::string> missing{"hdd"};
  CHECK_THROWS_AS(generate_gold_program(calc_record(), QuestionType::calculation(), missing), GenerationError);
  const std::vector<std::string> dup{"ssd", "ssd"};
  CHECK_THROWS_AS(generate_gold_program(calc_record(), QuestionType::word_match(), dup), GenerationError);
  auto two = testing::lifecycle_record("d", 100, {{"manufacturing", 100}}, {{"a", 60}, {"b", 40}});
  CHECK_THROWS_AS(generate_gold_program(two, QuestionType::top_n(3), {}), GenerationError);
}

TEST_CASE("direct-component calculation skips the manufacturing share") {
  ExtractionRecord r;
  r.doc_id = "d";
  r.product_name = "K";
  r.product_type = "laptop";
  r.total_pcf = 1000.0;
  r.component_percents = {{"memory", 31.7}};
  const std::vector<std::string> t{"memory"};
  const auto a = exec(generate_gold_program(r, QuestionType::calculation(), t));
  CHECK(a[0].value == doctest::Approx(317.0).epsilon(1e-12));
}

TEST_CASE("record with two components never gets a top-3 question") {
  auto rec = testing::lifecycle_record("d", 100, {{"manufacturing", 100}}, {{"ssd", 60}, {"display", 40}});
  GenConfig cfg;
  cfg.questions_per_document = 30;
  cfg.top_n_weight = 5.0;
  GenStats stats;
  const std::vector<ExtractionRecord> recs{rec};
  const auto items = generate_questions(recs, cfg, 3, &stats);
  for (const auto& i : items) CHECK(i.qtype.family != QuestionFamily::TopN);
  CHECK(stats.skipped_top_n > 0);
}

TEST_CASE("calculation questions follow the template shape") {
  const auto recs = synth_records(30);
  const auto items = generate_questions(recs, {}, 4);
  const std::regex shape(R"(What are the carbon footprints of [a-z_ ,]+ in the .+\?)");
  std::size_t matched = 0;
  for (const auto& i : items) {
    if (i.qtype.family == QuestionFamily::Calculation && std::regex_match(i.question, shape)) ++matched;
  }
  CHECK(matched > 0);
  // Components appear by id: "ssd and display" style.
  const std::vector<ExtractionRecord> one{calc_record()};
  GenConfig cfg;
  cfg.questions_per_document = 40;
  bool saw_and = false;
  for (const auto& i : generate_questions(one, cfg, 9)) {
    if (i.targets.size() == 2 && i.question.find(" and ") != std::string::npos) saw_and = true;
    CHECK(i.question.find("Test Book 840 laptop") != std::string::npos);
  }
  CHECK(saw_and);
}

TEST_CASE("100 records yield at least 1000 verified questions") {
  const auto recs = synth_records(100);
  const auto items = generate_questions(recs, {}, 2024);
  CHECK(items.size() >= 1000);
  CHECK(verify_gold_programs(items).empty());
  std::set<std::string> ids;
  std::map<QuestionFamily, int> families;
  for (const auto& i : items) {
    ids.insert(i.qa_id);
    ++families[i.qtype.family];
    CHECK_FALSE(i.gold_answers.empty());
    CHECK(static_cast<int>(i.gold_answers.size()) <= 5);
  }
  CHECK(ids.size() == items.size());
  CHECK(families.size() == 4);
  CHECK(families[QuestionFamily::WordMatch] > families[QuestionFamily::TopN]);
  CHECK(generate_questions(recs, {}, 2024) == items);
}

TEST_CASE("verify flags tampered gold answers") {
  const auto recs = synth_records(2);
  auto items = generate_questions(recs, {}, 1);
  items[0].gold_answers[0].value += 1.0;
  const auto bad = verify_gold_programs(items);
  REQUIRE(bad.size() == 1);
  CHECK(bad[0] == items[0].qa_id);
}

TEST_CASE("document-level 80/20 split") {
  const auto recs = synth_records(10);
  auto items = generate_questions(recs, {}, 1);
  split_dataset(items, 0.8, 77);
  std::map<std::string, std::set<Split>> by_doc;
  for (const auto& i : items) by_doc[i.doc_id].insert(i.split);
  std::size_t train = 0, test = 0;
  for (const auto& [doc, splits] : by_doc) {
    REQUIRE(splits.size() == 1);  // every question of a doc shares the split
    (*splits.begin() == Split::Train ? train : test)++;
  }
  CHECK(train == 8);
  CHECK(test == 2);

  auto again = generate_questions(recs, {}, 1);
  split_dataset(again, 0.8, 77);
  CHECK(again == items);
  CHECK_THROWS_AS(split_dataset(again, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(split_dataset(again, 0.0, 1), ConfigError);
}

TEST_CASE("small splits keep one document per side") {
  const auto recs = synth_records(2);
  auto items = generate_questions(recs, {}, 1);
  split_dataset(items, 0.95, 3);
  std::set<Split> seen;
  for (const auto& i : items) seen.insert(i.split);
  CHECK(seen.size() == 2);
}

TEST_CASE("component sum thresholds") {
  std::vector<ExtractionRecord> recs;
  const double sums[] = {97.0, 99.0, 100.2, 101.0, 101.5};
  for (int i = 0; i < 5; ++i) recs.push_back(record_with_pcf("d" + std::to_string(i), 100, sums[i]));
  const auto rep = validate_records(recs);
  const Check want[] = {Check::Fail, Check::Pass, Check::Pass, Check::Pass, Check::Fail};
  for (int i = 0; i < 5; ++i) CHECK(rep.entries[i].sum_check == want[i]);
  CHECK(rep.entries[0].overall == Overall::NeedsReview);
  CHECK(rep.entries[1].overall == Overall::Validated);
}

TEST_CASE("pcf outlier check against twice the MAE") {
  // {100,100,100,500}: mean 200, MAE 150, 500 deviates 300 <= 300.
  std::vector<ExtractionRecord> recs;
  for (double p : {100.0, 100.0, 100.0, 500.0}) recs.push_back(record_with_pcf("d" + std::to_string(recs.size()), p));
  auto rep = validate_records(recs);
  CHECK(rep.mean_pcf == doctest::Approx(200));
  CHECK(rep.mae == doctest::Approx(150));
  CHECK(rep.entries[3].pcf_check == Check::Pass);

  // 500 -> 600: mean 225, MAE 187.5, deviation 375 sits exactly on the threshold.
  recs[3].total_pcf = 600;
  rep = validate_records(recs);
  CHECK(rep.mae == doctest::Approx(187.5));
  CHECK(rep.pcf_threshold == doctest::Approx(375));
  CHECK(rep.entries[3].pcf_check == Check::Pass);

  // Nine at 100 and one at 1000: mean 190, MAE 162, deviation 810 > 324.
  recs.clear();
  for (int i = 0; i < 9; ++i) recs.push_back(record_with_pcf("d" + std::to_string(i), 100));
  recs.push_back(record_with_pcf("d9", 1000));
  rep = validate_records(recs);
  CHECK(rep.mean_pcf == doctest::Approx(190));
  CHECK(rep.mae == doctest::Approx(162));
  CHECK(rep.entries[9].pcf_check == Check::Fail);
  CHECK(rep.entries[9].overall == Overall::NeedsReview);
  CHECK(rep.count(Overall::Validated) == 9);
}

TEST_CASE("pcf check needs two records") {
  const std::vector<ExtractionRecord> one{record_with_pcf("d", 100)};
  const auto rep = validate_records(one);
  CHECK_FALSE(rep.pcf_applicable);
  CHECK(rep.entries[0].pcf_check == Check::NotApplicable);
  CHECK(rep.entries[0].overall == Overall::NotApplicable);
}

TEST_CASE("validation csv and dataset files round trip") {
  testing::TempDir dir;
  const auto recs = synth_records(4);
  write_validation_csv(dir / "v.csv", validate_records(recs));
  CHECK(testing::read_file(dir / "v.csv").rfind("doc_id,sum,sum_check,pcf,pcf_dev,pcf_check,overall", 0) == 0);

  auto items = generate_questions(recs, {}, 5);
  split_dataset(items, 0.5, 5);
  write_dataset(dir / "d.jsonl", items);
  CHECK(read_dataset(dir / "d.jsonl") == items);

  testing::write_file(dir / "dup.jsonl", to_json(items[0]).dump() + "\n" + to_json(items[0]).dump() + "\n");
  CHECK_THROWS_AS(read_dataset(dir / "dup.jsonl"), DataError);
  testing::write_file(dir / "bad.jsonl", "{\"qa_id\": 3}\n");
  CHECK_THROWS_AS(read_dataset(dir / "bad.jsonl"), DataError);
}

TEST_CASE("question type labels round trip") {
  for (auto t : {QuestionType::word_match(), QuestionType::max_min(Extremum::Max), QuestionType::max_min(Extremum::Min),
                 QuestionType::top_n(3), QuestionType::top_n(5), QuestionType::calculation()}) {
    CHECK(parse_question_type(label(t)) == t);
  }
  CHECK_FALSE(parse_question_type("top4"));
}

TEST_CASE("gen config validation") {
  GenConfig cfg;
  cfg.word_match_weight = cfg.calculation_weight = cfg.max_min_weight = cfg.top_n_weight = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.max_arity = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
