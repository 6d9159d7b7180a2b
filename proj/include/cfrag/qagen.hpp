#pragma once

// Question/answer dataset generation: templated questions with gold answer
// programs, the document-level train/test split and record validation.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cfrag/corpus.hpp"
#include "cfrag/progdsl.hpp"

namespace cfrag::qagen {

enum class QuestionFamily { WordMatch, MaxMin, TopN, Calculation };
enum class Extremum { Max, Min };

struct QuestionType {
  QuestionFamily family = QuestionFamily::WordMatch;
  Extremum direction = Extremum::Max;  // MaxMin only
  int n = 0;                           // TopN only: 3 or 5

  static QuestionType word_match() { return {QuestionFamily::WordMatch, Extremum::Max, 0}; }
  static QuestionType max_min(Extremum d) { return {QuestionFamily::MaxMin, d, 0}; }
  static QuestionType top_n(int n) { return {QuestionFamily::TopN, Extremum::Max, n}; }
  static QuestionType calculation() { return {QuestionFamily::Calculation, Extremum::Max, 0}; }

  bool operator==(const QuestionType&) const = default;
};

// "word_match", "max", "min", "top3", "top5", "calculation"
std::string label(const QuestionType& t);
std::optional<QuestionType> parse_question_type(std::string_view s);
std::string_view family_name(QuestionFamily f);  // report row names: "Word Match", ...

enum class Split { Train, Test };

std::string_view to_string(Split s);
std::optional<Split> parse_split(std::string_view s);

// Target names: component ids, stage ids, or "total" for the whole-product
// footprint (WordMatch only).
inline constexpr std::string_view kTotalTarget = "total";

struct QAItem {
  std::string qa_id;
  std::string doc_id;
  QuestionType qtype;
  std::string question;
  std::vector<std::string> targets;
  std::string gold_program;
  dsl::AnswerList gold_answers;
  Split split = Split::Train;
  // Which phrasing family produced the question, e.g. "word_match.component_percent".
  std::string template_id;

  bool operator==(const QAItem&) const = default;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws GenerationError naming the first target the record cannot serve.
std::string generate_gold_program(const corpus::ExtractionRecord& record, const QuestionType& qtype,
                                  std::span<const std::string> targets);

struct GenConfig {
  int questions_per_document = 12;
  // Relative family weights; defaults lean heavily on Word Match.
  double word_match_weight = 0.49;
  double calculation_weight = 0.29;
  double max_min_weight = 0.13;
  double top_n_weight = 0.09;
  int max_arity = 5;  // answers per Calculation/WordMatch question

  void validate() const;  // throws ConfigError
};

struct GenStats {
  std::size_t skipped_top_n = 0;  // too few components for n
  std::size_t skipped_duplicates = 0;
};

// Every returned item carries gold_answers from executing its gold program;
// a program that fails to reproduce the independently computed answers
// throws std::logic_error. Items are ordered by record, then question index.
std::vector<QAItem> generate_questions(std::span<const corpus::ExtractionRecord> records,
                                       const GenConfig& config, std::uint64_t seed,
                                       GenStats* stats = nullptr);

// Re-executes every gold program; returns qa_ids whose answers differ.
std::vector<std::string> verify_gold_programs(std::span<const QAItem> items);

// Assigns Split per document: ceil(ratio * docs) train documents, at least one
// document on each side when there are two or more. Throws ConfigError for a
// ratio outside (0,1).
void split_dataset(std::vector<QAItem>& items, double ratio, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Validation

enum class Check { Pass, Fail, NotApplicable };
enum class Overall { Validated, NeedsReview, NotApplicable };

std::string_view to_string(Check c);
std::string_view to_string(Overall o);

struct ValidationEntry {
  std::string doc_id;
  double component_sum = 0.0;
  Check sum_check = Check::Fail;
  double pcf = 0.0;
  double pcf_deviation = 0.0;  // |pcf - corpus mean|
  Check pcf_check = Check::NotApplicable;
  Overall overall = Overall::NeedsReview;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  double mean_pcf = 0.0;
  double mae = 0.0;
  double pcf_threshold = 0.0;  // 2 * mae
  bool pcf_applicable = false; // false with fewer than two records

  std::size_t count(Overall o) const;
};

ValidationReport validate_records(std::span<const corpus::ExtractionRecord> records);

void write_validation_csv(const std::filesystem::path& path, const ValidationReport& report);

// ---------------------------------------------------------------------------
// Dataset files (JSON Lines)

nlohmann::json to_json(const QAItem& item);
QAItem qa_item_from_json(const nlohmann::json& j);  // throws DataError

void write_dataset(const std::filesystem::path& path, std::span<const QAItem> items);
std::vector<QAItem> read_dataset(const std::filesystem::path& path);  // throws DataError

}  // namespace cfrag::qagen
