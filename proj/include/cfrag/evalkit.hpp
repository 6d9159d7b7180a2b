#pragma once

// Scoring: exact match, RMSE/MAE and the breakdown report.

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfrag/progdsl.hpp"
#include "cfrag/qagen.hpp"

namespace cfrag::eval {

enum class FailureKind { ParseFailure, ExecFailure, GenerationFailure, WrongDoc };

std::string_view to_string(FailureKind k);
std::optional<FailureKind> parse_failure_kind(std::string_view s);

struct Prediction {
  std::string qa_id;
  dsl::AnswerList answers;  // empty when failure is set
  std::optional<FailureKind> failure;
  std::string detail;

  bool operator==(const Prediction&) const = default;
};

// Same length and every position equal after rounding to `decimals`;
// labels compare case-insensitively after trimming.
bool exact_match(const dsl::AnswerList& pred, const dsl::AnswerList& gold, int decimals = 2);

// Positional errors: one term per gold value, a missing prediction counts as
// 0, extra predictions are ignored. Labeled items contribute their number.
std::vector<double> error_terms(const dsl::AnswerList& pred, const dsl::AnswerList& gold);

struct ErrorSummary {
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t terms = 0;
};

// Throws DataError when a prediction's qa_id is not among the golds.
ErrorSummary rmse_mae(std::span<const Prediction> preds, std::span<const qagen::QAItem> golds);

struct MetricRow {
  std::string name;
  std::size_t questions = 0;
  double em_percent = 0.0;  // rounded to 2 decimals
  double rmse = 0.0;
  double mae = 0.0;

  bool operator==(const MetricRow&) const = default;
};

struct StageStats {
  std::map<std::size_t, double> hit_at_k;  // k -> hit rate
  std::optional<double> critic_accuracy;   // chosen == gold
  std::size_t critic_parse_failures = 0;
  std::size_t critic_none_applicable = 0;

  bool operator==(const StageStats&) const = default;
};

struct EvalReport {
  MetricRow overall;
  std::vector<MetricRow> by_type;   // Word Match, Max/Min, Top 3/5, Calculation (those present)
  std::vector<MetricRow> by_arity;  // one row per gold answer count present
  std::map<std::string, std::size_t> failures;  // kind -> count
  StageStats stages;
  int em_decimals = 2;

  nlohmann::json to_json() const;
  std::string to_text() const;
  bool operator==(const EvalReport&) const = default;
};

// Parallel per question with an ordered reduction. Throws DataError listing
// missing or unknown qa_ids.
EvalReport build_report(std::span<const Prediction> preds, std::span<const qagen::QAItem> golds,
                        const StageStats& stages, int em_decimals = 2);
// Single-threaded reference; returns the same report.
EvalReport build_report_serial(std::span<const Prediction> preds,
                               std::span<const qagen::QAItem> golds, const StageStats& stages,
                               int em_decimals = 2);

nlohmann::json to_json(const Prediction& p);
Prediction prediction_from_json(const nlohmann::json& j);  // throws DataError
void write_predictions(const std::filesystem::path& path, std::span<const Prediction> preds);
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

}  // namespace cfrag::eval
