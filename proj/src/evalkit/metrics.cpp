#include <cmath>
#include <unordered_map>

#include "cfrag/evalkit.hpp"
#include "cfrag/util/errors.hpp"
#include "cfrag/util/text.hpp"

namespace cfrag::eval {

std::string_view to_string(FailureKind k) {
  switch (k) {
    case FailureKind::ParseFailure: return "ParseFailure";
    case FailureKind::ExecFailure: return "ExecFailure";
    case FailureKind::GenerationFailure: return "GenerationFailure";
    case FailureKind::WrongDoc: return "WrongDoc";
  }
  return "?";
}

std::optional<FailureKind> parse_failure_kind(std::string_view s) {
  for (auto k : {FailureKind::ParseFailure, FailureKind::ExecFailure, FailureKind::GenerationFailure,
                 FailureKind::WrongDoc}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

namespace {

long long rounded(double v, double scale) { return std::llround(v * scale); }

}  // namespace

bool exact_match(const dsl::AnswerList& pred, const dsl::AnswerList& gold, int decimals) {
  if (pred.size() != gold.size()) return false;
  const double scale = std::pow(10.0, decimals);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (pred[i].label.has_value() != gold[i].label.has_value()) return false;
    if (gold[i].label && text::to_lower_ascii(text::trim(*pred[i].label)) !=
                             text::to_lower_ascii(text::trim(*gold[i].label))) {
      return false;
    }
    if (rounded(pred[i].value, scale) != rounded(gold[i].value, scale)) return false;
  }
  return true;
}

std::vector<double> error_terms(const dsl::AnswerList& pred, const dsl::AnswerList& gold) {
  std::vector<double> out;
  out.reserve(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const double p = i < pred.size() ? pred[i].value : 0.0;
    out.push_back(std::abs(p - gold[i].value));
  }
  return out;
}

ErrorSummary rmse_mae(std::span<const Prediction> preds, std::span<const qagen::QAItem> golds) {
  std::unordered_map<std::string_view, const qagen::QAItem*> by_id;
  for (const auto& g : golds) by_id.emplace(g.qa_id, &g);
  double sq = 0.0, abs = 0.0;
  std::size_t terms = 0;
  for (const auto& p : preds) {
    auto it = by_id.find(p.qa_id);
    if (it == by_id.end()) throw DataError("prediction for unknown question " + p.qa_id);
    for (double e : error_terms(p.answers, it->second->gold_answers)) {
      sq += e * e;
      abs += e;
      ++terms;
    }
  }
  ErrorSummary out;
  out.terms = terms;
  if (terms > 0) {
    out.rmse = std::sqrt(sq / static_cast<double>(terms));
    out.mae = abs / static_cast<double>(terms);
  }
  return out;
}

}  // namespace cfrag::eval
