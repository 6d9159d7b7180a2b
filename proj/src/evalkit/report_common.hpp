#pragma once

#include <cmath>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "cfrag/evalkit.hpp"
#include "cfrag/util/errors.hpp"

namespace cfrag::eval::detail {

struct QuestionScore {
  bool em = false;
  double sq = 0.0;
  double abs = 0.0;
  std::size_t terms = 0;
};

inline QuestionScore score(const Prediction& p, const qagen::QAItem& gold, int decimals) {
  QuestionScore s;
  s.em = exact_match(p.answers, gold.gold_answers, decimals);
  for (double e : error_terms(p.answers, gold.gold_answers)) {
    s.sq += e * e;
    s.abs += e;
    ++s.terms;
  }
  return s;
}

struct Accum {
  std::size_t questions = 0;
  std::size_t em = 0;
  double sq = 0.0;
  double abs = 0.0;
  std::size_t terms = 0;

  void add(const QuestionScore& s) {
    ++questions;
    em += s.em ? 1 : 0;
    sq += s.sq;
    abs += s.abs;
    terms += s.terms;
  }

  MetricRow row(std::string name) const {
    MetricRow r;
    r.name = std::move(name);
    r.questions = questions;
    if (questions > 0) {
      r.em_percent = std::round(10000.0 * static_cast<double>(em) / static_cast<double>(questions)) / 100.0;
    }
    if (terms > 0) {
      r.rmse = std::sqrt(sq / static_cast<double>(terms));
      r.mae = abs / static_cast<double>(terms);
    }
    return r;
  }
};

// Index of each gold's prediction; throws listing missing and unknown ids.
inline std::vector<const Prediction*> align(std::span<const Prediction> preds,
                                            std::span<const qagen::QAItem> golds) {
  std::unordered_map<std::string_view, const Prediction*> by_id;
  std::vector<std::string> unknown;
  std::unordered_set<std::string_view> gold_ids;
  for (const auto& g : golds) gold_ids.insert(g.qa_id);
  for (const auto& p : preds) {
    if (!gold_ids.count(p.qa_id)) unknown.push_back(p.qa_id);
    if (!by_id.emplace(p.qa_id, &p).second) throw DataError("duplicate prediction for " + p.qa_id);
  }
  std::vector<const Prediction*> out;
  std::vector<std::string> missing;
  for (const auto& g : golds) {
    auto it = by_id.find(g.qa_id);
    out.push_back(it == by_id.end() ? nullptr : it->second);
    if (it == by_id.end()) missing.push_back(g.qa_id);
  }
  auto list = [](const std::vector<std::string>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size() && i < 10; ++i) s += (i ? ", " : "") + ids[i];
    if (ids.size() > 10) s += ", ... (" + std::to_string(ids.size()) + " total)";
    return s;
  };
  if (!missing.empty()) throw DataError("missing predictions for: " + list(missing));
  if (!unknown.empty()) throw DataError("predictions for unknown questions: " + list(unknown));
  return out;
}

constexpr qagen::QuestionFamily kFamilies[] = {qagen::QuestionFamily::WordMatch, qagen::QuestionFamily::MaxMin,
                                               qagen::QuestionFamily::TopN, qagen::QuestionFamily::Calculation};

inline std::size_t family_index(qagen::QuestionFamily f) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (kFamilies[i] == f) return i;
  }
  return 0;
}

}  // namespace cfrag::eval::detail

namespace cfrag::eval::detail {

// Ordered reduction over per-question scores (gold order).
inline EvalReport assemble(const std::vector<QuestionScore>& scores, std::span<const qagen::QAItem> golds,
                           const std::vector<const Prediction*>& preds, const StageStats& stages,
                           int decimals) {
  Accum overall;
  Accum by_family[4];
  std::map<std::size_t, Accum> by_arity;
  EvalReport report;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    overall.add(scores[i]);
    by_family[family_index(golds[i].qtype.family)].add(scores[i]);
    by_arity[golds[i].gold_answers.size()].add(scores[i]);
    if (preds[i]->failure) ++report.failures[std::string(to_string(*preds[i]->failure))];
  }
  report.overall = overall.row("Overall");
  for (std::size_t f = 0; f < 4; ++f) {
    if (by_family[f].questions > 0) {
      report.by_type.push_back(by_family[f].row(std::string(qagen::family_name(kFamilies[f]))));
    }
  }
  for (const auto& [arity, acc] : by_arity) report.by_arity.push_back(acc.row(std::to_string(arity)));
  report.stages = stages;
  report.em_decimals = decimals;
  return report;
}

}  // namespace cfrag::eval::detail
