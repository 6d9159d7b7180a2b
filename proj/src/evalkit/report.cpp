#include <cstdio>

#include "cfrag/util/text.hpp"
#include "report_common.hpp"

namespace cfrag::eval {

EvalReport build_report(std::span<const Prediction> preds, std::span<const qagen::QAItem> golds,
                        const StageStats& stages, int em_decimals) {
  const auto aligned = detail::align(preds, golds);
  std::vector<detail::QuestionScore> scores(golds.size());
  const auto n = static_cast<std::ptrdiff_t>(golds.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) scores[i] = detail::score(*aligned[i], golds[i], em_decimals);
  return detail::assemble(scores, golds, aligned, stages, em_decimals);
}

namespace {

nlohmann::json row_json(const MetricRow& r) {
  return {{"name", r.name}, {"questions", r.questions}, {"rmse", r.rmse}, {"mae", r.mae},
          {"em", r.em_percent}};
}

std::string row_text(const MetricRow& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-14s %9zu %9s %9s %8s\n", r.name.c_str(), r.questions,
                text::format_fixed(r.rmse, 2).c_str(), text::format_fixed(r.mae, 2).c_str(),
                text::format_fixed(r.em_percent, 2).c_str());
  return buf;
}

std::string table(std::string_view title, std::string_view first_column,
                  const std::vector<MetricRow>& rows) {
  char head[160];
  std::snprintf(head, sizeof head, "%-14s %9s %9s %9s %8s\n", std::string(first_column).c_str(),
                "Questions", "RMSE", "MAE", "EM(%)");
  std::string out = std::string(title) + "\n" + head;
  for (const auto& r : rows) out += row_text(r);
  return out;
}

}  // namespace

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["overall"] = row_json(overall);
  j["by_type"] = nlohmann::json::array();
  for (const auto& r : by_type) j["by_type"].push_back(row_json(r));
  j["by_arity"] = nlohmann::json::array();
  for (const auto& r : by_arity) j["by_arity"].push_back(row_json(r));
  j["failures"] = failures;
  nlohmann::json hits = nlohmann::json::object();
  for (const auto& [k, v] : stages.hit_at_k) hits[std::to_string(k)] = v;
  j["stages"] = {{"hit_at_k", hits},
                 {"critic_parse_failures", stages.critic_parse_failures},
                 {"critic_none_applicable", stages.critic_none_applicable}};
  if (stages.critic_accuracy) j["stages"]["critic_accuracy"] = *stages.critic_accuracy;
  j["em_decimals"] = em_decimals;
  return j;
}

std::string EvalReport::to_text() const {
  std::string out = table("Overall", "", {overall});
  out += "\n" + table("By question type", "Type", by_type);
  out += "\n" + table("By answer count", "Answers", by_arity);
  out += "\nFailures\n";
  if (failures.empty()) out += "  none\n";
  for (const auto& [kind, count] : failures) out += "  " + kind + ": " + std::to_string(count) + "\n";
  out += "\nStages\n";
  for (const auto& [k, v] : stages.hit_at_k) {
    out += "  hit@" + std::to_string(k) + ": " + text::format_fixed(v, 4) + "\n";
  }
  if (stages.critic_accuracy) {
    out += "  critic accuracy: " + text::format_fixed(*stages.critic_accuracy, 4) + "\n";
  }
  out += "  critic parse failures: " + std::to_string(stages.critic_parse_failures) + "\n";
  out += "  critic none applicable: " + std::to_string(stages.critic_none_applicable) + "\n";
  return out;
}

}  // namespace cfrag::eval
