#include "report_common.hpp"

namespace cfrag::eval {

EvalReport build_report_serial(std::span<const Prediction> preds,
                               std::span<const qagen::QAItem> golds, const StageStats& stages,
                               int em_decimals) {
  const auto aligned = detail::align(preds, golds);
  std::vector<detail::QuestionScore> scores;
  scores.reserve(golds.size());
  for (std::size_t i = 0; i < golds.size(); ++i) {
    scores.push_back(detail::score(*aligned[i], golds[i], em_decimals));
  }
  return detail::assemble(scores, golds, aligned, stages, em_decimals);
}

}  // namespace cfrag::eval
