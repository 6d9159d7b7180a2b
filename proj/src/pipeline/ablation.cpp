#include <cstdio>
#include <map>

#include "cfrag/pipeline.hpp"
#include "cfrag/util/errors.hpp"
#include "cfrag/util/text.hpp"

namespace cfrag::pipeline {

AblationTable run_ablation(std::span<const RunConfig> configs) {
  if (configs.empty()) throw ConfigError("ablation needs at least one configuration");
  for (const auto& c : configs) c.validate();

  AblationTable table;
  std::optional<std::string> fingerprint;
  // Configs that prepare the same dataset share it and its index.
  std::map<std::string, std::pair<Dataset, retrieval::TfIdfIndex>> prepared;
  for (const auto& config : configs) {
    const auto j = config.to_json();
    std::string key = std::to_string(config.seed) + "|" + text::format_number(config.split_ratio);
    for (const char* field : {"synth", "genqa", "corpus_dir", "dataset_path"}) {
      if (j.contains(field)) key += "|" + j[field].dump();
    }
    auto it = prepared.find(key);
    if (it == prepared.end()) {
      auto ds = prepare_dataset(config);
      auto index = retrieval::TfIdfIndex::build(ds.documents);
      it = prepared.emplace(key, std::make_pair(std::move(ds), std::move(index))).first;
    }
    const auto& [dataset, index] = it->second;
    const auto fp = dataset.fingerprint();
    if (fingerprint && *fingerprint != fp) {
      throw DataError("ablation configs use different datasets (" + *fingerprint + " vs " + fp + ")");
    }
    fingerprint = fp;

    std::unique_ptr<llm::LlmClient> client;
    if (config.critic == CriticMode::Remote || config.reasoner == ReasonerMode::Remote) {
      client = std::make_unique<llm::LlmClient>(config.llm);
    }
    auto result = run_pipeline(config, dataset, index, client.get());
    if (config.out_dir) write_artifacts(*config.out_dir, result, dataset);
    auto row = result.report.overall;
    row.name = config.name;
    table.rows.push_back({config.name, row});
  }
  return table;
}

std::string AblationTable::to_text() const {
  std::size_t width = 13;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %9s %9s %9s %8s\n", static_cast<int>(width), "Configuration",
                "Questions", "RMSE", "MAE", "EM(%)");
  std::string out = buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s %9zu %9s %9s %8s\n", static_cast<int>(width), r.name.c_str(),
                  r.metrics.questions, text::format_fixed(r.metrics.rmse, 2).c_str(),
                  text::format_fixed(r.metrics.mae, 2).c_str(), text::format_fixed(r.metrics.em_percent, 2).c_str());
    out += buf;
  }
  return out;
}

nlohmann::json AblationTable::to_json() const {
  auto out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"name", r.name},
                   {"questions", r.metrics.questions},
                   {"rmse", r.metrics.rmse},
                   {"mae", r.metrics.mae},
                   {"em", r.metrics.em_percent}});
  }
  return out;
}

}  // namespace cfrag::pipeline
