#include <fstream>

#include "cfrag/critic.hpp"
#include "cfrag/reasoner.hpp"
#include "cfrag/training.hpp"
#include "cfrag/util/errors.hpp"

namespace cfrag::training {

std::vector<TrainingRecord> export_critic_training(std::span<const qagen::QAItem> items,
                                                   const retrieval::TfIdfIndex& index,
                                                   const corpus::DocumentStore& docs, std::size_t k) {
  std::vector<const qagen::QAItem*> train;
  for (const auto& item : items) {
    if (item.split == qagen::Split::Train) train.push_back(&item);
  }
  std::vector<TrainingRecord> out(train.size());
  const auto n = static_cast<std::ptrdiff_t>(train.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& item = *train[i];
    const auto result = retrieval::retrieve_topk(index, item.question, k);
    std::vector<std::string> refs;
    refs.reserve(result.ranked.size());
    for (const auto& r : result.ranked) refs.push_back(docs.at(r.doc_id).raw_text);
    out[i] = {item.qa_id, item.doc_id, critic::build_critic_prompt(item.question, refs),
              critic::critic_completion(retrieval::rank_of(result, item.doc_id))};
  }
  return out;
}

std::vector<TrainingRecord> export_reasoner_training(std::span<const qagen::QAItem> items,
                                                     const corpus::DocumentStore& docs) {
  std::vector<TrainingRecord> out;
  for (const auto& item : items) {
    if (item.split != qagen::Split::Train) continue;
    out.push_back({item.qa_id, item.doc_id,
                   reasoner::build_reasoner_prompt(item.question, docs.at(item.doc_id).raw_text),
                   reasoner::fence(item.gold_program)});
  }
  return out;
}

void write_training(const std::filesystem::path& path, std::span<const TrainingRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& r : records) {
    out << nlohmann::json{{"prompt", r.prompt},
                          {"completion", r.completion},
                          {"qa_id", r.qa_id},
                          {"doc_id", r.doc_id}}
               .dump()
        << '\n';
  }
}

std::vector<TrainingRecord> read_training(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<TrainingRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.value("qa_id", ""), j.value("doc_id", ""), j.at("prompt").get<std::string>(),
                     j.at("completion").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cfrag::training
