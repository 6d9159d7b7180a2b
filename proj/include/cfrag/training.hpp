#pragma once

// Prompt/completion exports for fine-tuning the critic and the reasoner.
// Only train-split items are exported.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cfrag/corpus.hpp"
#include "cfrag/qagen.hpp"
#include "cfrag/retrieval.hpp"

namespace cfrag::training {

struct TrainingRecord {
  std::string qa_id;
  std::string doc_id;  // gold document, kept for split audits
  std::string prompt;
  std::string completion;

  bool operator==(const TrainingRecord&) const = default;
};

// Top-k retrieved references per question; completion is the gold position
// or [-1] if retrieval missed it.
std::vector<TrainingRecord> export_critic_training(std::span<const qagen::QAItem> items,
                                                   const retrieval::TfIdfIndex& index,
                                                   const corpus::DocumentStore& docs, std::size_t k);

// Gold document as the reference, fenced gold program as the completion.
std::vector<TrainingRecord> export_reasoner_training(std::span<const qagen::QAItem> items,
                                                     const corpus::DocumentStore& docs);

void write_training(const std::filesystem::path& path, std::span<const TrainingRecord> records);
std::vector<TrainingRecord> read_training(const std::filesystem::path& path);

}  // namespace cfrag::training
