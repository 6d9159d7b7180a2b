#pragma once

// End-to-end runs: dataset preparation, retrieve -> critic -> reason ->
// execute -> score, audit artifacts, and ablation tables.
//
// Seeds: every stage draws from derive_seed(run seed, tag) with tags
// "synth", "genqa:<doc_id>", "split" and "noise:<qa_id>".

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfrag/corpus.hpp"
#include "cfrag/critic.hpp"
#include "cfrag/evalkit.hpp"
#include "cfrag/llmgate.hpp"
#include "cfrag/qagen.hpp"
#include "cfrag/reasoner.hpp"
#include "cfrag/retrieval.hpp"
#include "cfrag/util/kv_config.hpp"

namespace cfrag::pipeline {

enum class CriticMode { None, Lexical, Remote };
enum class ReasonerMode { Oracle, Remote };
// Gold skips retrieval and hands the critic only the gold document.
enum class RetrieverMode { TfIdf, Gold };
enum class EvalSplit { Test, All };

std::string_view to_string(CriticMode m);
std::string_view to_string(ReasonerMode m);
std::string_view to_string(RetrieverMode m);

struct RunConfig {
  std::string name = "run";
  std::uint64_t seed = 2024;
  std::optional<std::filesystem::path> corpus_dir;  // unset: synthesize
  corpus::SynthConfig synth;
  std::optional<std::filesystem::path> dataset_path;  // unset: generate
  qagen::GenConfig gen;
  double split_ratio = 0.8;
  std::size_t k = 5;
  CriticMode critic = CriticMode::Lexical;
  ReasonerMode reasoner = ReasonerMode::Oracle;
  RetrieverMode retriever = RetrieverMode::TfIdf;
  // Probability of demoting the gold document from rank 1 to a uniform
  // rank in [2, k].
  double retrieval_noise = 0.0;
  EvalSplit eval_split = EvalSplit::Test;
  int em_decimals = 2;
  std::optional<std::filesystem::path> out_dir;
  llm::ClientConfig llm = llm::ClientConfig::from_env();
  int llm_max_tokens = 512;
  double llm_temperature = 0.0;

  // Unknown keys and malformed values throw ConfigError.
  static RunConfig from_kv(const KvConfig& kv);
  void validate() const;  // throws ConfigError
  nlohmann::json to_json() const;
};

struct Dataset {
  std::vector<corpus::Document> documents;
  std::vector<corpus::ExtractionRecord> records;
  std::vector<corpus::Discard> discards;
  std::vector<qagen::QAItem> items;

  // Hash over question ids, documents and gold programs.
  std::string fingerprint() const;
};

Dataset prepare_dataset(const RunConfig& config);

struct QuestionTrace {
  retrieval::RetrievalResult retrieval;
  critic::CriticVerdict verdict;
  std::optional<std::string> critic_raw;
  reasoner::ReasonerOutput reasoner;
  eval::Prediction prediction;
};

struct RunResult {
  std::string name;
  eval::EvalReport report;
  std::vector<QuestionTrace> traces;  // sorted by qa_id
  std::string dataset_fingerprint;
  std::vector<nlohmann::json> llm_log;
  nlohmann::json config;  // RunConfig::to_json, no secrets
};

// Per-question failures become failed predictions; only configuration
// problems throw. `client` is required for remote modes.
RunResult run_pipeline(const RunConfig& config, const Dataset& dataset,
                       const retrieval::TfIdfIndex& index, llm::LlmClient* client = nullptr);

// Prepares the dataset, builds the index, creates a client for remote modes
// and writes artifacts when config.out_dir is set.
RunResult run_pipeline(const RunConfig& config);

// dataset.jsonl, retrieval.jsonl, critic.jsonl, reasoner.jsonl,
// predictions.jsonl, report.json, report.txt, run_config.json and
// llm_requests.jsonl (remote runs only)
void write_artifacts(const std::filesystem::path& dir, const RunResult& result, const Dataset& dataset);

struct AblationRow {
  std::string name;
  eval::MetricRow metrics;
};

struct AblationTable {
  std::vector<AblationRow> rows;  // in config order

  std::string to_text() const;
  nlohmann::json to_json() const;
};

// Throws DataError when the configs do not share one dataset.
AblationTable run_ablation(std::span<const RunConfig> configs);

}  // namespace cfrag::pipeline
