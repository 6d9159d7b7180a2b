#pragma once

// TF-IDF document index, cosine top-k retrieval and hit@k.
//
// Weighting follows the common vectorizer defaults: raw term counts,
// idf = ln((1 + N) / (1 + df)) + 1, rows L2-normalized.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cfrag/corpus.hpp"
#include "json.hpp"

namespace cfrag::retrieval {

// Lowercase ASCII, split on anything that is not a letter or digit, drop
// one-character tokens. Bytes >= 0x80 count as letters so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);

// Sorted by term id.
struct SparseVector {
  std::vector<std::uint32_t> terms;
  std::vector<double> weights;

  bool empty() const { return terms.empty(); }
  bool operator==(const SparseVector&) const = default;
};

struct Posting {
  std::uint32_t doc;
  double weight;
};

class TfIdfIndex {
 public:
  // Throws DataError on an empty corpus. Parallel over documents.
  static TfIdfIndex build(std::span<const corpus::Document> docs);
  // Single-threaded reference build; produces an identical index.
  static TfIdfIndex build_serial(std::span<const corpus::Document> docs);

  const std::vector<std::string>& vocabulary() const { return vocab_; }  // sorted
  const std::vector<double>& idf() const { return idf_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }  // sorted
  const std::vector<SparseVector>& doc_vectors() const { return vectors_; }
  const std::vector<Posting>& postings(std::uint32_t term) const { return postings_[term]; }

  std::optional<std::uint32_t> term_id(std::string_view term) const;
  std::optional<std::size_t> doc_index(std::string_view doc_id) const;

  // Out-of-vocabulary terms are dropped; the result is L2-normalized.
  SparseVector vectorize(std::string_view text) const;

  nlohmann::json to_json() const;
  static TfIdfIndex from_json(const nlohmann::json& j);  // throws DataError
  void save(const std::filesystem::path& path) const;
  static TfIdfIndex load(const std::filesystem::path& path);

  bool operator==(const TfIdfIndex& other) const {
    return vocab_ == other.vocab_ && idf_ == other.idf_ && doc_ids_ == other.doc_ids_ &&
           vectors_ == other.vectors_;
  }

 private:
  void finish();  // lookup tables and postings

  std::vector<std::string> vocab_;
  std::vector<double> idf_;
  std::vector<std::string> doc_ids_;
  std::vector<SparseVector> vectors_;
  std::unordered_map<std::string, std::uint32_t> term_lookup_;
  std::unordered_map<std::string, std::size_t> doc_lookup_;
  std::vector<std::vector<Posting>> postings_;
};

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;

  bool operator==(const ScoredDoc&) const = default;
};

struct RetrievalResult {
  std::string qa_id;
  std::vector<ScoredDoc> ranked;  // score descending, ties by doc_id
  bool no_query_terms = false;
  std::optional<std::string> gold_doc_id;  // carried along for hit@k files

  bool operator==(const RetrievalResult&) const = default;
};

// Inverted-index scoring. Throws std::invalid_argument for k == 0.
RetrievalResult retrieve_topk(const TfIdfIndex& index, std::string_view question, std::size_t k);
// Brute-force cosine against every document vector; bit-identical to retrieve_topk.
RetrievalResult retrieve_topk_serial(const TfIdfIndex& index, std::string_view question,
                                     std::size_t k);

struct Query {
  std::string qa_id;
  std::string text;
  std::optional<std::string> gold_doc_id;
};

// Parallel over queries; output order follows the input.
std::vector<RetrievalResult> retrieve_batch(const TfIdfIndex& index, std::span<const Query> queries,
                                            std::size_t k);
std::vector<RetrievalResult> retrieve_batch_serial(const TfIdfIndex& index,
                                                   std::span<const Query> queries, std::size_t k);

// 1-based rank of doc_id in the result, nullopt if absent.
std::optional<std::size_t> rank_of(const RetrievalResult& result, std::string_view doc_id);

// Fraction of results whose gold document is within the first k entries.
// Throws DataError if a result's qa_id has no gold entry.
double hit_rate(std::span<const RetrievalResult> results,
                const std::unordered_map<std::string, std::string>& gold, std::size_t k);

// Uses each result's embedded gold_doc_id.
double hit_rate(std::span<const RetrievalResult> results, std::size_t k);

nlohmann::json to_json(const RetrievalResult& r);
RetrievalResult retrieval_result_from_json(const nlohmann::json& j);
void write_results(const std::filesystem::path& path, std::span<const RetrievalResult> results);
std::vector<RetrievalResult> read_results(const std::filesystem::path& path);

}  // namespace cfrag::retrieval
