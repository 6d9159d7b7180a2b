#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "cfrag/retrieval.hpp"
#include "cfrag/util/errors.hpp"

namespace cfrag::retrieval {

namespace {

constexpr int kFormatVersion = 1;

using TermCounts = std::map<std::string, int>;

TermCounts count_terms(std::string_view text) {
  TermCounts counts;
  for (auto& tok : tokenize(text)) ++counts[std::move(tok)];
  return counts;
}

double idf_weight(std::size_t n_docs, std::size_t df) {
  return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df))) + 1.0;
}

// Normalization sums squares in term order so both builds agree bit for bit.
void l2_normalize(SparseVector& v) {
  double sq = 0.0;
  for (double w : v.weights) sq += w * w;
  if (sq <= 0.0) {
    v.terms.clear();
    v.weights.clear();
    return;
  }
  const double norm = std::sqrt(sq);
  for (double& w : v.weights) w /= norm;
}

std::vector<const corpus::Document*> sorted_docs(std::span<const corpus::Document> docs) {
  if (docs.empty()) throw DataError("cannot build an index over an empty corpus");
  std::vector<const corpus::Document*> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(&d);
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->doc_id < b->doc_id; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i]->doc_id == out[i - 1]->doc_id) throw DataError("duplicate doc_id " + out[i]->doc_id);
  }
  return out;
}

}  // namespace

TfIdfIndex TfIdfIndex::build(std::span<const corpus::Document> docs) {
  const auto order = sorted_docs(docs);
  const auto n = static_cast<std::ptrdiff_t>(order.size());

  std::vector<TermCounts> counts(order.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) counts[i] = count_terms(order[i]->raw_text);

  // Vocabulary and document frequency: a sorted merge, cheap next to tokenizing.
  std::map<std::string, std::size_t> df;
  for (const auto& c : counts) {
    for (const auto& [term, count] : c) ++df[term];
  }

  TfIdfIndex index;
  index.vocab_.reserve(df.size());
  index.idf_.reserve(df.size());
  std::unordered_map<std::string, std::uint32_t> ids;
  ids.reserve(df.size());
  for (const auto& [term, freq] : df) {
    ids.emplace(term, static_cast<std::uint32_t>(index.vocab_.size()));
    index.vocab_.push_back(term);
    index.idf_.push_back(idf_weight(order.size(), freq));
  }

  index.doc_ids_.resize(order.size());
  index.vectors_.resize(order.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    index.doc_ids_[i] = order[i]->doc_id;
    SparseVector& v = index.vectors_[i];
    v.terms.reserve(counts[i].size());
    v.weights.reserve(counts[i].size());
    for (const auto& [term, count] : counts[i]) {
      const auto id = ids.at(term);
      v.terms.push_back(id);
      v.weights.push_back(static_cast<double>(count) * index.idf_[id]);
    }
    l2_normalize(v);
  }
  index.finish();
  return index;
}

TfIdfIndex TfIdfIndex::build_serial(std::span<const corpus::Document> docs) {
  const auto order = sorted_docs(docs);
  std::vector<TermCounts> counts;
  std::set<std::string> terms;
  for (const auto* d : order) {
    counts.push_back(count_terms(d->raw_text));
    for (const auto& [term, count] : counts.back()) terms.insert(term);
  }

  TfIdfIndex index;
  index.vocab_.assign(terms.begin(), terms.end());
  for (const auto& term : index.vocab_) {
    std::size_t df = 0;
    for (const auto& c : counts) df += c.count(term);
    index.idf_.push_back(idf_weight(order.size(), df));
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    index.doc_ids_.push_back(order[i]->doc_id);
    SparseVector v;
    for (const auto& [term, count] : counts[i]) {
      const auto id = static_cast<std::uint32_t>(
          std::lower_bound(index.vocab_.begin(), index.vocab_.end(), term) - index.vocab_.begin());
      v.terms.push_back(id);
      v.weights.push_back(static_cast<double>(count) * index.idf_[id]);
    }
    l2_normalize(v);
    index.vectors_.push_back(std::move(v));
  }
  index.finish();
  return index;
}

std::optional<std::uint32_t> TfIdfIndex::term_id(std::string_view term) const {
  auto it = term_lookup_.find(std::string(term));
  if (it == term_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TfIdfIndex::doc_index(std::string_view doc_id) const {
  auto it = doc_lookup_.find(std::string(doc_id));
  if (it == doc_lookup_.end()) return std::nullopt;
  return it->second;
}

SparseVector TfIdfIndex::vectorize(std::string_view text) const {
  std::map<std::uint32_t, int> counts;
  for (const auto& tok : tokenize(text)) {
    if (auto id = term_id(tok)) ++counts[*id];
  }
  SparseVector v;
  for (const auto& [id, count] : counts) {
    v.terms.push_back(id);
    v.weights.push_back(static_cast<double>(count) * idf_[id]);
  }
  l2_normalize(v);
  return v;
}

void TfIdfIndex::finish() {
  term_lookup_.clear();
  doc_lookup_.clear();
  for (std::size_t i = 0; i < vocab_.size(); ++i) term_lookup_.emplace(vocab_[i], static_cast<std::uint32_t>(i));
  for (std::size_t i = 0; i < doc_ids_.size(); ++i) doc_lookup_.emplace(doc_ids_[i], i);
  postings_.assign(vocab_.size(), {});
  for (std::size_t d = 0; d < vectors_.size(); ++d) {
    const auto& v = vectors_[d];
    for (std::size_t j = 0; j < v.terms.size(); ++j) {
      postings_[v.terms[j]].push_back({static_cast<std::uint32_t>(d), v.weights[j]});
    }
  }
}

nlohmann::json TfIdfIndex::to_json() const {
  auto vectors = nlohmann::json::array();
  for (const auto& v : vectors_) {
    vectors.push_back({{"terms", v.terms}, {"weights", v.weights}});
  }
  return {{"format", "cfrag-tfidf"}, {"version", kFormatVersion}, {"vocabulary", vocab_},
          {"idf", idf_},             {"doc_ids", doc_ids_},       {"vectors", vectors}};
}

TfIdfIndex TfIdfIndex::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "cfrag-tfidf") throw DataError("not a cfrag index file");
    if (j.at("version") != kFormatVersion) {
      throw DataError("unsupported index version " + j.at("version").dump());
    }
    TfIdfIndex index;
    index.vocab_ = j.at("vocabulary").get<std::vector<std::string>>();
    index.idf_ = j.at("idf").get<std::vector<double>>();
    index.doc_ids_ = j.at("doc_ids").get<std::vector<std::string>>();
    if (index.idf_.size() != index.vocab_.size()) throw DataError("index idf/vocabulary size mismatch");
    if (!std::is_sorted(index.vocab_.begin(), index.vocab_.end())) {
      throw DataError("index vocabulary is not sorted");
    }
    for (const auto& v : j.at("vectors")) {
      SparseVector sv;
      sv.terms = v.at("terms").get<std::vector<std::uint32_t>>();
      sv.weights = v.at("weights").get<std::vector<double>>();
      if (sv.terms.size() != sv.weights.size()) throw DataError("index vector size mismatch");
      for (std::size_t i = 0; i < sv.terms.size(); ++i) {
        if (sv.terms[i] >= index.vocab_.size() || (i > 0 && sv.terms[i] <= sv.terms[i - 1])) {
          throw DataError("index vector terms out of range or unsorted");
        }
      }
      index.vectors_.push_back(std::move(sv));
    }
    if (index.vectors_.size() != index.doc_ids_.size()) throw DataError("index doc count mismatch");
    index.finish();
    return index;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed index: ") + e.what());
  }
}

void TfIdfIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json().dump() << '\n';
}

TfIdfIndex TfIdfIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read index " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace cfrag::retrieval
