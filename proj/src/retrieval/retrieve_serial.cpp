#include "cfrag/retrieval.hpp"
#include "ranking.hpp"

namespace cfrag::retrieval {

namespace {

double dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.terms.size() && j < b.terms.size()) {
    if (a.terms[i] < b.terms[j]) {
      ++i;
    } else if (a.terms[i] > b.terms[j]) {
      ++j;
    } else {
      sum += a.weights[i++] * b.weights[j++];
    }
  }
  return sum;
}

}  // namespace

RetrievalResult retrieve_topk_serial(const TfIdfIndex& index, std::string_view question,
                                     std::size_t k) {
  detail::check_k(k);
  const auto q = index.vectorize(question);
  std::vector<double> scores;
  scores.reserve(index.doc_vectors().size());
  for (const auto& d : index.doc_vectors()) scores.push_back(dot(q, d));
  return detail::rank(index, std::move(scores), k, q.empty());
}

std::vector<RetrievalResult> retrieve_batch_serial(const TfIdfIndex& index,
                                                   std::span<const Query> queries, std::size_t k) {
  std::vector<RetrievalResult> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    out.push_back(retrieve_topk_serial(index, q.text, k));
    out.back().qa_id = q.qa_id;
    out.back().gold_doc_id = q.gold_doc_id;
  }
  return out;
}

}  // namespace cfrag::retrieval
