#include "cfrag/retrieval.hpp"
#include "ranking.hpp"

namespace cfrag::retrieval {

RetrievalResult retrieve_topk(const TfIdfIndex& index, std::string_view question, std::size_t k) {
  detail::check_k(k);
  const auto q = index.vectorize(question);
  std::vector<double> scores(index.doc_ids().size(), 0.0);
  // Terms are visited in id order, so each document accumulates its dot
  // product in the same order as the brute-force path.
  for (std::size_t j = 0; j < q.terms.size(); ++j) {
    for (const auto& p : index.postings(q.terms[j])) scores[p.doc] += q.weights[j] * p.weight;
  }
  return detail::rank(index, std::move(scores), k, q.empty());
}

std::vector<RetrievalResult> retrieve_batch(const TfIdfIndex& index, std::span<const Query> queries,
                                            std::size_t k) {
  detail::check_k(k);
  std::vector<RetrievalResult> out(queries.size());
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = retrieve_topk(index, queries[i].text, k);
    out[i].qa_id = queries[i].qa_id;
    out[i].gold_doc_id = queries[i].gold_doc_id;
  }
  return out;
}

}  // namespace cfrag::retrieval
