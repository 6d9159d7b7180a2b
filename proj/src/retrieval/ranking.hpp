#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "cfrag/retrieval.hpp"

namespace cfrag::retrieval::detail {

// Top-k by score, ties broken by doc_id (the index keeps documents sorted,
// so document position is doc_id order).
inline RetrievalResult rank(const TfIdfIndex& index, std::vector<double> scores, std::size_t k,
                            bool no_query_terms) {
  const std::size_t take = std::min(k, scores.size());
  std::vector<std::uint32_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0u);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
                    });
  RetrievalResult out;
  out.no_query_terms = no_query_terms;
  out.ranked.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    // Unit vectors can overshoot 1 by an ulp.
    out.ranked.push_back({index.doc_ids()[order[i]], std::clamp(scores[order[i]], 0.0, 1.0)});
  }
  return out;
}

inline void check_k(std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
}

}  // namespace cfrag::retrieval::detail
