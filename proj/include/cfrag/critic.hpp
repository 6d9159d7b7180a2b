#pragma once

// Reference selection among retrieved candidates.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfrag/retrieval.hpp"

namespace cfrag::critic {

struct Candidate {
  std::string doc_id;
  std::string text;
};

enum class VerdictKind { Selected, NoneApplicable, ParseFailure };

std::string_view to_string(VerdictKind k);

struct CriticVerdict {
  VerdictKind kind = VerdictKind::NoneApplicable;
  std::vector<std::size_t> selected_ids;  // 1-based positions in the candidate list
  std::optional<std::string> chosen_doc_id;  // filled by resolve_verdict

  static CriticVerdict selected(std::vector<std::size_t> ids) {
    return {VerdictKind::Selected, std::move(ids), std::nullopt};
  }
  static CriticVerdict none() { return {VerdictKind::NoneApplicable, {}, std::nullopt}; }
  static CriticVerdict parse_failure() { return {VerdictKind::ParseFailure, {}, std::nullopt}; }
};

// Long alphanumeric identifiers such as model codes: at least five
// characters with both a letter and a digit.
bool is_product_token(std::string_view token);

// Sum over distinct question tokens present in each candidate; product
// tokens count three times.
std::vector<double> lexical_scores(std::string_view question, std::span<const Candidate> candidates);

// Argmax of lexical_scores, lowest index on ties. Throws std::invalid_argument
// on an empty candidate list.
CriticVerdict lexical_critic(std::string_view question, std::span<const Candidate> candidates);

// First bracketed integer list in the completion. [-1] or an empty list is
// NoneApplicable; indices outside [1,k] are dropped.
CriticVerdict parse_critic_response(std::string_view raw, std::size_t k);

// First selected candidate, or the retriever's rank-1 document for
// NoneApplicable / ParseFailure. Records the choice in verdict.chosen_doc_id.
// Throws std::invalid_argument when the retrieval result is empty.
std::string resolve_verdict(CriticVerdict& verdict, const retrieval::RetrievalResult& retrieval);

std::string build_critic_prompt(std::string_view question, std::span<const std::string> references);

// "[i]" for a 1-based gold position, "[-1]" when the gold document is absent.
std::string critic_completion(std::optional<std::size_t> gold_position);

}  // namespace cfrag::critic
