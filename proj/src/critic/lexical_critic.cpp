#include <algorithm>
#include <regex>
#include <set>
#include <stdexcept>

#include "cfrag/critic.hpp"
#include "cfrag/util/text.hpp"

namespace cfrag::critic {

std::string_view to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Selected: return "selected";
    case VerdictKind::NoneApplicable: return "none_applicable";
    case VerdictKind::ParseFailure: return "parse_failure";
  }
  return "?";
}

bool is_product_token(std::string_view token) {
  if (token.size() < 5) return false;
  const bool letter = std::any_of(token.begin(), token.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  });
  const bool digit = std::any_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
  return letter && digit;
}

std::vector<double> lexical_scores(std::string_view question, std::span<const Candidate> candidates) {
  const auto q = retrieval::tokenize(question);
  const std::set<std::string> q_terms(q.begin(), q.end());
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) {
    const auto tokens = retrieval::tokenize(c.text);
    const std::set<std::string> present(tokens.begin(), tokens.end());
    double score = 0.0;
    for (const auto& t : q_terms) {
      if (present.count(t)) score += is_product_token(t) ? 3.0 : 1.0;
    }
    scores.push_back(score);
  }
  return scores;
}

CriticVerdict lexical_critic(std::string_view question, std::span<const Candidate> candidates) {
  if (candidates.empty()) throw std::invalid_argument("lexical critic needs at least one candidate");
  const auto scores = lexical_scores(question, candidates);
  // max_element keeps the first of equal maxima.
  const auto best = std::max_element(scores.begin(), scores.end()) - scores.begin();
  return CriticVerdict::selected({static_cast<std::size_t>(best) + 1});
}

CriticVerdict parse_critic_response(std::string_view raw, std::size_t k) {
  static const std::regex list_re(R"(\[\s*(-?\d+(?:\s*,\s*-?\d+)*)?\s*,?\s*\])");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(raw.begin(), raw.end(), m, list_re)) return CriticVerdict::parse_failure();
  if (!m[1].matched) return CriticVerdict::none();

  std::vector<std::size_t> ids;
  for (const auto& part : text::split(m[1].str(), ',')) {
    auto v = text::parse_int(text::trim(part));
    if (!v || *v < 1 || static_cast<unsigned long long>(*v) > k) continue;
    const auto id = static_cast<std::size_t>(*v);
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  if (ids.empty()) return CriticVerdict::none();
  return CriticVerdict::selected(std::move(ids));
}

std::string resolve_verdict(CriticVerdict& verdict, const retrieval::RetrievalResult& retrieval) {
  if (retrieval.ranked.empty()) throw std::invalid_argument("cannot resolve a verdict without candidates");
  std::size_t pick = 1;
  if (verdict.kind == VerdictKind::Selected && !verdict.selected_ids.empty() &&
      verdict.selected_ids.front() >= 1 && verdict.selected_ids.front() <= retrieval.ranked.size()) {
    pick = verdict.selected_ids.front();
  }
  verdict.chosen_doc_id = retrieval.ranked[pick - 1].doc_id;
  return *verdict.chosen_doc_id;
}

}  // namespace cfrag::critic
