#pragma once

// Teaches a mock LLM server the right answers for a dataset: for every
// evaluated question the critic prompt maps to the gold position and the
// reasoner prompt (on the gold document) maps to the fenced gold program.

#include "cfrag/critic.hpp"
#include "cfrag/llmgate.hpp"
#include "cfrag/pipeline.hpp"
#include "cfrag/reasoner.hpp"

namespace testing {

inline std::size_t add_remote_fixtures(cfrag::llm::MockLlmServer& server, const cfrag::pipeline::RunConfig& cfg,
                                       const cfrag::pipeline::Dataset& ds,
                                       const cfrag::retrieval::TfIdfIndex& index) {
  using namespace cfrag;
  const corpus::DocumentStore store(ds.documents);
  std::size_t n = 0;
  for (const auto& item : ds.items) {
    if (cfg.eval_split == pipeline::EvalSplit::Test && item.split != qagen::Split::Test) continue;
    const auto r = retrieval::retrieve_topk(index, item.question, cfg.k);
    std::vector<std::string> refs;
    for (const auto& s : r.ranked) refs.push_back(store.at(s.doc_id).raw_text);
    server.add_fixture(critic::build_critic_prompt(item.question, refs),
                       "The relevant reference is " + critic::critic_completion(retrieval::rank_of(r, item.doc_id)));
    server.add_fixture(reasoner::build_reasoner_prompt(item.question, store.at(item.doc_id).raw_text),
                       "Here is the program:\n```python\n" + item.gold_program + "\n```\n");
    ++n;
  }
  return n;
}

}  // namespace testing
