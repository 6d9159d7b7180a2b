#include <functional>
#include <map>

#include "cfrag/pipeline.hpp"
#include "cfrag/util/errors.hpp"
#include "cfrag/util/text.hpp"

namespace cfrag::pipeline {

std::string_view to_string(CriticMode m) {
  switch (m) {
    case CriticMode::None: return "none";
    case CriticMode::Lexical: return "lexical";
    case CriticMode::Remote: return "remote";
  }
  return "?";
}

std::string_view to_string(ReasonerMode m) { return m == ReasonerMode::Oracle ? "oracle" : "remote"; }
std::string_view to_string(RetrieverMode m) { return m == RetrieverMode::TfIdf ? "tfidf" : "gold"; }

namespace {

double as_double(const std::string& key, const std::string& v) {
  auto d = text::parse_double(v);
  if (!d) throw ConfigError(key + ": expected a number, got \"" + v + "\"");
  return *d;
}

long long as_int(const std::string& key, const std::string& v) {
  auto i = text::parse_int(v);
  if (!i) throw ConfigError(key + ": expected an integer, got \"" + v + "\"");
  return *i;
}

std::size_t as_size(const std::string& key, const std::string& v) {
  const auto i = as_int(key, v);
  if (i < 0) throw ConfigError(key + ": must be >= 0");
  return static_cast<std::size_t>(i);
}

}  // namespace

RunConfig RunConfig::from_kv(const KvConfig& kv) {
  RunConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter, std::less<>> setters{
      {"name", [&](auto&, auto& v) { c.name = v; }},
      {"seed", [&](auto& k, auto& v) {
         const auto s = as_int(k, v);
         if (s < 0) throw ConfigError("seed must be >= 0");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"out", [&](auto&, auto& v) { c.out_dir = v; }},
      {"k", [&](auto& k, auto& v) { c.k = as_size(k, v); }},
      {"critic", [&](auto&, auto& v) {
         if (v == "none") c.critic = CriticMode::None;
         else if (v == "lexical") c.critic = CriticMode::Lexical;
         else if (v == "remote") c.critic = CriticMode::Remote;
         else throw ConfigError("critic must be none, lexical or remote, got \"" + v + "\"");
       }},
      {"reasoner", [&](auto&, auto& v) {
         if (v == "oracle") c.reasoner = ReasonerMode::Oracle;
         else if (v == "remote") c.reasoner = ReasonerMode::Remote;
         else throw ConfigError("reasoner must be oracle or remote, got \"" + v + "\"");
       }},
      {"retriever", [&](auto&, auto& v) {
         if (v == "tfidf") c.retriever = RetrieverMode::TfIdf;
         else if (v == "gold") c.retriever = RetrieverMode::Gold;
         else throw ConfigError("retriever must be tfidf or gold, got \"" + v + "\"");
       }},
      {"retrieval_noise", [&](auto& k, auto& v) { c.retrieval_noise = as_double(k, v); }},
      {"eval_split", [&](auto&, auto& v) {
         if (v == "test") c.eval_split = EvalSplit::Test;
         else if (v == "all") c.eval_split = EvalSplit::All;
         else throw ConfigError("eval_split must be test or all, got \"" + v + "\"");
       }},
      {"split_ratio", [&](auto& k, auto& v) { c.split_ratio = as_double(k, v); }},
      {"em_decimals", [&](auto& k, auto& v) { c.em_decimals = static_cast<int>(as_int(k, v)); }},
      {"corpus.dir", [&](auto&, auto& v) { c.corpus_dir = v; }},
      {"dataset.path", [&](auto&, auto& v) { c.dataset_path = v; }},
      {"synth.documents", [&](auto& k, auto& v) { c.synth.document_count = as_size(k, v); }},
      {"synth.lifecycle_share", [&](auto& k, auto& v) { c.synth.lifecycle_share = as_double(k, v); }},
      {"synth.shuffle_probability", [&](auto& k, auto& v) { c.synth.shuffle_probability = as_double(k, v); }},
      {"synth.spurious_token_rate", [&](auto& k, auto& v) { c.synth.spurious_token_rate = as_double(k, v); }},
      {"synth.paragraph_split_rate", [&](auto& k, auto& v) { c.synth.paragraph_split_rate = as_double(k, v); }},
      {"genqa.questions_per_document",
       [&](auto& k, auto& v) { c.gen.questions_per_document = static_cast<int>(as_int(k, v)); }},
      {"genqa.word_match_weight", [&](auto& k, auto& v) { c.gen.word_match_weight = as_double(k, v); }},
      {"genqa.calculation_weight", [&](auto& k, auto& v) { c.gen.calculation_weight = as_double(k, v); }},
      {"genqa.max_min_weight", [&](auto& k, auto& v) { c.gen.max_min_weight = as_double(k, v); }},
      {"genqa.top_n_weight", [&](auto& k, auto& v) { c.gen.top_n_weight = as_double(k, v); }},
      {"genqa.max_arity", [&](auto& k, auto& v) { c.gen.max_arity = static_cast<int>(as_int(k, v)); }},
      {"llm.url", [&](auto&, auto& v) { c.llm.url = v; }},
      {"llm.key", [&](auto&, auto& v) { c.llm.api_key = v; }},
      {"llm.model", [&](auto&, auto& v) { c.llm.model = v; }},
      {"llm.retry_budget", [&](auto& k, auto& v) { c.llm.retry_budget = static_cast<int>(as_int(k, v)); }},
      {"llm.backoff_ms", [&](auto& k, auto& v) { c.llm.backoff = std::chrono::milliseconds(as_int(k, v)); }},
      {"llm.timeout_ms", [&](auto& k, auto& v) { c.llm.timeout = std::chrono::milliseconds(as_int(k, v)); }},
      {"llm.max_in_flight", [&](auto& k, auto& v) { c.llm.max_in_flight = static_cast<int>(as_int(k, v)); }},
      {"llm.max_tokens", [&](auto& k, auto& v) { c.llm_max_tokens = static_cast<int>(as_int(k, v)); }},
      {"llm.temperature", [&](auto& k, auto& v) { c.llm_temperature = as_double(k, v); }},
  };
  for (const auto& [key, value] : kv.entries()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown configuration key \"" + key + "\"");
    it->second(key, value);
  }
  return c;
}

void RunConfig::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (!(retrieval_noise >= 0.0 && retrieval_noise <= 1.0)) throw ConfigError("retrieval_noise must be in [0,1]");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ConfigError("split_ratio must be in (0,1)");
  if (em_decimals < 0 || em_decimals > 9) throw ConfigError("em_decimals must be in [0,9]");
  if (!corpus_dir) synth.validate();
  gen.validate();
  if (critic == CriticMode::Remote || reasoner == ReasonerMode::Remote) {
    llm.validate();
    if (llm_max_tokens < 1) throw ConfigError("llm.max_tokens must be >= 1");
    if (!(llm_temperature >= 0.0)) throw ConfigError("llm.temperature must be >= 0");
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j{
      {"name", name},
      {"seed", seed},
      {"k", k},
      {"critic", std::string(to_string(critic))},
      {"reasoner", std::string(to_string(reasoner))},
      {"retriever", std::string(to_string(retriever))},
      {"retrieval_noise", retrieval_noise},
      {"eval_split", eval_split == EvalSplit::Test ? "test" : "all"},
      {"split_ratio", split_ratio},
      {"em_decimals", em_decimals},
  };
  if (corpus_dir) {
    j["corpus_dir"] = corpus_dir->string();
  } else {
    j["synth"] = {{"documents", synth.document_count},
                  {"lifecycle_share", synth.lifecycle_share},
                  {"shuffle_probability", synth.shuffle_probability},
                  {"spurious_token_rate", synth.spurious_token_rate},
                  {"paragraph_split_rate", synth.paragraph_split_rate}};
  }
  if (dataset_path) {
    j["dataset_path"] = dataset_path->string();
  } else {
    j["genqa"] = {{"questions_per_document", gen.questions_per_document},
                  {"word_match_weight", gen.word_match_weight},
                  {"calculation_weight", gen.calculation_weight},
                  {"max_min_weight", gen.max_min_weight},
                  {"top_n_weight", gen.top_n_weight},
                  {"max_arity", gen.max_arity}};
  }
  if (critic == CriticMode::Remote || reasoner == ReasonerMode::Remote) {
    // The key stays out of artifacts.
    j["llm"] = {{"url", llm.url}, {"model", llm.model}, {"max_tokens", llm_max_tokens},
                {"temperature", llm_temperature}};
  }
  return j;
}

}  // namespace cfrag::pipeline
