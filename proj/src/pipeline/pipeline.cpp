#include <algorithm>
#include <omp.h>
#include <fstream>
#include <random>
#include <unordered_map>

#include "cfrag/pipeline.hpp"
#include "cfrag/util/errors.hpp"
#include "cfrag/util/text.hpp"

namespace cfrag::pipeline {

std::string Dataset::fingerprint() const {
  std::uint64_t h = text::fnv1a64("cfrag-dataset");
  auto mix = [&h](std::string_view s) { h = text::fnv1a64(text::hex64(h) + std::string(s)); };
  for (const auto& d : documents) mix(d.doc_id);
  for (const auto& item : items) {
    mix(item.qa_id);
    mix(item.gold_program);
    mix(qagen::to_string(item.split));
  }
  return text::hex64(h);
}

Dataset prepare_dataset(const RunConfig& config) {
  config.validate();
  Dataset ds;
  if (config.corpus_dir) {
    ds.documents = corpus::load_corpus(*config.corpus_dir);
  } else {
    auto synth = corpus::synthesize_corpus(config.synth, text::derive_seed(config.seed, "synth"));
    ds.documents = std::move(synth.documents);
  }
  auto batch = corpus::extract_corpus(ds.documents);
  ds.records = std::move(batch.records);
  ds.discards = std::move(batch.discards);

  if (config.dataset_path) {
    ds.items = qagen::read_dataset(*config.dataset_path);
  } else {
    if (ds.records.empty()) throw DataError("no document survived extraction");
    ds.items = qagen::generate_questions(ds.records, config.gen, config.seed);
    qagen::split_dataset(ds.items, config.split_ratio, config.seed);
  }
  return ds;
}

namespace {

// Moves the gold document off rank 1 with the configured probability.
void inject_noise(retrieval::RetrievalResult& r, const std::string& gold, double p, std::uint64_t seed) {
  if (p <= 0.0 || r.ranked.size() < 2 || r.ranked.front().doc_id != gold) return;
  std::mt19937_64 rng(text::derive_seed(seed, "noise:" + r.qa_id));
  if (!std::bernoulli_distribution(p)(rng)) return;
  const auto target = std::uniform_int_distribution<std::size_t>(2, r.ranked.size())(rng);
  // Scores stay attached to their positions so the list remains descending.
  std::vector<std::string> ids;
  for (const auto& s : r.ranked) ids.push_back(s.doc_id);
  std::rotate(ids.begin(), ids.begin() + 1, ids.begin() + static_cast<std::ptrdiff_t>(target));
  for (std::size_t i = 0; i < ids.size(); ++i) r.ranked[i].doc_id = ids[i];
}

struct Context {
  const RunConfig& config;
  const Dataset& dataset;
  const retrieval::TfIdfIndex& index;
  const corpus::DocumentStore& store;
  llm::LlmClient* client;
};

QuestionTrace process(const Context& ctx, const qagen::QAItem& item) {
  const auto& cfg = ctx.config;
  QuestionTrace t;
  t.prediction.qa_id = item.qa_id;

  // Retrieve
  if (cfg.retriever == RetrieverMode::Gold) {
    t.retrieval.ranked = {{item.doc_id, 1.0}};
  } else {
    t.retrieval = retrieval::retrieve_topk(ctx.index, item.question, cfg.k);
  }
  t.retrieval.qa_id = item.qa_id;
  if (cfg.retriever == RetrieverMode::TfIdf) inject_noise(t.retrieval, item.doc_id, cfg.retrieval_noise, cfg.seed);
  t.retrieval.gold_doc_id = item.doc_id;
  if (t.retrieval.ranked.empty()) throw DataError("empty corpus");

  // Critic
  std::vector<critic::Candidate> candidates;
  for (const auto& s : t.retrieval.ranked) candidates.push_back({s.doc_id, ctx.store.at(s.doc_id).raw_text});
  switch (cfg.critic) {
    case CriticMode::None:
      t.verdict = critic::CriticVerdict::none();
      break;
    case CriticMode::Lexical:
      t.verdict = critic::lexical_critic(item.question, candidates);
      break;
    case CriticMode::Remote: {
      std::vector<std::string> refs;
      for (const auto& c : candidates) refs.push_back(c.text);
      llm::LlmRequest req{item.qa_id + "/critic", critic::build_critic_prompt(item.question, refs), "",
                          cfg.llm_max_tokens, cfg.llm_temperature};
      const auto res = ctx.client->complete(req);
      if (res.ok()) {
        t.critic_raw = res.completion;
        t.verdict = critic::parse_critic_response(res.completion, candidates.size());
      } else {
        t.verdict = critic::CriticVerdict::parse_failure();
      }
      break;
    }
  }
  const auto chosen = critic::resolve_verdict(t.verdict, t.retrieval);
  const auto& reference = ctx.store.at(chosen).raw_text;

  // Reason
  const auto spec = reasoner::question_spec(item);
  if (cfg.reasoner == ReasonerMode::Oracle) {
    t.reasoner = reasoner::oracle_reason(spec, reference);
  } else {
    t.reasoner.qa_id = item.qa_id;
    t.reasoner.provenance = reasoner::Provenance::Remote;
    llm::LlmRequest req{item.qa_id + "/reasoner", reasoner::build_reasoner_prompt(item.question, reference),
                        "", cfg.llm_max_tokens, cfg.llm_temperature};
    const auto res = ctx.client->complete(req);
    if (!res.ok()) {
      t.reasoner.failure = reasoner::GenerationFailure{
          reasoner::FailureReason::RemoteError,
          std::string(llm::to_string(res.status)) + (res.error.empty() ? "" : ": " + res.error)};
    } else {
      t.reasoner.raw_completion = res.completion;
      auto parsed = reasoner::parse_reasoner_response(res.completion);
      if (auto* program = std::get_if<std::string>(&parsed)) {
        t.reasoner.program_source = std::move(*program);
      } else {
        t.reasoner.failure = std::get<reasoner::GenerationFailure>(parsed);
      }
    }
  }

  // Execute
  if (!t.reasoner.ok()) {
    t.prediction.failure =
        chosen != item.doc_id ? eval::FailureKind::WrongDoc : eval::FailureKind::GenerationFailure;
    t.prediction.detail = std::string(reasoner::to_string(t.reasoner.failure->reason)) + ": " +
                          t.reasoner.failure->detail;
    return t;
  }
  auto result = dsl::run(t.reasoner.program_source);
  if (result) {
    t.prediction.answers = std::move(result).value();
  } else {
    t.prediction.failure = result.error().kind == dsl::ErrorKind::ParseError ? eval::FailureKind::ParseFailure
                                                                              : eval::FailureKind::ExecFailure;
    t.prediction.detail = result.error().describe();
  }
  return t;
}

eval::StageStats stage_stats(const RunConfig& cfg, const std::vector<QuestionTrace>& traces) {
  eval::StageStats s;
  std::vector<retrieval::RetrievalResult> results;
  results.reserve(traces.size());
  for (const auto& t : traces) results.push_back(t.retrieval);
  if (!traces.empty()) {
    for (std::size_t k : {std::size_t{1}, std::size_t{3}, std::size_t{5}, std::size_t{10}, cfg.k}) {
      if (k <= cfg.k) s.hit_at_k[k] = retrieval::hit_rate(results, k);
    }
    std::size_t correct = 0;
    for (const auto& t : traces) {
      correct += t.verdict.chosen_doc_id == t.retrieval.gold_doc_id ? 1 : 0;
      s.critic_parse_failures += t.verdict.kind == critic::VerdictKind::ParseFailure ? 1 : 0;
      s.critic_none_applicable += t.verdict.kind == critic::VerdictKind::NoneApplicable ? 1 : 0;
    }
    if (cfg.critic != CriticMode::None) {
      s.critic_accuracy = static_cast<double>(correct) / static_cast<double>(traces.size());
    }
  }
  return s;
}

}  // namespace

RunResult run_pipeline(const RunConfig& config, const Dataset& dataset, const retrieval::TfIdfIndex& index,
                       llm::LlmClient* client) {
  config.validate();
  const bool remote = config.critic == CriticMode::Remote || config.reasoner == ReasonerMode::Remote;
  if (remote && client == nullptr) throw ConfigError("remote critic or reasoner needs an llm client");
  // A dead endpoint would turn every question into a slow retry loop.
  if (remote) {
    if (auto err = client->probe()) throw ConfigError("llm endpoint unreachable, " + *err);
  }

  std::vector<const qagen::QAItem*> eval_items;
  for (const auto& item : dataset.items) {
    if (config.eval_split == EvalSplit::All || item.split == qagen::Split::Test) eval_items.push_back(&item);
  }
  std::sort(eval_items.begin(), eval_items.end(), [](auto* a, auto* b) { return a->qa_id < b->qa_id; });
  if (eval_items.empty()) throw DataError("no questions in the evaluation split");

  const corpus::DocumentStore store(dataset.documents);
  const Context ctx{config, dataset, index, store, client};

  RunResult out;
  out.name = config.name;
  out.config = config.to_json();
  out.dataset_fingerprint = dataset.fingerprint();
  out.traces.resize(eval_items.size());
  const auto n = static_cast<std::ptrdiff_t>(eval_items.size());
  // Remote questions mostly wait on the network, so allow max_in_flight of them
  // even on a small machine.
  const int threads = remote ? std::max(omp_get_max_threads(), client->config().max_in_flight) : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out.traces[i] = process(ctx, *eval_items[i]);
    } catch (const std::exception& e) {
      // A question that blows up still gets a scoreable prediction.
      auto& t = out.traces[i];
      t.retrieval.qa_id = eval_items[i]->qa_id;
      t.retrieval.gold_doc_id = eval_items[i]->doc_id;
      t.prediction = {eval_items[i]->qa_id, {}, eval::FailureKind::GenerationFailure, e.what()};
      t.reasoner.qa_id = eval_items[i]->qa_id;
    }
  }

  std::vector<eval::Prediction> preds;
  std::vector<qagen::QAItem> golds;
  preds.reserve(out.traces.size());
  golds.reserve(eval_items.size());
  for (const auto& t : out.traces) preds.push_back(t.prediction);
  for (const auto* item : eval_items) golds.push_back(*item);
  out.report = eval::build_report(preds, golds, stage_stats(config, out.traces), config.em_decimals);
  if (client) out.llm_log = client->request_log();
  return out;
}

RunResult run_pipeline(const RunConfig& config) {
  const auto dataset = prepare_dataset(config);
  const auto index = retrieval::TfIdfIndex::build(dataset.documents);
  std::unique_ptr<llm::LlmClient> client;
  if (config.critic == CriticMode::Remote || config.reasoner == ReasonerMode::Remote) {
    client = std::make_unique<llm::LlmClient>(config.llm);
  }
  auto result = run_pipeline(config, dataset, index, client.get());
  if (config.out_dir) write_artifacts(*config.out_dir, result, dataset);
  return result;
}

namespace {

void write_lines(const std::filesystem::path& path, const std::vector<nlohmann::json>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& j : lines) out << j.dump() << '\n';
}

}  // namespace

void write_artifacts(const std::filesystem::path& dir, const RunResult& result, const Dataset& dataset) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());

  qagen::write_dataset(dir / "dataset.jsonl", dataset.items);

  std::vector<retrieval::RetrievalResult> retrievals;
  std::vector<nlohmann::json> critic_lines, reasoner_lines;
  std::vector<eval::Prediction> preds;
  for (const auto& t : result.traces) {
    retrievals.push_back(t.retrieval);
    nlohmann::json c{{"qa_id", t.retrieval.qa_id},
                     {"verdict", std::string(critic::to_string(t.verdict.kind))},
                     {"selected_ids", t.verdict.selected_ids},
                     {"chosen_doc_id", t.verdict.chosen_doc_id.value_or("")},
                     {"gold_doc_id", t.retrieval.gold_doc_id.value_or("")}};
    if (t.critic_raw) c["raw"] = *t.critic_raw;
    critic_lines.push_back(std::move(c));
    nlohmann::json r{{"qa_id", t.reasoner.qa_id},
                     {"provenance", std::string(reasoner::to_string(t.reasoner.provenance))},
                     {"program", t.reasoner.program_source}};
    if (t.reasoner.raw_completion) r["raw_completion"] = *t.reasoner.raw_completion;
    if (t.reasoner.failure) {
      r["failure"] = std::string(reasoner::to_string(t.reasoner.failure->reason));
      r["failure_detail"] = t.reasoner.failure->detail;
    }
    reasoner_lines.push_back(std::move(r));
    preds.push_back(t.prediction);
  }
  retrieval::write_results(dir / "retrieval.jsonl", retrievals);
  write_lines(dir / "critic.jsonl", critic_lines);
  write_lines(dir / "reasoner.jsonl", reasoner_lines);
  eval::write_predictions(dir / "predictions.jsonl", preds);

  {
    auto report = result.report.to_json();
    report["name"] = result.name;
    report["dataset_fingerprint"] = result.dataset_fingerprint;
    std::ofstream out(dir / "report.json", std::ios::binary);
    out << report.dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "report.txt", std::ios::binary);
    out << result.report.to_text();
  }
  {
    std::ofstream out(dir / "run_config.json", std::ios::binary);
    out << result.config.dump(2) << '\n';
  }
  if (!result.llm_log.empty()) write_lines(dir / "llm_requests.jsonl", result.llm_log);
}

}  // namespace cfrag::pipeline
