// cfrag command-line entry point. Exit codes: 0 ok, 1 config error, 2 data error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cfrag/pipeline.hpp"
#include "cfrag/training.hpp"
#include "cfrag/util/errors.hpp"
#include "cfrag/util/text.hpp"

namespace fs = std::filesystem;
using namespace cfrag;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

// "key=value" pairs applied over a loaded config.
void apply_overrides(KvConfig& kv, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + s);
    kv.set(std::string(text::trim(s.substr(0, eq))), std::string(text::trim(s.substr(eq + 1))));
  }
}

KvConfig load_kv(const std::string& path) { return path.empty() ? KvConfig{} : KvConfig::load(path); }

// "name:key=v,key=v"
std::pair<std::string, std::vector<std::string>> parse_variant(const std::string& v) {
  const auto colon = v.find(':');
  if (colon == std::string::npos || colon == 0) throw ConfigError("variant must look like name:key=v,...: " + v);
  std::vector<std::string> sets;
  for (auto& part : text::split(v.substr(colon + 1), ',')) {
    if (!text::trim(part).empty()) sets.push_back(part);
  }
  return {v.substr(0, colon), sets};
}

std::vector<std::size_t> parse_k_list(const std::string& s) {
  std::vector<std::size_t> ks;
  for (const auto& part : text::split(s, ',')) {
    const auto v = text::parse_int(text::trim(part));
    if (!v || *v < 1) throw ConfigError("--k expects positive integers, got \"" + part + "\"");
    ks.push_back(static_cast<std::size_t>(*v));
  }
  return ks;
}

struct Corpus {
  std::vector<corpus::Document> docs;
  corpus::ExtractionBatch batch;
};

Corpus load_and_extract(const fs::path& dir) {
  Corpus c;
  c.docs = corpus::load_corpus(dir);
  c.batch = corpus::extract_corpus(c.docs);
  return c;
}

std::vector<qagen::QAItem> select_split(std::vector<qagen::QAItem> items, const std::string& split) {
  if (split == "all") return items;
  const auto want = qagen::parse_split(split);
  if (!want) throw ConfigError("--split must be train, test or all");
  std::erase_if(items, [&](const auto& i) { return i.split != *want; });
  return items;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cfrag: carbon-footprint question answering over extracted report text"};
  app.require_subcommand(1);

  // synth
  std::string out;
  std::uint64_t seed = 2024;
  corpus::SynthConfig synth_cfg;
  auto* synth = app.add_subcommand("synth", "write a synthetic corpus plus its ground-truth records");
  synth->add_option("--out", out, "output directory")->required();
  synth->add_option("--seed", seed, "root seed");
  synth->add_option("--documents", synth_cfg.document_count, "document count");
  synth->add_option("--lifecycle-share", synth_cfg.lifecycle_share);
  synth->add_option("--shuffle-probability", synth_cfg.shuffle_probability);
  synth->add_option("--spurious-token-rate", synth_cfg.spurious_token_rate);
  synth->add_option("--paragraph-split-rate", synth_cfg.paragraph_split_rate);

  // ingest
  std::string corpus_dir;
  auto* ingest = app.add_subcommand("ingest", "extract structured records from a corpus");
  ingest->add_option("--corpus", corpus_dir, "corpus directory with manifest.csv")->required();
  ingest->add_option("--out", out)->required();

  // genqa
  qagen::GenConfig gen_cfg;
  double split_ratio = 0.8;
  auto* genqa = app.add_subcommand("genqa", "generate questions, gold programs and the train/test split");
  genqa->add_option("--corpus", corpus_dir)->required();
  genqa->add_option("--out", out)->required();
  genqa->add_option("--seed", seed);
  genqa->add_option("--questions-per-document", gen_cfg.questions_per_document);
  genqa->add_option("--max-arity", gen_cfg.max_arity);
  genqa->add_option("--split-ratio", split_ratio);

  // validate
  auto* validate = app.add_subcommand("validate", "component-sum and PCF outlier checks");
  validate->add_option("--corpus", corpus_dir)->required();
  validate->add_option("--out", out)->required();

  // index
  auto* index_cmd = app.add_subcommand("index", "build the TF-IDF index");
  index_cmd->add_option("--corpus", corpus_dir)->required();
  index_cmd->add_option("--out", out)->required();

  // retrieve
  std::string index_path, dataset_path, split = "test";
  std::size_t k = 10;
  auto* retrieve = app.add_subcommand("retrieve", "top-k retrieval for dataset questions");
  retrieve->add_option("--index", index_path)->required();
  retrieve->add_option("--dataset", dataset_path)->required();
  retrieve->add_option("--k", k);
  retrieve->add_option("--split", split, "train, test or all");
  retrieve->add_option("--out", out)->required();

  // hitrate
  std::string results_path, k_list = "1,3,5,10";
  auto* hitrate = app.add_subcommand("hitrate", "hit@k over a retrieval.jsonl");
  hitrate->add_option("--results", results_path)->required();
  hitrate->add_option("--k", k_list, "comma-separated cutoffs");

  // run
  std::string config_path;
  std::vector<std::string> sets;
  auto* run = app.add_subcommand("run", "end-to-end pipeline run");
  run->add_option("--config", config_path, "key/value config file");
  run->add_option("--set", sets, "override, key=value (repeatable)");
  run->add_option("--out", out);

  // ablate
  std::vector<std::string> config_paths, variants;
  auto* ablate = app.add_subcommand("ablate", "compare several configurations on one dataset");
  ablate->add_option("--config", config_paths, "one config per row (repeatable)");
  ablate->add_option("--base", config_path, "base config for --variant rows");
  ablate->add_option("--variant", variants, "name:key=v,key=v over --base (repeatable)");
  ablate->add_option("--set", sets, "override applied to every row");
  ablate->add_option("--out", out);

  // export-train
  auto* export_train = app.add_subcommand("export-train", "critic and reasoner fine-tuning data");
  export_train->add_option("--corpus", corpus_dir)->required();
  export_train->add_option("--dataset", dataset_path)->required();
  std::size_t export_k = 5;
  export_train->add_option("--k", export_k, "retrieved references per critic prompt");
  export_train->add_option("--out", out)->required();

  // prog run
  std::string program_path;
  auto* prog = app.add_subcommand("prog", "answer-program tools");
  prog->require_subcommand(1);
  auto* prog_run = prog->add_subcommand("run", "execute a program and print its answers as JSON");
  prog_run->add_option("file", program_path)->required();

  // eval
  std::string predictions_path;
  int decimals = 2;
  auto* eval_cmd = app.add_subcommand("eval", "score a predictions file");
  eval_cmd->add_option("--predictions", predictions_path)->required();
  eval_cmd->add_option("--dataset", dataset_path)->required();
  eval_cmd->add_option("--split", split, "questions expected in the predictions");
  eval_cmd->add_option("--decimals", decimals, "EM rounding");
  eval_cmd->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth) {
      synth_cfg.validate();
      const auto sc = corpus::synthesize_corpus(synth_cfg, text::derive_seed(seed, "synth"));
      corpus::write_corpus(out, sc.documents);
      ensure_dir(fs::path(out) / "truth");
      corpus::write_records(fs::path(out) / "truth", sc.records);
      std::printf("wrote %zu documents to %s\n", sc.documents.size(), out.c_str());
    } else if (*ingest) {
      const auto c = load_and_extract(corpus_dir);
      ensure_dir(out);
      corpus::write_records(out, c.batch.records);
      corpus::write_discards(out, c.batch.discards);
      std::printf("extracted %zu records, discarded %zu documents\n", c.batch.records.size(),
                  c.batch.discards.size());
    } else if (*genqa) {
      gen_cfg.validate();
      const auto c = load_and_extract(corpus_dir);
      if (c.batch.records.empty()) throw DataError("no document survived extraction");
      qagen::GenStats stats;
      auto items = qagen::generate_questions(c.batch.records, gen_cfg, seed, &stats);
      qagen::split_dataset(items, split_ratio, seed);
      ensure_dir(out);
      qagen::write_dataset(fs::path(out) / "dataset.jsonl", items);
      std::size_t train = 0;
      for (const auto& i : items) train += i.split == qagen::Split::Train ? 1 : 0;
      std::printf("%zu questions (%zu train, %zu test), skipped %zu top-n and %zu duplicate draws\n",
                  items.size(), train, items.size() - train, stats.skipped_top_n, stats.skipped_duplicates);
    } else if (*validate) {
      const auto c = load_and_extract(corpus_dir);
      const auto report = qagen::validate_records(c.batch.records);
      ensure_dir(out);
      qagen::write_validation_csv(fs::path(out) / "validation.csv", report);
      std::printf("validated %zu, needs-review %zu, not-applicable %zu (mean PCF %s, threshold %s)\n",
                  report.count(qagen::Overall::Validated), report.count(qagen::Overall::NeedsReview),
                  report.count(qagen::Overall::NotApplicable), text::format_fixed(report.mean_pcf, 2).c_str(),
                  text::format_fixed(report.pcf_threshold, 2).c_str());
    } else if (*index_cmd) {
      const auto docs = corpus::load_corpus(corpus_dir);
      const auto index = retrieval::TfIdfIndex::build(docs);
      ensure_dir(out);
      index.save(fs::path(out) / "index.json");
      std::printf("indexed %zu documents, %zu terms\n", index.doc_ids().size(), index.vocabulary().size());
    } else if (*retrieve) {
      const auto index = retrieval::TfIdfIndex::load(index_path);
      const auto items = select_split(qagen::read_dataset(dataset_path), split);
      std::vector<retrieval::Query> queries;
      for (const auto& i : items) queries.push_back({i.qa_id, i.question, i.doc_id});
      const auto results = retrieval::retrieve_batch(index, queries, k);
      ensure_dir(out);
      retrieval::write_results(fs::path(out) / "retrieval.jsonl", results);
      std::printf("retrieved top-%zu for %zu questions\n", k, results.size());
    } else if (*hitrate) {
      const auto ks = parse_k_list(k_list);
      const auto results = retrieval::read_results(results_path);
      for (auto kk : ks) {
        std::printf("hit@%zu\t%.4f\n", kk, retrieval::hit_rate(results, kk));
      }
    } else if (*run) {
      auto kv = load_kv(config_path);
      apply_overrides(kv, sets);
      if (!out.empty()) kv.set("out", out);
      const auto config = pipeline::RunConfig::from_kv(kv);
      const auto result = pipeline::run_pipeline(config);
      std::fputs(result.report.to_text().c_str(), stdout);
    } else if (*ablate) {
      std::vector<pipeline::RunConfig> configs;
      auto add = [&](KvConfig kv, const std::string& fallback_name, const std::vector<std::string>& extra) {
        apply_overrides(kv, extra);
        apply_overrides(kv, sets);
        if (!kv.contains("name")) kv.set("name", fallback_name);
        if (!out.empty()) kv.set("out", (fs::path(out) / *kv.get("name")).string());
        configs.push_back(pipeline::RunConfig::from_kv(kv));
      };
      for (const auto& p : config_paths) add(KvConfig::load(p), fs::path(p).stem().string(), {});
      const auto base = load_kv(config_path);
      for (const auto& v : variants) {
        auto [name, extra] = parse_variant(v);
        extra.push_back("name=" + name);
        add(base, name, extra);
      }
      if (configs.empty()) throw ConfigError("ablate needs --config files or --variant rows");
      const auto table = pipeline::run_ablation(configs);
      std::fputs(table.to_text().c_str(), stdout);
      if (!out.empty()) {
        ensure_dir(out);
        write_text(fs::path(out) / "ablation.txt", table.to_text());
        write_text(fs::path(out) / "ablation.json", table.to_json().dump(2) + "\n");
      }
    } else if (*export_train) {
      if (export_k == 0) throw ConfigError("--k must be >= 1");
      const auto docs = corpus::load_corpus(corpus_dir);
      const auto items = qagen::read_dataset(dataset_path);
      const auto index = retrieval::TfIdfIndex::build(docs);
      const corpus::DocumentStore store(docs);
      const auto critic_rows = training::export_critic_training(items, index, store, export_k);
      const auto reasoner_rows = training::export_reasoner_training(items, store);
      ensure_dir(out);
      training::write_training(fs::path(out) / "critic_train.jsonl", critic_rows);
      training::write_training(fs::path(out) / "reasoner_train.jsonl", reasoner_rows);
      std::printf("%zu critic and %zu reasoner examples\n", critic_rows.size(), reasoner_rows.size());
    } else if (*prog_run) {
      const auto result = dsl::run(read_text(program_path));
      if (!result) {
        std::fprintf(stderr, "%s\n", result.error().describe().c_str());
        return 2;
      }
      std::printf("%s\n", dsl::to_json(result.value()).dump().c_str());
    } else if (*eval_cmd) {
      const auto preds = eval::read_predictions(predictions_path);
      const auto golds = select_split(qagen::read_dataset(dataset_path), split);
      const auto report = eval::build_report(preds, golds, {}, decimals);
      std::fputs(report.to_text().c_str(), stdout);
      if (!out.empty()) {
        ensure_dir(out);
        write_text(fs::path(out) / "report.json", report.to_json().dump(2) + "\n");
        write_text(fs::path(out) / "report.txt", report.to_text());
      }
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
