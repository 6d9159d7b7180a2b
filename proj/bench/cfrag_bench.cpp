// Serial reference vs OpenMP kernels on a synthetic corpus.
//   cfrag_bench [documents] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <omp.h>

#include "cfrag/corpus.hpp"
#include "cfrag/evalkit.hpp"
#include "cfrag/qagen.hpp"
#include "cfrag/retrieval.hpp"
#include "cfrag/util/text.hpp"

using namespace cfrag;

namespace {

template <typename F>
double best_ms(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
    best = std::min(best, dt.count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-18s %10.2f %10.2f %8.2fx  %s\n", name, serial, parallel, serial / std::max(parallel, 1e-9),
              same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  corpus::SynthConfig sc;
  sc.document_count = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 1000;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;

  const auto corpus = corpus::synthesize_corpus(sc, text::derive_seed(2024, "synth"));
  auto items = qagen::generate_questions(corpus.records, {}, 2024);
  std::printf("%zu documents, %zu questions, %d threads\n\n", corpus.documents.size(), items.size(),
              omp_get_max_threads());
  std::printf("%-18s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

  retrieval::TfIdfIndex a, b;
  const double build_s = best_ms(repeats, [&] { a = retrieval::TfIdfIndex::build_serial(corpus.documents); });
  const double build_p = best_ms(repeats, [&] { b = retrieval::TfIdfIndex::build(corpus.documents); });
  row("index build", build_s, build_p, a == b);

  std::vector<retrieval::Query> queries;
  for (const auto& i : items) queries.push_back({i.qa_id, i.question, i.doc_id});
  std::vector<retrieval::RetrievalResult> ra, rb;
  const double ret_s = best_ms(repeats, [&] { ra = retrieval::retrieve_batch_serial(a, queries, 10); });
  const double ret_p = best_ms(repeats, [&] { rb = retrieval::retrieve_batch(a, queries, 10); });
  bool same = ra.size() == rb.size();
  for (std::size_t i = 0; same && i < ra.size(); ++i) same = retrieval::to_json(ra[i]) == retrieval::to_json(rb[i]);
  row("batch retrieval", ret_s, ret_p, same);

  std::vector<eval::Prediction> preds;
  for (const auto& i : items) preds.push_back({i.qa_id, i.gold_answers, std::nullopt, ""});
  eval::EvalReport ea, eb;
  const double rep_s = best_ms(repeats, [&] { ea = eval::build_report_serial(preds, items, {}); });
  const double rep_p = best_ms(repeats, [&] { eb = eval::build_report(preds, items, {}); });
  row("report", rep_s, rep_p, ea == eb);
  return 0;
}
