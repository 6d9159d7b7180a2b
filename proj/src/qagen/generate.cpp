#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <random>
#include <set>
#include <stdexcept>

#include "cfrag/qagen.hpp"
#include "cfrag/util/errors.hpp"
#include "cfrag/util/text.hpp"

namespace cfrag::qagen {

std::string label(const QuestionType& t) {
  switch (t.family) {
    case QuestionFamily::WordMatch: return "word_match";
    case QuestionFamily::MaxMin: return t.direction == Extremum::Max ? "max" : "min";
    case QuestionFamily::TopN: return "top" + std::to_string(t.n);
    case QuestionFamily::Calculation: return "calculation";
  }
  return "unknown";
}

std::optional<QuestionType> parse_question_type(std::string_view s) {
  if (s == "word_match") return QuestionType::word_match();
  if (s == "max") return QuestionType::max_min(Extremum::Max);
  if (s == "min") return QuestionType::max_min(Extremum::Min);
  if (s == "top3") return QuestionType::top_n(3);
  if (s == "top5") return QuestionType::top_n(5);
  if (s == "calculation") return QuestionType::calculation();
  return std::nullopt;
}

std::string_view family_name(QuestionFamily f) {
  switch (f) {
    case QuestionFamily::WordMatch: return "Word Match";
    case QuestionFamily::MaxMin: return "Max/Min";
    case QuestionFamily::TopN: return "Top 3/5";
    case QuestionFamily::Calculation: return "Calculation";
  }
  return "?";
}

std::string_view to_string(Split s) { return s == Split::Train ? "train" : "test"; }

std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  return std::nullopt;
}

void GenConfig::validate() const {
  if (questions_per_document < 1) throw ConfigError("questions_per_document must be >= 1");
  for (double w : {word_match_weight, calculation_weight, max_min_weight, top_n_weight}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("question weights must be >= 0");
  }
  if (word_match_weight + calculation_weight + max_min_weight + top_n_weight <= 0.0) {
    throw ConfigError("at least one question weight must be positive");
  }
  if (max_arity < 1 || max_arity > 5) throw ConfigError("max_arity must be in [1,5]");
}

namespace {

using corpus::ExtractionRecord;
using Rng = std::mt19937_64;

struct Candidate {
  QuestionType qtype;
  std::vector<std::string> targets;
  std::string template_id;
};

std::string display_name(const std::string& target) {
  if (target == kTotalTarget) return "total";
  if (const auto* s = corpus::find_stage(target)) return std::string(s->question_name);
  return target;
}

std::string join_names(const std::vector<std::string>& targets) {
  std::string out;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (i > 0) out += (i + 1 == targets.size()) ? " and " : ", ";
    out += display_name(targets[i]);
  }
  return out;
}

// {P} product, {T} targets, {N} n
using Phrasings = std::array<std::string_view, 3>;

const Phrasings& phrasings(std::string_view template_id) {
  static const Phrasings total{
      "What is the total carbon footprint of the {P}?",
      "How much CO2e does the {P} emit over its whole life cycle?",
      "What product carbon footprint is reported for the {P}?"};
  static const Phrasings component_percent{
      "What are the carbon footprint percentages of {T} in the {P}?",
      "What share of the footprint is attributed to {T} for the {P}?",
      "Which percentages are reported for {T} in the {P}?"};
  static const Phrasings stage_percent{
      "What percentage of the footprint of the {P} comes from {T}?",
      "What share of emissions does {T} account for in the {P}?",
      ""};
  static const Phrasings maximum{
      "Which component has the largest carbon footprint share in the {P}?",
      "What is the most carbon intensive component of the {P}?",
      ""};
  static const Phrasings minimum{
      "Which component has the smallest carbon footprint share in the {P}?",
      "What is the least carbon intensive component of the {P}?",
      ""};
  static const Phrasings top{
      "What are the top {N} components by carbon footprint in the {P}?",
      "List the {N} components with the highest carbon footprint share in the {P}.",
      ""};
  static const Phrasings calculation{
      "What are the carbon footprints of {T} in the {P}?",
      "How many kgCO2e are attributed to {T} in the {P}?",
      "Calculate the emissions from {T} for the {P}."};
  if (template_id == "word_match.total") return total;
  if (template_id == "word_match.component_percent") return component_percent;
  if (template_id == "word_match.stage_percent") return stage_percent;
  if (template_id == "max_min.max") return maximum;
  if (template_id == "max_min.min") return minimum;
  if (template_id == "top_n") return top;
  return calculation;
}

std::string render(std::string_view pattern, const ExtractionRecord& r, const Candidate& c) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '{' && i + 2 < pattern.size() && pattern[i + 2] == '}') {
      switch (pattern[i + 1]) {
        case 'P': out += r.product_name + " " + r.product_type; break;
        case 'T': out += join_names(c.targets); break;
        case 'N': out += std::to_string(c.qtype.n); break;
      }
      i += 2;
    } else {
      out += pattern[i];
    }
  }
  return out;
}

std::vector<std::string> pick(Rng& rng, std::vector<std::string> pool, std::size_t count) {
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(count, pool.size()));
  return pool;
}

std::size_t draw_arity(Rng& rng, std::size_t available, int max_arity) {
  static constexpr std::array<double, 5> kWeights{0.40, 0.30, 0.15, 0.10, 0.05};
  const auto limit = std::min<std::size_t>(available, static_cast<std::size_t>(max_arity));
  std::discrete_distribution<std::size_t> dist(kWeights.begin(), kWeights.begin() + limit);
  return dist(rng) + 1;
}

std::vector<std::string> component_ids(const ExtractionRecord& r) {
  std::vector<std::string> out;
  for (const auto& [name, pct] : r.component_percents) out.push_back(name);
  return out;
}

std::vector<std::string> stage_ids(const ExtractionRecord& r) {
  std::vector<std::string> out;
  if (r.lifecycle_percents) {
    for (const auto& [name, pct] : *r.lifecycle_percents) out.push_back(name);
  }
  return out;
}

// nullopt when the record cannot support the drawn question (logged by the caller).
std::optional<Candidate> draw_candidate(Rng& rng, const ExtractionRecord& r, const GenConfig& cfg,
                                        bool& skipped_top_n) {
  std::discrete_distribution<int> family({cfg.word_match_weight, cfg.calculation_weight,
                                          cfg.max_min_weight, cfg.top_n_weight});
  const auto comps = component_ids(r);
  const auto stages = stage_ids(r);
  switch (family(rng)) {
    case 0: {
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      if (u < 0.3) return Candidate{QuestionType::word_match(), {std::string(kTotalTarget)}, "word_match.total"};
      if (u < 0.5 && !stages.empty()) {
        const auto n = draw_arity(rng, std::min<std::size_t>(stages.size(), 2), cfg.max_arity);
        return Candidate{QuestionType::word_match(), pick(rng, stages, n), "word_match.stage_percent"};
      }
      const auto n = draw_arity(rng, std::min<std::size_t>(comps.size(), 3), cfg.max_arity);
      return Candidate{QuestionType::word_match(), pick(rng, comps, n), "word_match.component_percent"};
    }
    case 1: {
      auto pool = comps;
      pool.insert(pool.end(), stages.begin(), stages.end());
      const auto n = draw_arity(rng, pool.size(), cfg.max_arity);
      return Candidate{QuestionType::calculation(), pick(rng, pool, n), "calculation"};
    }
    case 2: {
      const bool max = std::bernoulli_distribution(0.5)(rng);
      return Candidate{QuestionType::max_min(max ? Extremum::Max : Extremum::Min), {},
                       max ? "max_min.max" : "max_min.min"};
    }
    default: {
      const int n = std::bernoulli_distribution(0.5)(rng) ? 3 : 5;
      if (comps.size() < static_cast<std::size_t>(n)) {
        skipped_top_n = true;
        return std::nullopt;
      }
      return Candidate{QuestionType::top_n(n), {}, "top_n"};
    }
  }
}

// Answers computed straight from the record, used to check each gold program.
dsl::AnswerList expected_answers(const ExtractionRecord& r, const Candidate& c) {
  const auto pct = [&](const std::string& t) {
    if (corpus::find_stage(t)) return *corpus::find_percent(*r.lifecycle_percents, t);
    return *corpus::find_percent(r.component_percents, t);
  };
  dsl::AnswerList out;
  switch (c.qtype.family) {
    case QuestionFamily::WordMatch:
      for (const auto& t : c.targets) out.push_back(dsl::number(t == kTotalTarget ? r.total_pcf : pct(t)));
      break;
    case QuestionFamily::Calculation:
      for (const auto& t : c.targets) {
        double v = r.total_pcf;
        if (t == kTotalTarget) {
        } else if (corpus::find_stage(t)) {
          v *= pct(t) / 100.0;
        } else {
          if (r.schema == corpus::Schema::LifecycleBreakdown) v *= pct("manufacturing") / 100.0;
          v *= pct(t) / 100.0;
        }
        out.push_back(dsl::number(v));
      }
      break;
    case QuestionFamily::MaxMin: {
      auto best = r.component_percents.front();
      for (const auto& kv : r.component_percents) {
        if (c.qtype.direction == Extremum::Max ? kv.second > best.second : kv.second < best.second) best = kv;
      }
      out.push_back(dsl::labeled(best.first, best.second));
      break;
    }
    case QuestionFamily::TopN: {
      auto sorted = r.component_percents;
      std::stable_sort(sorted.begin(), sorted.end(),
                       [](const auto& a, const auto& b) { return a.second > b.second; });
      for (int i = 0; i < c.qtype.n && i < static_cast<int>(sorted.size()); ++i) {
        out.push_back(dsl::labeled(sorted[i].first, sorted[i].second));
      }
      break;
    }
  }
  return out;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

bool answers_close(const dsl::AnswerList& a, const dsl::AnswerList& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].label != b[i].label || !close(a[i].value, b[i].value)) return false;
  }
  return true;
}

std::string dedupe_key(const Candidate& c) {
  std::string key = label(c.qtype) + "|" + c.template_id;
  for (const auto& t : c.targets) key += "|" + t;
  return key;
}

std::vector<QAItem> questions_for(const ExtractionRecord& r, const GenConfig& cfg,
                                  std::uint64_t seed, GenStats& stats) {
  Rng rng(text::derive_seed(seed, "genqa:" + r.doc_id));
  std::vector<QAItem> out;
  std::set<std::string> seen;
  const int attempts = cfg.questions_per_document * 8;
  for (int a = 0; a < attempts && static_cast<int>(out.size()) < cfg.questions_per_document; ++a) {
    bool skipped_top_n = false;
    auto cand = draw_candidate(rng, r, cfg, skipped_top_n);
    if (!cand) {
      stats.skipped_top_n += skipped_top_n ? 1 : 0;
      continue;
    }
    if (!seen.insert(dedupe_key(*cand)).second) {
      ++stats.skipped_duplicates;
      continue;
    }
    const auto& pool = phrasings(cand->template_id);
    const auto variants = static_cast<std::size_t>(std::count_if(
        pool.begin(), pool.end(), [](std::string_view p) { return !p.empty(); }));
    const auto phrasing = pool[std::uniform_int_distribution<std::size_t>(0, variants - 1)(rng)];

    QAItem item;
    char idbuf[16];
    std::snprintf(idbuf, sizeof idbuf, "-q%02zu", out.size() + 1);
    item.qa_id = r.doc_id + idbuf;
    item.doc_id = r.doc_id;
    item.qtype = cand->qtype;
    item.question = render(phrasing, r, *cand);
    item.targets = cand->targets;
    item.template_id = cand->template_id;
    item.gold_program = generate_gold_program(r, cand->qtype, cand->targets);

    auto executed = dsl::run(item.gold_program);
    if (!executed) {
      throw std::logic_error("gold program for " + item.qa_id + " failed: " + executed.error().describe());
    }
    if (!answers_close(executed.value(), expected_answers(r, *cand))) {
      throw std::logic_error("gold program for " + item.qa_id + " disagrees with its record");
    }
    item.gold_answers = std::move(executed).value();
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace

std::vector<QAItem> generate_questions(std::span<const ExtractionRecord> records,
                                       const GenConfig& config, std::uint64_t seed,
                                       GenStats* stats) {
  config.validate();
  if (records.empty()) throw DataError("no extraction records to generate questions from");

  const auto n = static_cast<std::ptrdiff_t>(records.size());
  std::vector<std::vector<QAItem>> per_doc(records.size());
  std::vector<GenStats> per_stats(records.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      per_doc[i] = questions_for(records[i], config, seed, per_stats[i]);
    } catch (...) {
#pragma omp critical(cfrag_genqa_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<QAItem> out;
  GenStats total;
  for (std::size_t i = 0; i < per_doc.size(); ++i) {
    for (auto& item : per_doc[i]) out.push_back(std::move(item));
    total.skipped_top_n += per_stats[i].skipped_top_n;
    total.skipped_duplicates += per_stats[i].skipped_duplicates;
  }
  if (stats) *stats = total;
  return out;
}

std::vector<std::string> verify_gold_programs(std::span<const QAItem> items) {
  std::vector<char> bad(items.size(), 0);
  const auto n = static_cast<std::ptrdiff_t>(items.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto result = dsl::run(items[i].gold_program);
    bad[i] = !result || result.value() != items[i].gold_answers;
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (bad[i]) out.push_back(items[i].qa_id);
  }
  return out;
}

}  // namespace cfrag::qagen
