#include <fstream>

#include "cfrag/retrieval.hpp"
#include "cfrag/util/errors.hpp"

namespace cfrag::retrieval {

std::optional<std::size_t> rank_of(const RetrievalResult& result, std::string_view doc_id) {
  for (std::size_t i = 0; i < result.ranked.size(); ++i) {
    if (result.ranked[i].doc_id == doc_id) return i + 1;
  }
  return std::nullopt;
}

namespace {

bool hit(const RetrievalResult& r, const std::string& gold, std::size_t k) {
  auto rank = rank_of(r, gold);
  return rank && *rank <= k;
}

}  // namespace

double hit_rate(std::span<const RetrievalResult> results,
                const std::unordered_map<std::string, std::string>& gold, std::size_t k) {
  if (results.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& r : results) {
    auto it = gold.find(r.qa_id);
    if (it == gold.end()) throw DataError("no gold document for question " + r.qa_id);
    hits += hit(r, it->second, k) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(results.size());
}

double hit_rate(std::span<const RetrievalResult> results, std::size_t k) {
  std::unordered_map<std::string, std::string> gold;
  for (const auto& r : results) {
    if (!r.gold_doc_id) throw DataError("retrieval result " + r.qa_id + " carries no gold_doc_id");
    gold.emplace(r.qa_id, *r.gold_doc_id);
  }
  return hit_rate(results, gold, k);
}

nlohmann::json to_json(const RetrievalResult& r) {
  auto ranked = nlohmann::json::array();
  for (const auto& s : r.ranked) ranked.push_back({{"doc_id", s.doc_id}, {"score", s.score}});
  nlohmann::json j{{"qa_id", r.qa_id}, {"ranked", ranked}, {"no_query_terms", r.no_query_terms}};
  if (r.gold_doc_id) j["gold_doc_id"] = *r.gold_doc_id;
  return j;
}

RetrievalResult retrieval_result_from_json(const nlohmann::json& j) {
  try {
    RetrievalResult r;
    r.qa_id = j.at("qa_id").get<std::string>();
    for (const auto& s : j.at("ranked")) {
      r.ranked.push_back({s.at("doc_id").get<std::string>(), s.at("score").get<double>()});
    }
    r.no_query_terms = j.value("no_query_terms", false);
    if (j.contains("gold_doc_id")) r.gold_doc_id = j.at("gold_doc_id").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed retrieval record: ") + e.what());
  }
}

void write_results(const std::filesystem::path& path, std::span<const RetrievalResult> results) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& r : results) out << to_json(r).dump() << '\n';
}

std::vector<RetrievalResult> read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<RetrievalResult> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(retrieval_result_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cfrag::retrieval
