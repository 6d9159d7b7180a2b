#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_map>

#include "cfrag/qagen.hpp"
#include "cfrag/util/errors.hpp"
#include "cfrag/util/text.hpp"

namespace cfrag::qagen {

void split_dataset(std::vector<QAItem>& items, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must be in (0,1)");

  std::set<std::string> unique_docs;
  for (const auto& item : items) unique_docs.insert(item.doc_id);
  std::vector<std::string> docs(unique_docs.begin(), unique_docs.end());

  std::mt19937_64 rng(text::derive_seed(seed, "split"));
  std::shuffle(docs.begin(), docs.end(), rng);

  // Rounded toward train; the epsilon keeps 0.8 * 10 at 8.
  auto train = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(docs.size()) - 1e-9));
  if (docs.size() >= 2) train = std::clamp<std::size_t>(train, 1, docs.size() - 1);

  std::unordered_map<std::string, Split> assignment;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    assignment[docs[i]] = i < train ? Split::Train : Split::Test;
  }
  for (auto& item : items) item.split = assignment.at(item.doc_id);
}

}  // namespace cfrag::qagen
