#include <array>

#include "cfrag/corpus.hpp"
#include "cfrag/util/errors.hpp"
#include "cfrag/util/text.hpp"

namespace cfrag::corpus {

namespace {
constexpr std::array kProfiles = {CompanyProfile::HpLifecycle, CompanyProfile::DirectComponent};
}

std::string_view to_string(CompanyProfile p) {
  switch (p) {
    case CompanyProfile::HpLifecycle:
      return "hp_lifecycle";
    case CompanyProfile::DirectComponent:
      return "direct_component";
  }
  return "unknown";
}

std::optional<CompanyProfile> parse_profile(std::string_view s) {
  for (auto p : kProfiles) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

std::span<const CompanyProfile> all_profiles() { return kProfiles; }

std::string_view to_string(Schema s) {
  return s == Schema::LifecycleBreakdown ? "LifecycleBreakdown" : "DirectComponent";
}

std::optional<Schema> parse_schema(std::string_view s) {
  if (s == "LifecycleBreakdown") return Schema::LifecycleBreakdown;
  if (s == "DirectComponent") return Schema::DirectComponent;
  return std::nullopt;
}

std::optional<double> find_percent(const OrderedPercents& values, std::string_view name) {
  for (const auto& [key, value] : values) {
    if (key == name) return value;
  }
  return std::nullopt;
}

Document make_document(std::string doc_id, CompanyProfile profile, std::string raw_text,
                       int page_count) {
  Document doc;
  doc.doc_id = std::move(doc_id);
  doc.company_profile = profile;
  doc.char_count = text::utf8_length(raw_text);
  doc.word_count = text::count_words(raw_text);
  doc.raw_text = std::move(raw_text);
  doc.page_count = page_count;
  return doc;
}

DocumentStore::DocumentStore(std::vector<Document> docs) : docs_(std::move(docs)) {
  by_id_.reserve(docs_.size());
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    if (!by_id_.emplace(docs_[i].doc_id, i).second) {
      throw DataError("duplicate doc_id " + docs_[i].doc_id);
    }
  }
}

const Document* DocumentStore::find(std::string_view doc_id) const {
  auto it = by_id_.find(std::string(doc_id));
  return it == by_id_.end() ? nullptr : &docs_[it->second];
}

const Document& DocumentStore::at(std::string_view doc_id) const {
  if (const auto* doc = find(doc_id)) return *doc;
  throw DataError("unknown doc_id " + std::string(doc_id));
}

}  // namespace cfrag::corpus
