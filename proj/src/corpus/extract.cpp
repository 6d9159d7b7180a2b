#include <algorithm>
#include <stdexcept>

#include "cfrag/corpus.hpp"
#include "cfrag/util/text.hpp"

namespace cfrag::corpus {

std::string_view to_string(DiscardReason r) {
  switch (r) {
    case DiscardReason::NoMatch:
      return "NoMatch";
    case DiscardReason::MultipleMatches:
      return "MultipleMatches";
    case DiscardReason::OutOfRange:
      return "OutOfRange";
  }
  return "unknown";
}

namespace {

struct Capture {
  std::string value;
  std::ptrdiff_t position;
};

// 0 matches -> empty, 1 -> the capture, >1 -> flagged via `multiple`.
std::optional<Capture> unique_capture(std::string_view text, const std::regex& re, bool& multiple) {
  multiple = false;
  std::cregex_iterator it(text.data(), text.data() + text.size(), re);
  const std::cregex_iterator end;
  if (it == end) return std::nullopt;
  Capture cap{(*it)[1].str(), it->position(0)};
  if (++it != end) {
    multiple = true;
    return std::nullopt;
  }
  return cap;
}

struct Positioned {
  std::ptrdiff_t position;
  std::string key;
  double value;
};

OrderedPercents by_position(std::vector<Positioned> items) {
  std::stable_sort(items.begin(), items.end(),
                   [](const Positioned& a, const Positioned& b) { return a.position < b.position; });
  OrderedPercents out;
  out.reserve(items.size());
  for (auto& it : items) out.emplace_back(std::move(it.key), it.value);
  return out;
}

}  // namespace

ExtractionOutcome extract_text(std::string_view doc_id, std::string_view text,
                               const ExtractorProfile& profile) {
  ExtractionRecord rec;
  rec.doc_id = std::string(doc_id);
  rec.schema = profile.schema();
  std::vector<Positioned> stages;
  std::vector<Positioned> components;

  const auto& patterns = profile.patterns();
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const auto& fp = patterns[i];
    bool multiple = false;
    auto cap = unique_capture(text, profile.regex(i), multiple);
    if (multiple) return Discard{rec.doc_id, fp.field, DiscardReason::MultipleMatches};
    if (!cap) {
      if (fp.required) return Discard{rec.doc_id, fp.field, DiscardReason::NoMatch};
      continue;
    }
    switch (fp.role) {
      case FieldRole::ProductName:
        rec.product_name = std::string(text::trim(cap->value));
        break;
      case FieldRole::ProductType:
        rec.product_type = std::string(text::trim(cap->value));
        break;
      case FieldRole::TotalPcf:
      case FieldRole::LifecycleStage:
      case FieldRole::Component: {
        auto value = text::parse_double(cap->value);
        if (!value) return Discard{rec.doc_id, fp.field, DiscardReason::NoMatch};
        if (fp.role == FieldRole::TotalPcf) {
          rec.total_pcf = *value;
        } else {
          if (*value < 0.0 || *value > 100.0) {
            return Discard{rec.doc_id, fp.field, DiscardReason::OutOfRange};
          }
          auto& bucket = fp.role == FieldRole::Component ? components : stages;
          bucket.push_back({cap->position, fp.key, *value});
        }
        break;
      }
    }
  }
  if (components.empty()) return Discard{rec.doc_id, "components", DiscardReason::NoMatch};
  rec.component_percents = by_position(std::move(components));
  if (profile.schema() == Schema::LifecycleBreakdown) {
    rec.lifecycle_percents = by_position(std::move(stages));
  }
  return rec;
}

ExtractionOutcome extract_fields(const Document& doc, const ExtractorProfile& profile) {
  if (doc.company_profile != profile.company()) {
    throw std::invalid_argument("profile " + profile.id() + " does not match document " + doc.doc_id);
  }
  return extract_text(doc.doc_id, doc.raw_text, profile);
}

std::optional<ExtractionRecord> extract_any_profile(std::string_view doc_id, std::string_view text) {
  for (auto company : all_profiles()) {
    auto outcome = extract_text(doc_id, text, ExtractorProfile::builtin(company));
    if (auto* rec = std::get_if<ExtractionRecord>(&outcome)) return std::move(*rec);
  }
  return std::nullopt;
}

ExtractionBatch extract_corpus(std::span<const Document> docs) {
  std::vector<ExtractionOutcome> outcomes(docs.size());
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& doc = docs[static_cast<std::size_t>(i)];
    outcomes[static_cast<std::size_t>(i)] =
        extract_fields(doc, ExtractorProfile::builtin(doc.company_profile));
  }
  ExtractionBatch batch;
  for (auto& o : outcomes) {
    if (auto* rec = std::get_if<ExtractionRecord>(&o)) {
      batch.records.push_back(std::move(*rec));
    } else {
      batch.discards.push_back(std::get<Discard>(std::move(o)));
    }
  }
  return batch;
}

}  // namespace cfrag::corpus
