#pragma once

// Raw report documents, per-company extraction profiles and the synthetic
// corpus generator.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace cfrag::corpus {

enum class CompanyProfile { HpLifecycle, DirectComponent };

std::string_view to_string(CompanyProfile p);
std::optional<CompanyProfile> parse_profile(std::string_view s);
std::span<const CompanyProfile> all_profiles();

struct Document {
  std::string doc_id;
  CompanyProfile company_profile = CompanyProfile::HpLifecycle;
  std::string raw_text;
  int page_count = 1;
  std::size_t char_count = 0;  // code points
  std::size_t word_count = 0;  // whitespace tokens

  bool operator==(const Document&) const = default;
};

// Fills char_count and word_count from raw_text.
Document make_document(std::string doc_id, CompanyProfile profile, std::string raw_text,
                       int page_count);

enum class Schema { LifecycleBreakdown, DirectComponent };

std::string_view to_string(Schema s);
std::optional<Schema> parse_schema(std::string_view s);

// Insertion-ordered name -> percent pairs.
using OrderedPercents = std::vector<std::pair<std::string, double>>;

std::optional<double> find_percent(const OrderedPercents& values, std::string_view name);

struct ExtractionRecord {
  std::string doc_id;
  std::string product_name;
  std::string product_type;
  double total_pcf = 0.0;  // kgCO2e
  std::optional<OrderedPercents> lifecycle_percents;
  OrderedPercents component_percents;  // document-appearance order
  Schema schema = Schema::DirectComponent;

  bool operator==(const ExtractionRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Catalog of component and lifecycle-stage names shared by every profile.

struct ComponentSpec {
  std::string_view id;            // canonical id, also used in questions and programs
  std::string_view hp_label;      // label in lifecycle-style reports
  std::string_view direct_label;  // label in direct-component reports
};

struct StageSpec {
  std::string_view id;
  std::string_view question_name;
  std::string_view label;
};

std::span<const ComponentSpec> component_catalog();
std::span<const StageSpec> stage_catalog();
const ComponentSpec* find_component(std::string_view id);
const StageSpec* find_stage(std::string_view id);

// ---------------------------------------------------------------------------
// Extraction

enum class FieldRole { ProductName, ProductType, TotalPcf, LifecycleStage, Component };

struct FieldPattern {
  std::string field;  // e.g. "total_pcf", "component.ssd"
  FieldRole role;
  std::string key;     // stage or component id, empty otherwise
  std::string source;  // ECMAScript regex with exactly one capture group
  bool required = true;
};

class ExtractorProfile {
 public:
  // Throws ConfigError if a pattern does not compile or does not have
  // exactly one capture group.
  ExtractorProfile(std::string profile_id, CompanyProfile company, Schema schema,
                   std::vector<FieldPattern> patterns);

  static const ExtractorProfile& builtin(CompanyProfile company);

  const std::string& id() const { return id_; }
  CompanyProfile company() const { return company_; }
  Schema schema() const { return schema_; }
  const std::vector<FieldPattern>& patterns() const { return patterns_; }
  const std::regex& regex(std::size_t i) const { return compiled_[i]; }

 private:
  std::string id_;
  CompanyProfile company_;
  Schema schema_;
  std::vector<FieldPattern> patterns_;
  std::vector<std::regex> compiled_;
};

enum class DiscardReason { NoMatch, MultipleMatches, OutOfRange };

std::string_view to_string(DiscardReason r);

struct Discard {
  std::string doc_id;
  std::string field;
  DiscardReason reason;

  bool operator==(const Discard&) const = default;
};

using ExtractionOutcome = std::variant<ExtractionRecord, Discard>;

// Throws std::invalid_argument when the profile does not belong to the
// document's company.
ExtractionOutcome extract_fields(const Document& doc, const ExtractorProfile& profile);

ExtractionOutcome extract_text(std::string_view doc_id, std::string_view text,
                               const ExtractorProfile& profile);

// Tries every builtin profile in order and returns the first clean
// extraction. Used where only the text is known.
std::optional<ExtractionRecord> extract_any_profile(std::string_view doc_id, std::string_view text);

struct ExtractionBatch {
  std::vector<ExtractionRecord> records;
  std::vector<Discard> discards;
};

// Extracts every document with its own builtin profile; order follows docs.
ExtractionBatch extract_corpus(std::span<const Document> docs);

// ---------------------------------------------------------------------------
// Synthetic corpora

struct SynthConfig {
  std::size_t document_count = 200;
  double lifecycle_share = 0.5;        // fraction of lifecycle-style documents
  double shuffle_probability = 0.3;    // per document: permute text blocks
  double spurious_token_rate = 0.05;   // per line: insert a hidden-text line after it
  double paragraph_split_rate = 0.25;  // per table row: start a new paragraph

  // Throws ConfigError.
  void validate() const;
};

struct SyntheticCorpus {
  std::vector<Document> documents;
  std::vector<ExtractionRecord> records;  // ground truth, paired by index
};

SyntheticCorpus synthesize_corpus(const SynthConfig& config, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Storage

// Reads manifest.csv plus one text file per row. Result sorted by doc_id.
// Throws DataError on a missing manifest, duplicate ids or non-UTF-8 files.
std::vector<Document> load_corpus(const std::filesystem::path& dir);
void write_corpus(const std::filesystem::path& dir, std::span<const Document> docs);

// records.csv, components.csv, lifecycle.csv
void write_records(const std::filesystem::path& dir, std::span<const ExtractionRecord> records);
void write_discards(const std::filesystem::path& dir, std::span<const Discard> discards);

class DocumentStore {
 public:
  DocumentStore() = default;
  explicit DocumentStore(std::vector<Document> docs);

  const Document* find(std::string_view doc_id) const;
  const Document& at(std::string_view doc_id) const;  // throws DataError
  const std::vector<Document>& documents() const { return docs_; }
  std::size_t size() const { return docs_.size(); }

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace cfrag::corpus
