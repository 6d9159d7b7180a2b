#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "cfrag/corpus.hpp"
#include "cfrag/util/csv.hpp"
#include "cfrag/util/errors.hpp"
#include "cfrag/util/text.hpp"

namespace cfrag::corpus {

namespace fs = std::filesystem;

namespace {

const csv::Row kManifestHeader = {"doc_id", "company_profile", "pages", "file"};

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<Document> load_corpus(const fs::path& dir) {
  const auto manifest = dir / "manifest.csv";
  if (!fs::exists(manifest)) throw DataError("missing manifest: " + manifest.string());
  const auto rows = csv::read_file(manifest);
  if (rows.empty() || rows.front() != kManifestHeader) {
    throw DataError(manifest.string() + ": expected header doc_id,company_profile,pages,file");
  }
  std::set<std::string> seen;
  std::vector<Document> docs;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != kManifestHeader.size()) {
      throw DataError(manifest.string() + " row " + std::to_string(r + 1) + ": expected 4 fields");
    }
    const auto& doc_id = row[0];
    if (doc_id.empty()) throw DataError(manifest.string() + " row " + std::to_string(r + 1) + ": empty doc_id");
    if (!seen.insert(doc_id).second) throw DataError("duplicate doc_id in manifest: " + doc_id);
    auto profile = parse_profile(row[1]);
    if (!profile) throw DataError("doc " + doc_id + ": unknown company_profile " + row[1]);
    auto pages = text::parse_int(row[2]);
    if (!pages || *pages < 1) throw DataError("doc " + doc_id + ": pages must be a positive integer");
    const auto path = dir / row[3];
    auto raw = read_all(path);
    if (!text::is_valid_utf8(raw)) throw DataError("file is not valid UTF-8: " + path.string());
    docs.push_back(make_document(doc_id, *profile, std::move(raw), static_cast<int>(*pages)));
  }
  std::sort(docs.begin(), docs.end(),
            [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  return docs;
}

void write_corpus(const fs::path& dir, std::span<const Document> docs) {
  fs::create_directories(dir);
  csv::Writer manifest(dir / "manifest.csv", kManifestHeader);
  for (const auto& doc : docs) {
    const auto file = doc.doc_id + ".txt";
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / file).string());
    out << doc.raw_text;
    manifest.write({doc.doc_id, std::string(to_string(doc.company_profile)),
                    std::to_string(doc.page_count), file});
  }
}

void write_records(const fs::path& dir, std::span<const ExtractionRecord> records) {
  fs::create_directories(dir);
  csv::Writer rec_out(dir / "records.csv",
                      {"doc_id", "product_name", "product_type", "total_pcf", "schema"});
  csv::Writer comp_out(dir / "components.csv", {"doc_id", "component", "percent", "rank"});
  csv::Writer life_out(dir / "lifecycle.csv", {"doc_id", "stage", "percent"});
  for (const auto& r : records) {
    rec_out.write({r.doc_id, r.product_name, r.product_type, text::format_number(r.total_pcf),
                   std::string(to_string(r.schema))});
    for (std::size_t i = 0; i < r.component_percents.size(); ++i) {
      const auto& [name, pct] = r.component_percents[i];
      comp_out.write({r.doc_id, name, text::format_number(pct), std::to_string(i + 1)});
    }
    if (r.lifecycle_percents) {
      for (const auto& [stage, pct] : *r.lifecycle_percents) {
        life_out.write({r.doc_id, stage, text::format_number(pct)});
      }
    }
  }
}

void write_discards(const fs::path& dir, std::span<const Discard> discards) {
  fs::create_directories(dir);
  csv::Writer out(dir / "discards.csv", {"doc_id", "field", "reason"});
  for (const auto& d : discards) out.write({d.doc_id, d.field, std::string(to_string(d.reason))});
}

}  // namespace cfrag::corpus
