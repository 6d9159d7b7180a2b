#include <algorithm>
#include <cmath>

#include "cfrag/qagen.hpp"
#include "cfrag/util/csv.hpp"
#include "cfrag/util/text.hpp"

namespace cfrag::qagen {

std::string_view to_string(Check c) {
  switch (c) {
    case Check::Pass: return "pass";
    case Check::Fail: return "fail";
    case Check::NotApplicable: return "n/a";
  }
  return "?";
}

std::string_view to_string(Overall o) {
  switch (o) {
    case Overall::Validated: return "validated";
    case Overall::NeedsReview: return "needs-review";
    case Overall::NotApplicable: return "not-applicable";
  }
  return "?";
}

std::size_t ValidationReport::count(Overall o) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [o](const auto& e) { return e.overall == o; }));
}

namespace {

// Component shares come from one-decimal text, so sums carry float noise.
constexpr double kSlack = 1e-9;

}  // namespace

ValidationReport validate_records(std::span<const corpus::ExtractionRecord> records) {
  ValidationReport report;
  report.pcf_applicable = records.size() >= 2;
  if (!records.empty()) {
    double sum = 0.0;
    for (const auto& r : records) sum += r.total_pcf;
    report.mean_pcf = sum / static_cast<double>(records.size());
    double dev = 0.0;
    for (const auto& r : records) dev += std::abs(r.total_pcf - report.mean_pcf);
    report.mae = dev / static_cast<double>(records.size());
    report.pcf_threshold = 2.0 * report.mae;
  }

  for (const auto& r : records) {
    ValidationEntry e;
    e.doc_id = r.doc_id;
    for (const auto& [name, pct] : r.component_percents) e.component_sum += pct;
    e.sum_check = (e.component_sum >= 99.0 - kSlack && e.component_sum <= 101.0 + kSlack) ? Check::Pass
                                                                                          : Check::Fail;
    e.pcf = r.total_pcf;
    e.pcf_deviation = std::abs(r.total_pcf - report.mean_pcf);
    if (report.pcf_applicable) {
      const double limit = report.pcf_threshold + kSlack * std::max(1.0, report.pcf_threshold);
      e.pcf_check = e.pcf_deviation > limit ? Check::Fail : Check::Pass;
    }
    if (e.sum_check == Check::Fail || e.pcf_check == Check::Fail) {
      e.overall = Overall::NeedsReview;
    } else {
      e.overall = report.pcf_applicable ? Overall::Validated : Overall::NotApplicable;
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

void write_validation_csv(const std::filesystem::path& path, const ValidationReport& report) {
  csv::Writer out(path, {"doc_id", "sum", "sum_check", "pcf", "pcf_dev", "pcf_check", "overall"});
  for (const auto& e : report.entries) {
    out.write({e.doc_id, text::format_fixed(e.component_sum, 2), std::string(to_string(e.sum_check)),
               text::format_number(e.pcf), text::format_fixed(e.pcf_deviation, 2),
               std::string(to_string(e.pcf_check)), std::string(to_string(e.overall))});
  }
}

}  // namespace cfrag::qagen
