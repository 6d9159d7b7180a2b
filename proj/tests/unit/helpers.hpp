#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "cfrag/corpus.hpp"

namespace testing {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("cfrag-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Lifecycle-style report text. Components are (label, percent) pairs.
inline std::string hp_text(const std::string& name, const std::string& type, const std::string& total,
                           const std::vector<std::pair<std::string, std::string>>& components,
                           const std::string& mfg = "73", const std::string& use = "22") {
  std::string t = "Product name: " + name + "\nProduct type: " + type + "\n\n";
  t += "Product Carbon Footprint (PCF)\nEstimated impact " + total + " kgCO2e\n\n";
  t += "Lifecycle breakdown\nManufacturing " + mfg + "%\nTransportation 4%\nUse " + use + "%\nEnd of life 1%\n\n";
  t += "Manufacturing breakdown by component\n";
  for (const auto& [label, pct] : components) t += label + " " + pct + "%\n";
  return t;
}

inline std::string direct_text(const std::string& name, const std::string& type, const std::string& total,
                               const std::vector<std::pair<std::string, std::string>>& components) {
  std::string t = "Model: " + name + "\nCategory: " + type + "\n\nTotal carbon footprint: " + total +
                  " kg CO2e\n\nCarbon footprint by component (share of total)\n";
  for (const auto& [label, pct] : components) t += label + " " + pct + " %\n";
  return t;
}

inline cfrag::corpus::ExtractionRecord lifecycle_record(std::string doc_id, double total,
                                                        cfrag::corpus::OrderedPercents stages,
                                                        cfrag::corpus::OrderedPercents components) {
  cfrag::corpus::ExtractionRecord r;
  r.doc_id = std::move(doc_id);
  r.product_name = "Test Book 840";
  r.product_type = "laptop";
  r.total_pcf = total;
  r.lifecycle_percents = std::move(stages);
  r.component_percents = std::move(components);
  r.schema = cfrag::corpus::Schema::LifecycleBreakdown;
  return r;
}

}  // namespace testing
