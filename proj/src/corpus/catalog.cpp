#include <array>
#include <stdexcept>

#include "cfrag/corpus.hpp"
#include "cfrag/util/errors.hpp"

namespace cfrag::corpus {

namespace {

constexpr std::array<ComponentSpec, 10> kComponents = {{
    {"ssd", "Solid State Drive (SSD)", "Storage (SSD):"},
    {"batteries", "Batteries", "Batteries:"},
    {"chassis", "Chassis", "Chassis and enclosure:"},
    {"mainboard", "Mainboard and other boards", "Mainboard (PCBA):"},
    {"display", "Display", "Display panel:"},
    {"hdd", "Hard Disk Drive (HDD)", "Storage (HDD):"},
    {"psu", "Power Supply Unit (PSU)", "Power supply (PSU):"},
    {"packaging", "Packaging", "Packaging:"},
    {"memory", "Memory", "Memory (DRAM):"},
    {"cables", "Cables and connectors", "Cables:"},
}};

constexpr std::array<StageSpec, 4> kStages = {{
    {"manufacturing", "manufacturing", "Manufacturing"},
    {"transport", "transportation", "Transportation"},
    {"use", "use", "Use"},
    {"end_of_life", "end of life", "End of life"},
}};

constexpr std::string_view kNumber = R"((\d+(?:\.\d+)?))";

std::string regex_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '(': case ')': case '[': case ']': case '{': case '}': case '.': case '*':
      case '+': case '?': case '^': case '$': case '|': case '\\': case '/':
        out += '\\';
        [[fallthrough]];
      default:
        out += c;
    }
  }
  return out;
}

std::string percent_pattern(std::string_view label) {
  return "\\b" + regex_escape(label) + "\\s*" + std::string(kNumber) + "\\s*%";
}

ExtractorProfile make_hp_profile() {
  std::vector<FieldPattern> p;
  p.push_back({"product_name", FieldRole::ProductName, "", R"(Product name:[ \t]*([^\r\n]+))", true});
  p.push_back({"product_type", FieldRole::ProductType, "", R"(Product type:[ \t]*([^\r\n]+))", true});
  p.push_back({"total_pcf", FieldRole::TotalPcf, "",
               "\\bEstimated impact\\s*" + std::string(kNumber) + "\\s*kgCO2e", true});
  for (const auto& stage : kStages) {
    p.push_back({"lifecycle." + std::string(stage.id), FieldRole::LifecycleStage,
                 std::string(stage.id), percent_pattern(stage.label), true});
  }
  for (const auto& comp : kComponents) {
    p.push_back({"component." + std::string(comp.id), FieldRole::Component, std::string(comp.id),
                 percent_pattern(comp.hp_label), false});
  }
  return ExtractorProfile("hp_lifecycle", CompanyProfile::HpLifecycle, Schema::LifecycleBreakdown,
                          std::move(p));
}

ExtractorProfile make_direct_profile() {
  std::vector<FieldPattern> p;
  p.push_back({"product_name", FieldRole::ProductName, "", R"(Model:[ \t]*([^\r\n]+))", true});
  p.push_back({"product_type", FieldRole::ProductType, "", R"(Category:[ \t]*([^\r\n]+))", true});
  p.push_back({"total_pcf", FieldRole::TotalPcf, "",
               "\\bTotal carbon footprint:\\s*" + std::string(kNumber) + "\\s*kg CO2e", true});
  for (const auto& comp : kComponents) {
    p.push_back({"component." + std::string(comp.id), FieldRole::Component, std::string(comp.id),
                 percent_pattern(comp.direct_label), false});
  }
  return ExtractorProfile("direct_component", CompanyProfile::DirectComponent,
                          Schema::DirectComponent, std::move(p));
}

}  // namespace

std::span<const ComponentSpec> component_catalog() { return kComponents; }
std::span<const StageSpec> stage_catalog() { return kStages; }

const ComponentSpec* find_component(std::string_view id) {
  for (const auto& c : kComponents) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const StageSpec* find_stage(std::string_view id) {
  for (const auto& s : kStages) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

ExtractorProfile::ExtractorProfile(std::string profile_id, CompanyProfile company, Schema schema,
                                   std::vector<FieldPattern> patterns)
    : id_(std::move(profile_id)), company_(company), schema_(schema), patterns_(std::move(patterns)) {
  compiled_.reserve(patterns_.size());
  for (const auto& fp : patterns_) {
    try {
      compiled_.emplace_back(fp.source, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw ConfigError("profile " + id_ + ": pattern for " + fp.field + " does not compile: " +
                        e.what());
    }
    if (compiled_.back().mark_count() != 1) {
      throw ConfigError("profile " + id_ + ": pattern for " + fp.field +
                        " must have exactly one capture group");
    }
  }
}

const ExtractorProfile& ExtractorProfile::builtin(CompanyProfile company) {
  static const ExtractorProfile hp = make_hp_profile();
  static const ExtractorProfile direct = make_direct_profile();
  return company == CompanyProfile::HpLifecycle ? hp : direct;
}

}  // namespace cfrag::corpus
