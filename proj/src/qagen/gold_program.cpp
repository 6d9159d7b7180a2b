#include <algorithm>
#include <set>

#include "cfrag/qagen.hpp"
#include "cfrag/util/text.hpp"

namespace cfrag::qagen {

namespace {

using corpus::ExtractionRecord;
using text::format_number;

// Percent as a fraction literal, shifting the decimal point in the text so
// 57.9 becomes "0.579" rather than the nearest double of 57.9/100.
std::string percent_literal(double percent) {
  std::string s = format_number(percent);
  if (s.find_first_of("eE") != std::string::npos || s.front() == '-') {
    return format_number(percent / 100.0);
  }
  auto dot = s.find('.');
  std::string digits = s.substr(0, dot) + (dot == std::string::npos ? "" : s.substr(dot + 1));
  int point = static_cast<int>(dot == std::string::npos ? s.size() : dot) - 2;
  while (point <= 0) {
    digits.insert(digits.begin(), '0');
    ++point;
  }
  std::string whole = digits.substr(0, point);
  std::string frac = digits.substr(point);
  whole.erase(0, std::min(whole.find_first_not_of('0'), whole.size() - 1));
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  return whole + "." + (frac.empty() ? "0" : frac);
}

double stage_percent(const ExtractionRecord& r, const std::string& stage) {
  if (!r.lifecycle_percents) {
    throw GenerationError("record " + r.doc_id + " has no lifecycle breakdown for " + stage);
  }
  auto v = corpus::find_percent(*r.lifecycle_percents, stage);
  if (!v) throw GenerationError("record " + r.doc_id + " has no stage " + stage);
  return *v;
}

double component_percent(const ExtractionRecord& r, const std::string& component) {
  auto v = corpus::find_percent(r.component_percents, component);
  if (!v) throw GenerationError("record " + r.doc_id + " has no component " + component);
  return *v;
}

bool is_stage(const std::string& name) { return corpus::find_stage(name) != nullptr; }

void reject_duplicates(std::span<const std::string> targets) {
  std::set<std::string> seen;
  for (const auto& t : targets) {
    if (!seen.insert(t).second) throw GenerationError("duplicate target " + t);
  }
}

std::string join_answer(const std::vector<std::string>& parts) {
  std::string out = "answer=[";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ",";
    out += parts[i];
  }
  return out + "]";
}

std::string word_match_program(const ExtractionRecord& r, std::span<const std::string> targets) {
  if (targets.empty()) throw GenerationError("word match question without targets");
  std::vector<std::string> values;
  for (const auto& t : targets) {
    if (t == kTotalTarget) {
      values.push_back(format_number(r.total_pcf));
    } else if (is_stage(t)) {
      values.push_back(format_number(stage_percent(r, t)));
    } else {
      values.push_back(format_number(component_percent(r, t)));
    }
  }
  return join_answer(values);
}

std::string calculation_program(const ExtractionRecord& r, std::span<const std::string> targets) {
  if (targets.empty()) throw GenerationError("calculation question without targets");
  const bool lifecycle = r.schema == corpus::Schema::LifecycleBreakdown;
  std::vector<std::string> lines{"total_carbon=" + format_number(r.total_pcf)};

  const bool needs_manufacturing = std::any_of(targets.begin(), targets.end(), [&](const auto& t) {
    return t == "manufacturing" || (lifecycle && t != kTotalTarget && !is_stage(t));
  });
  if (needs_manufacturing) {
    lines.push_back("manufacturing_percent=" + percent_literal(stage_percent(r, "manufacturing")));
  }

  std::vector<std::string> answer;
  for (const auto& t : targets) {
    if (t == kTotalTarget) {
      answer.push_back("total_carbon");
    } else if (t == "manufacturing") {
      lines.push_back("manufacturing_carbon=total_carbon*manufacturing_percent");
      answer.push_back("manufacturing_carbon");
    } else if (is_stage(t)) {
      lines.push_back(t + "_percent=" + percent_literal(stage_percent(r, t)));
      lines.push_back(t + "_carbon=total_carbon*" + t + "_percent");
      answer.push_back(t + "_carbon");
    } else {
      lines.push_back(t + "_percent=" + percent_literal(component_percent(r, t)));
      lines.push_back(t + "_carbon=total_carbon*" + (lifecycle ? "manufacturing_percent*" : "") + t +
                      "_percent");
      answer.push_back(t + "_carbon");
    }
  }
  lines.push_back(join_answer(answer));

  std::string out;
  for (const auto& l : lines) out += l + "\n";
  out.pop_back();
  return out;
}

std::string components_dict(const ExtractionRecord& r) {
  if (r.component_percents.empty()) throw GenerationError("record " + r.doc_id + " has no components");
  std::string out = "components={";
  for (std::size_t i = 0; i < r.component_percents.size(); ++i) {
    const auto& [name, pct] = r.component_percents[i];
    if (i) out += ",";
    out += "\"" + name + "\":" + format_number(pct);
  }
  return out + "}";
}

}  // namespace

std::string generate_gold_program(const ExtractionRecord& record, const QuestionType& qtype,
                                  std::span<const std::string> targets) {
  reject_duplicates(targets);
  switch (qtype.family) {
    case QuestionFamily::WordMatch:
      return word_match_program(record, targets);
    case QuestionFamily::Calculation:
      return calculation_program(record, targets);
    case QuestionFamily::MaxMin:
      return components_dict(record) + "\nanswer=[" +
             (qtype.direction == Extremum::Max ? "max_by_value" : "min_by_value") + "(components)]";
    case QuestionFamily::TopN:
      if (qtype.n < 1) throw GenerationError("top-n question with n < 1");
      if (record.component_percents.size() < static_cast<std::size_t>(qtype.n)) {
        throw GenerationError("top-" + std::to_string(qtype.n) + " needs that many components");
      }
      return components_dict(record) + "\nanswer=top_n(components," + std::to_string(qtype.n) + ")";
  }
  throw GenerationError("unknown question family");
}

}  // namespace cfrag::qagen
