#include <fstream>

#include "cfrag/evalkit.hpp"
#include "cfrag/util/errors.hpp"

namespace cfrag::eval {

nlohmann::json to_json(const Prediction& p) {
  nlohmann::json j{{"qa_id", p.qa_id}, {"answers", dsl::to_json(p.answers)}, {"failure", nullptr}};
  if (p.failure) j["failure"] = std::string(to_string(*p.failure));
  if (!p.detail.empty()) j["detail"] = p.detail;
  return j;
}

Prediction prediction_from_json(const nlohmann::json& j) {
  try {
    Prediction p;
    p.qa_id = j.at("qa_id").get<std::string>();
    p.answers = dsl::answers_from_json(j.at("answers"));
    if (j.contains("failure") && !j["failure"].is_null()) {
      const auto name = j["failure"].get<std::string>();
      auto kind = parse_failure_kind(name);
      if (!kind) throw DataError("unknown failure kind \"" + name + "\"");
      p.failure = kind;
      if (!p.answers.empty()) throw DataError("prediction " + p.qa_id + " has a failure and answers");
    }
    p.detail = j.value("detail", "");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed prediction: ") + e.what());
  }
}

void write_predictions(const std::filesystem::path& path, std::span<const Prediction> preds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& p : preds) out << to_json(p).dump() << '\n';
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<Prediction> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(prediction_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cfrag::eval
