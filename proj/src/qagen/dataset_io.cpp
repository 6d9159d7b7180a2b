#include <fstream>
#include <set>

#include "cfrag/qagen.hpp"
#include "cfrag/util/errors.hpp"

namespace cfrag::qagen {

nlohmann::json to_json(const QAItem& item) {
  return {
      {"qa_id", item.qa_id},
      {"doc_id", item.doc_id},
      {"qtype", label(item.qtype)},
      {"question", item.question},
      {"targets", item.targets},
      {"gold_program", item.gold_program},
      {"gold_answers", dsl::to_json(item.gold_answers)},
      {"split", std::string(to_string(item.split))},
      {"template", item.template_id},
  };
}

QAItem qa_item_from_json(const nlohmann::json& j) {
  try {
    QAItem item;
    item.qa_id = j.at("qa_id").get<std::string>();
    item.doc_id = j.at("doc_id").get<std::string>();
    const auto qtype = j.at("qtype").get<std::string>();
    auto parsed = parse_question_type(qtype);
    if (!parsed) throw DataError("unknown qtype \"" + qtype + "\"");
    item.qtype = *parsed;
    item.question = j.at("question").get<std::string>();
    item.targets = j.at("targets").get<std::vector<std::string>>();
    item.gold_program = j.at("gold_program").get<std::string>();
    item.gold_answers = dsl::answers_from_json(j.at("gold_answers"));
    const auto split = j.at("split").get<std::string>();
    auto s = parse_split(split);
    if (!s) throw DataError("unknown split \"" + split + "\"");
    item.split = *s;
    item.template_id = j.value("template", "");
    return item;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed dataset record: ") + e.what());
  }
}

void write_dataset(const std::filesystem::path& path, std::span<const QAItem> items) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& item : items) out << to_json(item).dump() << '\n';
}

std::vector<QAItem> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read dataset " + path.string());
  std::vector<QAItem> items;
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    items.push_back(qa_item_from_json(j));
    if (!ids.insert(items.back().qa_id).second) {
      throw DataError(path.string() + ": duplicate qa_id " + items.back().qa_id);
    }
  }
  return items;
}

}  // namespace cfrag::qagen
