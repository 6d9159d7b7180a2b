#include <cmath>

#include "cfrag/progdsl.hpp"
#include "cfrag/util/errors.hpp"

namespace cfrag::dsl {

nlohmann::json to_json(const AnswerList& answers) {
  auto out = nlohmann::json::array();
  for (const auto& item : answers) {
    if (item.label) {
      out.push_back(nlohmann::json::array({*item.label, item.value}));
    } else {
      out.push_back(item.value);
    }
  }
  return out;
}

namespace {

double finite_number(const nlohmann::json& j) {
  if (!j.is_number()) throw DataError("answer value is not a number: " + j.dump());
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw DataError("answer value is not finite");
  return v;
}

}  // namespace

AnswerList answers_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw DataError("answers must be a JSON array, got " + j.dump());
  AnswerList out;
  out.reserve(j.size());
  for (const auto& item : j) {
    if (item.is_array()) {
      if (item.size() != 2 || !item[0].is_string()) {
        throw DataError("labeled answer must be [name, number], got " + item.dump());
      }
      out.push_back(labeled(item[0].get<std::string>(), finite_number(item[1])));
    } else {
      out.push_back(number(finite_number(item)));
    }
  }
  return out;
}

}  // namespace cfrag::dsl
