#include "cfrag/critic.hpp"

namespace cfrag::critic {

namespace {

// Instruction block of the critic prompt template; kept byte-for-byte so
// exported training data matches the deployed prompt.
constexpr std::string_view kInstruction =
    "You will be provided with a question and several reference texts, each identified by a "
    "unique ID. Your goal is to analyze these references and identify which one contains the "
    "information needed to answer the question. If a reference text suggests that it provides the "
    "necessary information, respond with its corresponding ID. If multiple references apply, "
    "respond with a list of their IDs. If none of the references apply, respond with [-1]. Ensure "
    "the final output is a list.";

}  // namespace

std::string build_critic_prompt(std::string_view question, std::span<const std::string> references) {
  std::string out(kInstruction);
  out += "\n### Question: ";
  out += question;
  for (std::size_t i = 0; i < references.size(); ++i) {
    out += "\n### Reference " + std::to_string(i + 1) + ": ";
    out += references[i];
  }
  out += "\n### Output: ";
  return out;
}

std::string critic_completion(std::optional<std::size_t> gold_position) {
  if (!gold_position) return "[-1]";
  return "[" + std::to_string(*gold_position) + "]";
}

}  // namespace cfrag::critic
