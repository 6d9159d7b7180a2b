#include <algorithm>
#include <cctype>

#include "cfrag/reasoner.hpp"

namespace cfrag::reasoner {

namespace {

// Instruction block of the reasoner prompt template, unchanged.
constexpr std::string_view kInstruction =
    "You'll be provided with some questions and a reference. Based on the reference, generate the "
    "Python program to compute and answer the questions. The program is enclosed by triple "
    "backticks. The final answer in the program is of list type.";

// Narrows "Python" to what the interpreter accepts.
constexpr std::string_view kGrammar =
    "Use only this subset of Python:\n"
    "- one assignment per line: name=expression\n"
    "- numbers, variable names, + - * / and parentheses\n"
    "- dictionaries {\"name\": number, ...} and lists [a, b, ...]\n"
    "- max_by_value(d) and min_by_value(d) return one [name, value] pair\n"
    "- top_n(d, n) returns the n largest [name, value] pairs, largest first\n"
    "- percentages used in arithmetic are written as fractions, 24% is 0.24\n"
    "- no imports, comments, loops, conditionals or other function calls\n"
    "- the last line assigns the list of answers to answer\n"
    "- list the answers in the order the question asks for them";

constexpr std::string_view kFence = "```";

}  // namespace

std::string build_reasoner_prompt(std::string_view question, std::string_view reference) {
  std::string out(kInstruction);
  out += "\n";
  out += kGrammar;
  out += "\n### Question: ";
  out += question;
  out += "\n### Reference: ";
  out += reference;
  out += "\n### Program:\n";
  return out;
}

std::string fence(std::string_view program) {
  return std::string(kFence) + "\n" + std::string(program) + "\n" + std::string(kFence);
}

std::variant<std::string, GenerationFailure> parse_reasoner_response(std::string_view raw) {
  const auto open = raw.find(kFence);
  if (open == std::string_view::npos) {
    return GenerationFailure{FailureReason::NoProgram, "no fenced code block"};
  }
  std::size_t start = open + kFence.size();
  const auto eol = raw.find('\n', start);
  const auto tag = raw.substr(start, eol == std::string_view::npos ? std::string_view::npos : eol - start);
  const bool is_tag = std::all_of(tag.begin(), tag.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '+' || c == '-' || c == '\r' ||
           c == ' ';
  });
  if (is_tag && eol != std::string_view::npos) start = eol + 1;

  const auto close = raw.find(kFence, start);
  if (close == std::string_view::npos) {
    return GenerationFailure{FailureReason::NoProgram, "unterminated fenced code block"};
  }
  auto body = raw.substr(start, close - start);
  while (!body.empty() && (body.back() == '\n' || body.back() == '\r' || body.back() == ' ')) {
    body.remove_suffix(1);
  }
  while (!body.empty() && (body.front() == '\n' || body.front() == '\r')) body.remove_prefix(1);
  if (body.empty()) return GenerationFailure{FailureReason::NoProgram, "empty fenced code block"};
  return std::string(body);
}

}  // namespace cfrag::reasoner
