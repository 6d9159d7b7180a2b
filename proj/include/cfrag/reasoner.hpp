#pragma once

// Answer-program generation from a question and one reference text.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cfrag/qagen.hpp"

namespace cfrag::reasoner {

// What a reasoner may see of a dataset item: no gold fields.
struct QuestionSpec {
  std::string qa_id;
  qagen::QuestionType qtype;
  std::string question;
  std::vector<std::string> targets;
};

QuestionSpec question_spec(const qagen::QAItem& item);

enum class Provenance { Oracle, Remote };
enum class FailureReason { MissingTarget, UnreadableReference, NoProgram, RemoteError };

std::string_view to_string(Provenance p);
std::string_view to_string(FailureReason r);

struct GenerationFailure {
  FailureReason reason;
  std::string detail;
};

struct ReasonerOutput {
  std::string qa_id;
  std::string program_source;  // empty when failure is set
  Provenance provenance = Provenance::Oracle;
  std::optional<std::string> raw_completion;
  std::optional<GenerationFailure> failure;

  bool ok() const { return !failure.has_value(); }
};

// Extracts whatever the reference holds and writes the gold-style program
// for it. A reference from the wrong document yields a wrong answer or a
// MissingTarget failure; the gold document is never consulted.
ReasonerOutput oracle_reason(const QuestionSpec& question, std::string_view reference_text);

std::string build_reasoner_prompt(std::string_view question, std::string_view reference);

// "```\n" + program + "\n```"
std::string fence(std::string_view program);

// Contents of the first fenced block, with any language tag on the opening
// fence line removed.
std::variant<std::string, GenerationFailure> parse_reasoner_response(std::string_view raw);

}  // namespace cfrag::reasoner
