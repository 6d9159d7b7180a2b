#include "cfrag/reasoner.hpp"

namespace cfrag::reasoner {

QuestionSpec question_spec(const qagen::QAItem& item) {
  return {item.qa_id, item.qtype, item.question, item.targets};
}

std::string_view to_string(Provenance p) { return p == Provenance::Oracle ? "oracle" : "remote"; }

std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::MissingTarget: return "MissingTarget";
    case FailureReason::UnreadableReference: return "UnreadableReference";
    case FailureReason::NoProgram: return "NoProgram";
    case FailureReason::RemoteError: return "RemoteError";
  }
  return "?";
}

ReasonerOutput oracle_reason(const QuestionSpec& question, std::string_view reference_text) {
  ReasonerOutput out;
  out.qa_id = question.qa_id;
  out.provenance = Provenance::Oracle;
  auto record = corpus::extract_any_profile("reference", reference_text);
  if (!record) {
    out.failure = GenerationFailure{FailureReason::UnreadableReference,
                                    "no extractor profile reads the reference"};
    return out;
  }
  try {
    out.program_source = qagen::generate_gold_program(*record, question.qtype, question.targets);
  } catch (const qagen::GenerationError& e) {
    out.failure = GenerationFailure{FailureReason::MissingTarget, e.what()};
  }
  return out;
}

}  // namespace cfrag::reasoner
