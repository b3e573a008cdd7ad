#include "pivotqg/qg/generator.h"

#include "pivotqg/common/error.h"
#include "pivotqg/grouping/facets.h"

namespace pivotqg::qg {

ModelStepper::ModelStepper(const QGModel& model, const BioTaggedInput& source)
    : model_(model), graph_(false), encoded_(model.encode(graph_, source)) {}

std::size_t ModelStepper::root() {
  states_.push_back(model_.initial_state(graph_, encoded_));
  return states_.size() - 1;
}

std::pair<std::size_t, StepResult> ModelStepper::step(std::size_t state, TokenId prev) {
  if (state >= states_.size()) throw Error(Errc::ShapeMismatch, "unknown decoder state");
  StepOutput out = model_.decode_step(graph_, states_[state], prev, encoded_);
  StepResult result{graph_.value(out.distribution).col(0), graph_.value(out.attention).col(0)};
  states_.push_back(std::move(out.next));
  return {states_.size() - 1, std::move(result)};
}

BeamOptions beam_options(const QGConfig& config) {
  return {static_cast<std::size_t>(config.beam_width),
          static_cast<std::size_t>(config.max_decode_len), config.length_normalize};
}

std::vector<std::string> resolve_tokens(const QGModel& model, const EncodedParagraph& encoded,
                                        const Hypothesis& hypothesis) {
  std::vector<std::string> out;
  out.reserve(hypothesis.tokens.size());
  for (std::size_t i = 0; i < hypothesis.tokens.size(); ++i) {
    const TokenId id = hypothesis.tokens[i];
    if (id == Vocabulary::kUnk && hypothesis.attention.cols() > 0) {
      Eigen::Index best = 0;
      hypothesis.attention.row(static_cast<Eigen::Index>(i)).maxCoeff(&best);
      out.push_back(encoded.source.tokens[static_cast<std::size_t>(best)]);
    } else {
      out.push_back(encoded.dictionary.resolve(model.vocab(), id));
    }
  }
  return out;
}

std::vector<GeneratedQuestion> questions_for_span(const QGModel& model,
                                                  const Paragraph& paragraph,
                                                  const AnswerSpan& answer,
                                                  const BeamOptions& options) {
  const BioTaggedInput tagged = encode_bio(paragraph, answer);
  ModelStepper stepper(model, tagged);
  std::vector<GeneratedQuestion> out;
  for (auto& h : beam_search(stepper, options)) {
    GeneratedQuestion q;
    q.tokens = resolve_tokens(model, stepper.encoded(), h);
    q.beam_score = h.score;
    q.intra_confidence = intra_confidence(h.score);
    q.truncated = !h.finished;
    q.attention = std::move(h.attention);
    q.answer = answer;
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<std::pair<AnswerSpan, std::vector<GeneratedQuestion>>> generate_questions(
    const QGModel& model, const Paragraph& paragraph, const std::vector<AnswerSpan>& spans,
    const BeamOptions& options) {
  std::vector<std::pair<AnswerSpan, std::vector<GeneratedQuestion>>> out;
  for (const auto& span : spans) {
    out.emplace_back(span, questions_for_span(model, paragraph, span, options));
  }
  return out;
}

}  // namespace pivotqg::qg
