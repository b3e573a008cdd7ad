#pragma once

#include <utility>
#include <vector>

#include "pivotqg/answers/span.h"
#include "pivotqg/qg/beam_search.h"
#include "pivotqg/qg/model.h"
#include "pivotqg/qg/question.h"
#include "pivotqg/text/paragraph.h"

namespace pivotqg::qg {

/// Beam-search view of a QGModel on one encoded source. Owns the graph.
class ModelStepper : public StepModel {
 public:
  ModelStepper(const QGModel& model, const BioTaggedInput& source);

  std::size_t root() override;
  std::pair<std::size_t, StepResult> step(std::size_t state, TokenId prev) override;

  const EncodedParagraph& encoded() const { return encoded_; }

 private:
  const QGModel& model_;
  nn::Graph graph_;
  EncodedParagraph encoded_;
  std::vector<DecoderState> states_;
};

BeamOptions beam_options(const QGConfig& config);

// Maps emitted ids to strings: dynamic ids become their source surface and
// <unk> becomes the source token with the highest attention in that row.
std::vector<std::string> resolve_tokens(const QGModel& model, const EncodedParagraph& encoded,
                                        const Hypothesis& hypothesis);

std::vector<GeneratedQuestion> questions_for_span(const QGModel& model,
                                                  const Paragraph& paragraph,
                                                  const AnswerSpan& answer,
                                                  const BeamOptions& options);

// Spans are decoded independently, in input order.
std::vector<std::pair<AnswerSpan, std::vector<GeneratedQuestion>>> generate_questions(
    const QGModel& model, const Paragraph& paragraph, const std::vector<AnswerSpan>& spans,
    const BeamOptions& options);

}  // namespace pivotqg::qg
