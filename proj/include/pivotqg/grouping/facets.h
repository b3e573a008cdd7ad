#pragma once

#include <string>
#include <vector>

#include "pivotqg/answers/span.h"
#include "pivotqg/qg/question.h"

namespace pivotqg {

// e^x / (1 + e^x), evaluated without overflow. Throws NonFiniteInput.
double intra_confidence(double beam_score);

// Min-max normalisation of each answer's best intra confidence across all
// answers, in input order. All answers get 1.0 when max == min. Throws
// EmptyInput.
std::vector<double> inter_confidence(const std::vector<double>& best_per_answer);

struct AnswerResult {
  std::string answer_id;
  AnswerSpan answer;
  std::vector<GeneratedQuestion> questions;
};

struct FacetMember {
  std::string answer_id;
  AnswerSpan answer;
  double inter_confidence = 0.0;
  std::vector<GeneratedQuestion> questions;  // intra_confidence descending
};

struct QuestionFacet {
  std::string stem;
  double inter_confidence = 0.0;  // best member
  std::vector<FacetMember> members;
};

// Groups answers by stem_key(surface). Answers without questions are left
// out. Facets are ordered by inter confidence, then by first occurrence in
// the paragraph; members the same way within a facet.
std::vector<QuestionFacet> group_by_stem(std::vector<AnswerResult> results);

// Drops questions below intra_threshold and answers below inter_threshold,
// then prunes emptied members and facets. Thresholds must lie in [0, 1].
std::vector<QuestionFacet> apply_knobs(std::vector<QuestionFacet> facets,
                                       double intra_threshold, double inter_threshold);

std::size_t question_count(const std::vector<QuestionFacet>& facets);

}  // namespace pivotqg
