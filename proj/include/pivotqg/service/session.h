#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pivotqg/answers/span.h"
#include "pivotqg/filter/filter.h"
#include "pivotqg/grouping/facets.h"
#include "pivotqg/text/paragraph.h"
#include "pivotqg/text/review.h"

namespace pivotqg::service {

struct Version {
  std::string text;
  std::string timestamp;  // ISO 8601, UTC
  std::string note;
};

// Append-only; entry 0 is the machine-generated original.
using EditHistory = std::vector<Version>;

struct Knobs {
  double intra = 0.0;
  double inter = 0.0;
};

struct FilteredQuestion {
  GeneratedQuestion question;
  std::string answer_id;
  filter::FilterVerdict verdict;
};

struct SelectedAnswer {
  std::string id;
  AnswerSpan span;
};

struct Session {
  std::string id;
  Paragraph paragraph;  // text is authoritative; tokens are rebuilt on load
  std::vector<ReviewFlag> flags;
  std::map<std::string, std::vector<AnswerSpan>> candidates;  // by kind name
  std::vector<SelectedAnswer> selected;
  std::vector<QuestionFacet> results;  // every answerable question, before knobs
  std::vector<FilteredQuestion> filtered_out;
  bool filter_applied = false;
  Knobs knobs;
  std::map<std::string, EditHistory> question_history;
  std::map<std::string, EditHistory> answer_history;
  std::string created_at;
  std::string updated_at;
  std::string generated_at;  // empty until the first generation
  std::uint64_t next_question = 1;
  std::uint64_t next_answer = 1;

  // Drops everything derived from the text.
  void invalidate_results();
};

std::string now_iso8601();

void to_json(nlohmann::json& j, const Session& s);
void from_json(const nlohmann::json& j, Session& s);

nlohmann::json span_json(const AnswerSpan& span);
nlohmann::json flag_json(const ReviewFlag& flag);
nlohmann::json verdict_json(const filter::FilterVerdict& v);

}  // namespace pivotqg::service
