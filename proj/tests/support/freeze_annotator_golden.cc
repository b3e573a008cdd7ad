// Runs the built-in annotator over a few sentences and prints the candidate
// spans as JSON; the output is stored as tests/data/annotator_golden.json.
#include <iostream>

#include <json.hpp>

#include "pivotqg/answers/annotator.h"
#include "pivotqg/text/review.h"

int main() {
  using namespace pivotqg;
  const char* sentences[] = {
      "Gandhi was born in India in 1869.",
      "it rains",
      "Mohandas Karamchand Gandhi was born on 2 October 1869 in Porbandar.",
      "The salt march began in 1930 and the campaign spread across the country.",
      "In 1909, Gandhi wrote a short book about self-rule.",
  };
  HeuristicAnnotator annotator;
  nlohmann::json out = nlohmann::json::array();
  for (const char* s : sentences) {
    const Paragraph p = tokenize(s);
    nlohmann::json entry = {{"text", s}};
    for (auto kind : {CandidateKind::NamedEntity, CandidateKind::NounPhrase}) {
      nlohmann::json spans = nlohmann::json::array();
      for (const auto& span : extract_candidates(p, kind, annotator)) {
        spans.push_back({{"surface", span.surface},
                         {"start", span.chars.start},
                         {"end", span.chars.end}});
      }
      entry[std::string(candidate_kind_name(kind))] = spans;
    }
    out.push_back(entry);
  }
  std::cout << out.dump(2) << "\n";
}
