#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "pivotqg/answers/span.h"
#include "pivotqg/common/range.h"
#include "pivotqg/text/paragraph.h"

namespace pivotqg {

enum class CandidateKind { NamedEntity, NounPhrase };

std::string_view candidate_kind_name(CandidateKind kind);
CandidateKind parse_candidate_kind(std::string_view name);

/// Raw annotator output in character offsets; not yet token aligned.
struct Annotation {
  struct Entity {
    CharRange range;
    std::string label;
  };
  std::vector<Entity> entities;
  std::vector<CharRange> noun_phrases;
};

class Annotator {
 public:
  virtual ~Annotator() = default;
  virtual Annotation annotate(const Paragraph& paragraph) const = 0;
  virtual std::string name() const = 0;
};

/// Offline fallback. Entities come from capitalisation, numerals and a small
/// gazetteer; noun phrases from a determiner/adjective/noun chunker over a
/// lexicon-and-suffix part-of-speech guesser.
class HeuristicAnnotator final : public Annotator {
 public:
  enum class Pos { Det, Adj, Noun, Propn, Num, Verb, Aux, Adv, Pron, Prep, Conj, Punct, Other };

  Annotation annotate(const Paragraph& paragraph) const override;
  std::string name() const override { return "heuristic"; }

  std::vector<Pos> tag(const Paragraph& paragraph) const;
};

/// Client for an external annotation service. POSTs {"text": ...} to
/// `<base_url>/annotate` and expects
/// {tokens:[{text,start,end}], entities:[{start,end,label}], noun_phrases:[{start,end}]}
/// with offsets in code points. Any transport or format failure raises
/// AnnotatorUnavailable.
class HttpAnnotator final : public Annotator {
 public:
  explicit HttpAnnotator(std::string base_url,
                         std::chrono::milliseconds timeout = std::chrono::seconds(10));

  Annotation annotate(const Paragraph& paragraph) const override;
  std::string name() const override { return "http:" + base_url_; }

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

// Token-aligned, exact-duplicate-free, offset-sorted candidates of one kind.
// Nested candidates of different extents are all kept.
std::vector<AnswerSpan> extract_candidates(const Paragraph& paragraph,
                                           CandidateKind kind,
                                           const Annotator& annotator);

}  // namespace pivotqg
