#include "pivotqg/answers/span.h"

#include "pivotqg/common/error.h"

namespace pivotqg {

std::string_view span_source_name(SpanSource source) {
  switch (source) {
    case SpanSource::NamedEntity: return "named_entity";
    case SpanSource::NounPhrase: return "noun_phrase";
    case SpanSource::Custom: return "custom";
  }
  return "custom";
}

SpanSource parse_span_source(std::string_view name) {
  if (name == "named_entity") return SpanSource::NamedEntity;
  if (name == "noun_phrase") return SpanSource::NounPhrase;
  if (name == "custom") return SpanSource::Custom;
  throw Error(Errc::BadData, "unknown span source '" + std::string(name) + "'");
}

char bio_tag_char(BioTag tag) {
  switch (tag) {
    case BioTag::B: return 'B';
    case BioTag::I: return 'I';
    case BioTag::O: return 'O';
  }
  return 'O';
}

AnswerSpan span_from_tokens(const Paragraph& paragraph, TokenRange tokens,
                            SpanSource source) {
  if (tokens.first > tokens.last || tokens.last >= paragraph.size()) {
    throw Error(Errc::RangeOutOfBounds, "token range outside paragraph");
  }
  const CharRange chars{paragraph.token_offsets[tokens.first].start,
                        paragraph.token_offsets[tokens.last].end};
  return {chars, tokens, paragraph.slice(chars), source};
}

AnswerSpan validate_custom_span(const Paragraph& paragraph, CharRange range) {
  if (range.start > range.end || range.end > paragraph.text.size()) {
    throw Error(Errc::RangeOutOfBounds,
                "span [" + std::to_string(range.start) + "," +
                    std::to_string(range.end) + ") outside paragraph");
  }
  if (range.empty()) throw Error(Errc::EmptySpan, "span is empty");
  std::size_t first = paragraph.size();
  std::size_t last = 0;
  for (std::size_t t = 0; t < paragraph.size(); ++t) {
    if (paragraph.token_offsets[t].overlaps(range)) {
      first = std::min(first, t);
      last = t;
    }
  }
  if (first == paragraph.size()) {
    throw Error(Errc::EmptySpan, "span covers no token");
  }
  return span_from_tokens(paragraph, {first, last}, SpanSource::Custom);
}

BioTaggedInput encode_bio(const Paragraph& paragraph, const AnswerSpan& span) {
  const auto& tr = span.tokens;
  if (tr.first > tr.last || tr.last >= paragraph.size() ||
      paragraph.token_offsets[tr.first].start != span.chars.start ||
      paragraph.token_offsets[tr.last].end != span.chars.end) {
    throw Error(Errc::SpanMisaligned, "answer span does not align with paragraph tokens");
  }
  BioTaggedInput out;
  out.tokens = paragraph.tokens;
  out.tags.assign(paragraph.size(), BioTag::O);
  out.tags[tr.first] = BioTag::B;
  for (std::size_t t = tr.first + 1; t <= tr.last; ++t) out.tags[t] = BioTag::I;
  return out;
}

TokenRange decode_bio(const BioTaggedInput& tagged) {
  const auto& tags = tagged.tags;
  if (tags.size() != tagged.tokens.size()) {
    throw Error(Errc::MalformedTags, "tag count differs from token count");
  }
  std::size_t begin = tags.size();
  for (std::size_t t = 0; t < tags.size(); ++t) {
    if (tags[t] == BioTag::B) {
      if (begin != tags.size()) throw Error(Errc::MalformedTags, "more than one B tag");
      begin = t;
    } else if (tags[t] == BioTag::I &&
               (t == 0 || tags[t - 1] == BioTag::O)) {
      throw Error(Errc::MalformedTags, "I tag not preceded by B or I");
    }
  }
  if (begin == tags.size()) throw Error(Errc::MalformedTags, "no B tag");
  std::size_t last = begin;
  while (last + 1 < tags.size() && tags[last + 1] == BioTag::I) ++last;
  return {begin, last};
}

}  // namespace pivotqg
