#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pivotqg/common/range.h"
#include "pivotqg/text/paragraph.h"

namespace pivotqg {

enum class SpanSource { NamedEntity, NounPhrase, Custom };

std::string_view span_source_name(SpanSource source);
SpanSource parse_span_source(std::string_view name);

/// A pivotal answer, aligned to token boundaries of its paragraph.
struct AnswerSpan {
  CharRange chars;
  TokenRange tokens;
  std::string surface;
  SpanSource source = SpanSource::Custom;

  friend bool operator==(const AnswerSpan&, const AnswerSpan&) = default;
};

enum class BioTag { B, I, O };

char bio_tag_char(BioTag tag);

struct BioTaggedInput {
  std::vector<std::string> tokens;
  std::vector<BioTag> tags;
};

AnswerSpan span_from_tokens(const Paragraph& paragraph, TokenRange tokens,
                            SpanSource source);

// Snaps `range` outward to the tokens it touches. Throws RangeOutOfBounds or
// EmptySpan.
AnswerSpan validate_custom_span(const Paragraph& paragraph, CharRange range);

// Throws SpanMisaligned if the span does not match the paragraph's tokens.
BioTaggedInput encode_bio(const Paragraph& paragraph, const AnswerSpan& span);

// Inverse of encode_bio. Throws MalformedTags unless tags form one B I* block.
TokenRange decode_bio(const BioTaggedInput& tagged);

}  // namespace pivotqg
