#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pivotqg/common/range.h"
#include "pivotqg/text/paragraph.h"

namespace pivotqg {

enum class FlagKind { NonAscii, Url };

std::string_view flag_kind_name(FlagKind kind);

struct ReviewFlag {
  FlagKind kind;
  CharRange range;
  std::string excerpt;  // UTF-8 slice of the reviewed text at `range`
  std::string message;
};

struct TextEdit {
  CharRange range;
  std::string replacement;  // UTF-8
};

// Content review. Returns every URL and every maximal run of non-ASCII code
// points outside a URL, sorted by start offset. Throws EmptyInput when the
// text is empty or whitespace only.
std::vector<ReviewFlag> review_paragraph(std::string_view utf8_text);
std::vector<ReviewFlag> review_paragraph(std::u32string_view text);

// Applies non-overlapping replacements; ranges index the original text.
std::string apply_edits(std::string_view utf8_text, std::vector<TextEdit> edits);

// Whitespace split, with leading and trailing ASCII punctuation peeled off
// into one-character tokens.
Paragraph tokenize(std::string_view utf8_text, std::string id = {});

bool is_space(char32_t cp);

}  // namespace pivotqg
