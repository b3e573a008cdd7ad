#pragma once

#include <string>
#include <vector>

#include "pivotqg/common/range.h"

namespace pivotqg {

/// A tokenized paragraph. Text is held as code points; every offset in the
/// system (flags, spans, edits) counts code points, not bytes.
struct Paragraph {
  std::string id;
  std::u32string text;
  std::vector<std::string> tokens;
  std::vector<CharRange> token_offsets;

  std::size_t size() const { return tokens.size(); }
  std::string utf8() const;
  std::string slice(CharRange range) const;
};

}  // namespace pivotqg
