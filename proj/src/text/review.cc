#include "pivotqg/text/review.h"

#include <algorithm>
#include <cctype>

#include "pivotqg/common/error.h"
#include "pivotqg/common/utf8.h"

namespace pivotqg {

namespace {

bool is_ascii_punct(char32_t cp) {
  return cp < 0x80 && std::ispunct(static_cast<int>(cp));
}

// Sentence punctuation that never ends a URL.
bool is_url_trailer(char32_t cp) {
  switch (cp) {
    case U'.': case U',': case U';': case U':': case U'!': case U'?':
    case U')': case U']': case U'}': case U'\'': case U'"':
      return true;
    default:
      return false;
  }
}

char32_t lower(char32_t cp) {
  return (cp >= U'A' && cp <= U'Z') ? cp + 32 : cp;
}

bool starts_with_ci(std::u32string_view text, std::size_t at,
                    std::u32string_view prefix) {
  if (text.size() - at < prefix.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (lower(text[at + k]) != prefix[k]) return false;
  }
  return true;
}

std::size_t url_prefix_length(std::u32string_view text, std::size_t at) {
  for (std::u32string_view prefix : {std::u32string_view(U"https://"),
                                     std::u32string_view(U"http://"),
                                     std::u32string_view(U"www.")}) {
    if (starts_with_ci(text, at, prefix)) return prefix.size();
  }
  return 0;
}

std::vector<CharRange> find_urls(std::u32string_view text) {
  std::vector<CharRange> urls;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t prefix = url_prefix_length(text, i);
    if (prefix == 0) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && !is_space(text[end])) ++end;
    std::size_t trimmed = end;
    while (trimmed > i + prefix && is_url_trailer(text[trimmed - 1])) --trimmed;
    if (trimmed > i + prefix) {
      urls.push_back({i, trimmed});
    }
    i = std::max(trimmed, i + 1);
  }
  return urls;
}

std::string make_message(FlagKind kind, const std::string& excerpt) {
  if (kind == FlagKind::Url) {
    return "URL \"" + excerpt + "\" cannot be processed; remove or rewrite it";
  }
  return "non-ASCII text \"" + excerpt + "\" cannot be processed; edit or remove it";
}

}  // namespace

bool is_space(char32_t cp) {
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\f': case U'\v':
    case 0x00A0: case 0x1680: case 0x2028: case 0x2029: case 0x202F:
    case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

std::string_view flag_kind_name(FlagKind kind) {
  return kind == FlagKind::Url ? "url" : "non_ascii";
}

std::vector<ReviewFlag> review_paragraph(std::string_view utf8_text) {
  return review_paragraph(utf8::decode(utf8_text));
}

std::vector<ReviewFlag> review_paragraph(std::u32string_view text) {
  if (std::all_of(text.begin(), text.end(), is_space)) {
    throw Error(Errc::EmptyInput, "paragraph text is empty");
  }
  std::vector<ReviewFlag> flags;
  auto add = [&](FlagKind kind, CharRange range) {
    std::string excerpt = utf8::encode(text.substr(range.start, range.length()));
    std::string message = make_message(kind, excerpt);
    flags.push_back({kind, range, std::move(excerpt), std::move(message)});
  };

  const auto urls = find_urls(text);
  for (const auto& url : urls) add(FlagKind::Url, url);

  // Non-ASCII runs outside URLs; a run straddling a URL boundary splits there.
  std::size_t next_url = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    while (next_url < urls.size() && urls[next_url].end <= i) ++next_url;
    if (next_url < urls.size() && urls[next_url].start <= i) {
      i = urls[next_url].end;
      continue;
    }
    if (utf8::is_ascii(text[i])) {
      ++i;
      continue;
    }
    const std::size_t limit =
        next_url < urls.size() ? urls[next_url].start : text.size();
    std::size_t end = i;
    while (end < limit && !utf8::is_ascii(text[end])) ++end;
    add(FlagKind::NonAscii, {i, end});
    i = end;
  }

  std::sort(flags.begin(), flags.end(),
            [](const ReviewFlag& a, const ReviewFlag& b) {
              return a.range.start < b.range.start;
            });
  return flags;
}

std::string apply_edits(std::string_view utf8_text, std::vector<TextEdit> edits) {
  std::u32string text = utf8::decode(utf8_text);
  std::sort(edits.begin(), edits.end(),
            [](const TextEdit& a, const TextEdit& b) { return a.range < b.range; });
  for (std::size_t k = 0; k < edits.size(); ++k) {
    const auto& r = edits[k].range;
    if (r.start > r.end || r.end > text.size()) {
      throw Error(Errc::RangeOutOfBounds,
                  "edit range [" + std::to_string(r.start) + "," +
                      std::to_string(r.end) + ") outside text of length " +
                      std::to_string(text.size()));
    }
    if (k > 0) {
      const auto& prev = edits[k - 1].range;
      // Two insertions at one point are ambiguous as well.
      if (prev.end > r.start || (prev == r && r.empty())) {
        throw Error(Errc::OverlappingEdits, "edit ranges overlap");
      }
    }
  }
  // Right to left keeps earlier offsets valid.
  for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
    text.replace(it->range.start, it->range.length(),
                 utf8::decode(it->replacement));
  }
  return utf8::encode(text);
}

Paragraph tokenize(std::string_view utf8_text, std::string id) {
  Paragraph p;
  p.id = std::move(id);
  p.text = utf8::decode(utf8_text);
  const auto& text = p.text;
  auto emit = [&](std::size_t start, std::size_t end) {
    p.tokens.push_back(utf8::encode(std::u32string_view(text).substr(start, end - start)));
    p.token_offsets.push_back({start, end});
  };

  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && !is_space(text[end])) ++end;
    std::size_t lo = i;
    std::size_t hi = end;
    while (lo < hi && is_ascii_punct(text[lo])) {
      emit(lo, lo + 1);
      ++lo;
    }
    std::size_t core_end = hi;
    while (core_end > lo && is_ascii_punct(text[core_end - 1])) --core_end;
    if (core_end > lo) emit(lo, core_end);
    for (std::size_t k = core_end; k < hi; ++k) emit(k, k + 1);
    i = end;
  }
  if (p.tokens.empty()) throw Error(Errc::EmptyInput, "paragraph text is empty");
  return p;
}

std::string Paragraph::utf8() const { return utf8::encode(text); }

std::string Paragraph::slice(CharRange range) const {
  if (range.end > text.size() || range.start > range.end) {
    throw Error(Errc::RangeOutOfBounds, "slice outside paragraph");
  }
  return utf8::encode(std::u32string_view(text).substr(range.start, range.length()));
}

}  // namespace pivotqg
