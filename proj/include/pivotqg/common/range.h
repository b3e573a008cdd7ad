#pragma once

#include <cstddef>
#include <ostream>

namespace pivotqg {

/// Half-open [start, end) range of code points into a paragraph's text.
struct CharRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool empty() const { return end <= start; }
  bool overlaps(const CharRange& other) const {
    return start < other.end && other.start < end;
  }
  friend bool operator==(const CharRange&, const CharRange&) = default;
  friend auto operator<=>(const CharRange&, const CharRange&) = default;
};

/// Inclusive [first, last] range of token indices.
struct TokenRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first + 1; }
  friend bool operator==(const TokenRange&, const TokenRange&) = default;
  friend auto operator<=>(const TokenRange&, const TokenRange&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const CharRange& r) {
  return os << '(' << r.start << ',' << r.end << ')';
}
inline std::ostream& operator<<(std::ostream& os, const TokenRange& r) {
  return os << '(' << r.first << ',' << r.last << ')';
}

}  // namespace pivotqg
