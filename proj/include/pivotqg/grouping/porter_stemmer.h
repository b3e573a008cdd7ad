#pragma once

#include <string>
#include <string_view>

namespace pivotqg {

/// The original Porter (1980) suffix-stripping stemmer for lowercase English
/// words. Words of one or two letters are returned unchanged.
std::string porter_stem(std::string_view word);

/// Facet key of an answer surface: lowercased, split on whitespace and on
/// leading/trailing punctuation, each word stemmed, joined by single spaces.
std::string stem_key(std::string_view surface);

}  // namespace pivotqg
