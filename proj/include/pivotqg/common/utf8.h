#pragma once

#include <string>
#include <string_view>

namespace pivotqg::utf8 {

// Throws Error(InvalidUtf8) on malformed input.
std::u32string decode(std::string_view bytes);
std::string encode(std::u32string_view text);
std::string encode(char32_t cp);

inline bool is_ascii(char32_t cp) { return cp <= 0x7F; }

}  // namespace pivotqg::utf8
