#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace impeval::utf8 {

// Decodes UTF-8 into code points. Invalid byte sequences become U+FFFD, one
// replacement per rejected byte, so decoding is total.
std::u32string decode(std::string_view text);

std::string encode(std::u32string_view text);

void append(std::string& out, char32_t cp);

// Number of code points (counting replacements for invalid bytes).
std::size_t length(std::string_view text);

} // namespace impeval::utf8
