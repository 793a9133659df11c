#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace impeval {

// Canonical text form used for dictionary matching and tokenization.
// Applied in order:
//   1. compatibility width folding: full-width forms U+FF01..U+FF5E and the
//      ideographic space U+3000 fold to their ASCII counterparts
//   2. Latin letters lowercased (ASCII plus the Latin-1 uppercase range)
//   3. every run of whitespace collapses to a single U+0020
// The function is total and idempotent.
std::string normalize_text(std::string_view text);

// Normalized code points plus, for each normalized position, the code-point
// index in the original text it came from (a collapsed whitespace run maps to
// the index of its first character). Entity spans are reported against the
// original text through this map.
struct NormalizedText {
    std::u32string text;
    std::vector<std::size_t> origin;
};

NormalizedText normalize_with_origin(std::string_view text);

// The same transform over already-decoded code points.
std::u32string normalize_codepoints(std::u32string_view text);

bool is_space(char32_t cp);
char32_t fold_width(char32_t cp);
char32_t fold_case(char32_t cp);

} // namespace impeval
