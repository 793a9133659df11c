#include "impeval/text_norm.hpp"

#include "impeval/utf8.hpp"

namespace impeval {

bool is_space(char32_t cp) {
    switch (cp) {
    case 0x09:
    case 0x0A:
    case 0x0B:
    case 0x0C:
    case 0x0D:
    case 0x20:
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
        return true;
    default:
        return cp >= 0x2000 && cp <= 0x200A;
    }
}

char32_t fold_width(char32_t cp) {
    if (cp >= 0xFF01 && cp <= 0xFF5E) {
        return cp - 0xFEE0;
    }
    if (cp == 0x3000) {
        return 0x20;
    }
    return cp;
}

char32_t fold_case(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') {
        return cp + 0x20;
    }
    // Latin-1 uppercase block, skipping the multiplication sign.
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
        return cp + 0x20;
    }
    return cp;
}

namespace {

template <typename Emit>
void normalize_stream(std::u32string_view in, Emit&& emit) {
    bool in_space_run = false;
    for (std::size_t i = 0; i < in.size(); ++i) {
        char32_t cp = fold_width(in[i]);
        if (is_space(cp)) {
            if (!in_space_run) {
                emit(U' ', i);
                in_space_run = true;
            }
            continue;
        }
        in_space_run = false;
        emit(fold_case(cp), i);
    }
}

} // namespace

std::u32string normalize_codepoints(std::u32string_view text) {
    std::u32string out;
    out.reserve(text.size());
    normalize_stream(text, [&](char32_t cp, std::size_t) { out.push_back(cp); });
    return out;
}

std::string normalize_text(std::string_view text) {
    return utf8::encode(normalize_codepoints(utf8::decode(text)));
}

NormalizedText normalize_with_origin(std::string_view text) {
    const std::u32string decoded = utf8::decode(text);
    NormalizedText out;
    out.text.reserve(decoded.size());
    out.origin.reserve(decoded.size());
    normalize_stream(decoded, [&](char32_t cp, std::size_t i) {
        out.text.push_back(cp);
        out.origin.push_back(i);
    });
    return out;
}

} // namespace impeval
