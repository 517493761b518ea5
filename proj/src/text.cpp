#include "corpusforge/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <stdexcept>

namespace corpusforge {

namespace {

// Decodes one codepoint at offset i. Returns false for malformed input, in
// which case len is 1 (resynchronize on the next byte).
bool decode_one(std::string_view text, size_t i, char32_t& cp, uint32_t& len) {
    const size_t n = text.size();
    auto byte = [&](size_t k) { return static_cast<unsigned char>(text[k]); };
    auto is_cont = [&](size_t k) { return k < n && (byte(k) & 0xc0) == 0x80; };
    const unsigned char b0 = byte(i);
    cp = 0xfffd;
    len = 1;
    if (b0 < 0x80) {
        cp = b0;
        return true;
    }
    if ((b0 & 0xe0) == 0xc0 && is_cont(i + 1)) {
        const char32_t v = ((b0 & 0x1fu) << 6) | (byte(i + 1) & 0x3fu);
        if (v < 0x80) return false;  // overlong
        cp = v;
        len = 2;
        return true;
    }
    if ((b0 & 0xf0) == 0xe0 && is_cont(i + 1) && is_cont(i + 2)) {
        const char32_t v =
            ((b0 & 0x0fu) << 12) | ((byte(i + 1) & 0x3fu) << 6) | (byte(i + 2) & 0x3fu);
        if (v < 0x800 || (v >= 0xd800 && v <= 0xdfff)) return false;
        cp = v;
        len = 3;
        return true;
    }
    if ((b0 & 0xf8) == 0xf0 && is_cont(i + 1) && is_cont(i + 2) && is_cont(i + 3)) {
        const char32_t v = ((b0 & 0x07u) << 18) | ((byte(i + 1) & 0x3fu) << 12) |
                           ((byte(i + 2) & 0x3fu) << 6) | (byte(i + 3) & 0x3fu);
        if (v < 0x10000 || v > 0x10ffff) return false;
        cp = v;
        len = 4;
        return true;
    }
    return false;
}

}  // namespace

std::vector<Codepoint> decode_utf8(std::string_view text) {
    std::vector<Codepoint> out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        char32_t cp;
        uint32_t len;
        decode_one(text, i, cp, len);
        out.push_back({cp, static_cast<uint32_t>(i), len});
        i += len;
    }
    return out;
}

bool is_valid_utf8(std::string_view text) {
    size_t i = 0;
    while (i < text.size()) {
        char32_t cp;
        uint32_t len;
        if (!decode_one(text, i, cp, len)) return false;
        i += len;
    }
    return true;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) cp = 0xfffd;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

CharClass classify(char32_t cp) {
    if (u_isUWhiteSpace(static_cast<UChar32>(cp))) return CharClass::Whitespace;
    const int8_t t = u_charType(static_cast<UChar32>(cp));
    if (t == U_DECIMAL_DIGIT_NUMBER) return CharClass::Digit;
    switch (t) {
        case U_DASH_PUNCTUATION:
        case U_START_PUNCTUATION:
        case U_END_PUNCTUATION:
        case U_CONNECTOR_PUNCTUATION:
        case U_OTHER_PUNCTUATION:
        case U_INITIAL_PUNCTUATION:
        case U_FINAL_PUNCTUATION:
        case U_MATH_SYMBOL:
        case U_CURRENCY_SYMBOL:
        case U_MODIFIER_SYMBOL:
        case U_OTHER_SYMBOL:
            return CharClass::PunctSymbol;
        default:
            return CharClass::Letter;
    }
}

size_t codepoint_count(std::string_view text) {
    return decode_utf8(text).size();
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    bool seen_any = false;
    for (const auto& c : decode_utf8(text)) {
        if (classify(c.value) == CharClass::Whitespace) {
            pending_space = seen_any;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.append(text.substr(c.byte_offset, c.byte_len));
        seen_any = true;
    }
    return out;
}

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::string cur;
    for (const auto& c : decode_utf8(text)) {
        if (classify(c.value) == CharClass::Whitespace) {
            if (!cur.empty()) {
                words.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur.append(text.substr(c.byte_offset, c.byte_len));
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

std::string normalize_for_dedup(std::string_view text) {
    UErrorCode ec = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(ec);
    if (U_FAILURE(ec)) throw std::runtime_error("ICU NFC instance unavailable");
    icu::UnicodeString us = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    icu::UnicodeString norm = nfc->normalize(us, ec);
    if (U_FAILURE(ec)) throw std::runtime_error("ICU NFC normalization failed");
    norm.toLower(icu::Locale::getRoot());
    std::string folded;
    norm.toUTF8String(folded);

    std::string out;
    out.reserve(folded.size());
    bool pending_space = false;
    std::string token;
    bool token_has_substance = false;  // anything that is not pure punctuation
    auto flush = [&]() {
        if (!token.empty() && token_has_substance) {
            if (pending_space) out.push_back(' ');
            out.append(token);
            pending_space = true;
        }
        token.clear();
        token_has_substance = false;
    };
    for (const auto& c : decode_utf8(folded)) {
        if (classify(c.value) == CharClass::Whitespace) {
            flush();
            continue;
        }
        if (classify(c.value) != CharClass::PunctSymbol) token_has_substance = true;
        token.append(folded.substr(c.byte_offset, c.byte_len));
    }
    flush();
    return out;
}

}  // namespace corpusforge
