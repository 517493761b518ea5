#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace corpusforge {

enum class CharClass { Letter, Digit, Whitespace, PunctSymbol };

struct Codepoint {
    char32_t value;
    uint32_t byte_offset;
    uint32_t byte_len;
};

// Decodes UTF-8. Malformed bytes come back as one U+FFFD per offending byte,
// so every input decodes to something and offsets stay aligned.
std::vector<Codepoint> decode_utf8(std::string_view text);

bool is_valid_utf8(std::string_view text);

void append_utf8(std::string& out, char32_t cp);

// Unicode general-category bucket used by the pretokenizer and the quality
// rules: Nd is Digit, White_Space is Whitespace, P*/S* is PunctSymbol,
// everything else counts as Letter.
CharClass classify(char32_t cp);

size_t codepoint_count(std::string_view text);

// Whitespace runs collapsed to single spaces, leading/trailing runs dropped.
std::string collapse_whitespace(std::string_view text);

// Canonical form for near-duplicate detection: NFC, lowercased with the root
// locale, whitespace collapsed; tokens made only of punctuation are dropped.
std::string normalize_for_dedup(std::string_view text);

// Splits on whitespace runs.
std::vector<std::string> split_words(std::string_view text);

}  // namespace corpusforge
