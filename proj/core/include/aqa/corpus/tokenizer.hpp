#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace aqa::corpus {

/// Byte span [begin, end) of one token inside the source text.
struct Token {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool word = true;  ///< false for a single punctuation character
};

/// Word tokenizer used for every token count in the engine.
///
/// Rules:
///  - ASCII whitespace separates tokens and is never part of one.
///  - A word is a maximal run of ASCII letters, digits, '_' and any byte
///    >= 0x80 (so UTF-8 sequences stay inside words).
///  - Every other ASCII character (punctuation, symbols) is a token of its own.
std::vector<Token> tokenize(std::string_view text);

std::size_t count_tokens(std::string_view text);

/// Lowercased word tokens only (punctuation dropped).
std::vector<std::string> word_tokens(std::string_view text);

/// ".", "!", "?" and newline-terminated lines end sentences.
bool ends_sentence(std::string_view text, const Token& tok);

}  // namespace aqa::corpus
