#include "aqa/corpus/tokenizer.hpp"

#include "aqa/text.hpp"

namespace aqa::corpus {

namespace {

bool is_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c >= 0x80;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        auto c = static_cast<unsigned char>(text[i]);
        if (is_space(c)) {
            ++i;
        } else if (is_word_byte(c)) {
            std::size_t j = i + 1;
            while (j < n && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
            out.push_back({i, j, true});
            i = j;
        } else {
            out.push_back({i, i + 1, false});
            ++i;
        }
    }
    return out;
}

std::size_t count_tokens(std::string_view text) {
    std::size_t count = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        auto c = static_cast<unsigned char>(text[i]);
        if (is_space(c)) {
            ++i;
        } else if (is_word_byte(c)) {
            while (i < n && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
            ++count;
        } else {
            ++i;
            ++count;
        }
    }
    return count;
}

std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& t : tokenize(text)) {
        if (t.word) out.push_back(ascii_lower(text.substr(t.begin, t.end - t.begin)));
    }
    return out;
}

bool ends_sentence(std::string_view text, const Token& tok) {
    if (!tok.word) {
        char c = text[tok.begin];
        if (c == '.' || c == '!' || c == '?') return true;
    }
    // A token followed by a line break also closes a sentence (transcript turns).
    for (std::size_t i = tok.end; i < text.size(); ++i) {
        char c = text[i];
        if (c == '\n') return true;
        if (c != ' ' && c != '\t' && c != '\r') return false;
    }
    return false;
}

}  // namespace aqa::corpus
