#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aqa {

/// ASCII-only lowercase; bytes >= 0x80 are copied unchanged.
std::string ascii_lower(std::string_view s);

std::string_view trim(std::string_view s) noexcept;

std::vector<std::string> split_whitespace(std::string_view s);

std::string join(std::span<const std::string> parts, std::string_view sep);

/// The pinned 179-word English stopword list shipped in data/stopwords_en.txt.
std::span<const std::string_view> english_stopwords() noexcept;

/// Case-sensitive lookup; callers lowercase first.
bool is_stopword(std::string_view word) noexcept;

/// Number of non-overlapping occurrences of needle in haystack.
std::size_t count_occurrences(std::string_view haystack, std::string_view needle) noexcept;

}  // namespace aqa
