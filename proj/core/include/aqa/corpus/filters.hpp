#pragma once

#include <cstddef>

#include "aqa/corpus/conversation.hpp"

namespace aqa::corpus {

inline constexpr std::size_t kDefaultMaxTokens = 4096;
inline constexpr std::size_t kDefaultMinSessions = 10;

/// Keep unless the conversation is strictly longer than max_tokens.
constexpr bool keep_by_length(const Conversation& c, std::size_t max_tokens = kDefaultMaxTokens) noexcept {
    return c.token_count <= max_tokens;
}

CorpusStore filter_by_length(const CorpusStore& store, std::size_t max_tokens = kDefaultMaxTokens);

/// Drops every conversation of users with fewer than min_sessions conversations.
CorpusStore filter_active_users(const CorpusStore& store, std::size_t min_sessions = kDefaultMinSessions);

}  // namespace aqa::corpus
