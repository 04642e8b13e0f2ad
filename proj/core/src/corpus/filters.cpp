#include "aqa/corpus/filters.hpp"

#include <unordered_map>

namespace aqa::corpus {

CorpusStore filter_by_length(const CorpusStore& store, std::size_t max_tokens) {
    CorpusStore out;
    for (const auto& c : store) {
        if (keep_by_length(c, max_tokens)) out.add(c);
    }
    return out;
}

CorpusStore filter_active_users(const CorpusStore& store, std::size_t min_sessions) {
    std::unordered_map<std::string, std::size_t> sessions;
    for (const auto& c : store) ++sessions[c.user];
    CorpusStore out;
    for (const auto& c : store) {
        if (sessions[c.user] >= min_sessions) out.add(c);
    }
    return out;
}

}  // namespace aqa::corpus
