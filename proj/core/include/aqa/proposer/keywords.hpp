#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqa/corpus/conversation.hpp"

namespace aqa::proposer {

inline constexpr std::array<std::string_view, 10> kKeywordKinds = {
    "Programming Language", "Video Games", "Tabletop Games", "Manga/Anime",   "Film",
    "TV Show",              "Western Cartoon/Comic",        "Book",          "Musical", "Public Figure"};
/// Kind of keywords nobody categorized; all five rules apply.
inline constexpr std::string_view kUnspecifiedKind = "Unspecified";
inline constexpr std::string_view kPublicFigure = "Public Figure";

/// Lowercase, fold Latin accents to ASCII, turn '-', '/', '_' into spaces,
/// drop other punctuation and collapse whitespace. Words such as "c++" and
/// "c#" keep their symbols. Idempotent.
std::string normalize_keyword(std::string_view raw);

/// Pairwise equivalence after normalization, the shorter term as wa:
///  1. identical;
///  2. identical once stopwords are removed;
///  3. wa's words are a prefix of wb's words and wa has at least 3 words;
///  4. same as 3 for a suffix;
///  5. wa is the initials of wb's words (wb has at least 2 words).
/// Public figures only use rules 1 and 2. Symmetric.
bool keywords_equivalent(std::string_view wa, std::string_view wb, std::string_view kind);

struct RawKeyword {
    std::string text;
    std::string kind{kUnspecifiedKind};
    std::size_t count = 1;  ///< occurrences in the corpus
};

struct KeywordGroup {
    std::string canonical;
    std::set<std::string> members;  ///< raw spellings
    std::string kind;
    friend bool operator==(const KeywordGroup&, const KeywordGroup&) = default;
};

/// Transitive closure of keywords_equivalent within each kind. The canonical
/// member is the most frequent one, then the shortest, then the smallest.
/// Groups come out sorted by (kind, canonical); input order does not matter.
std::vector<KeywordGroup> merge_keywords(const std::vector<RawKeyword>& keywords);

nlohmann::json to_json(const std::vector<KeywordGroup>& groups);
std::vector<KeywordGroup> keyword_groups_from_json(const nlohmann::json& j);

/// Keyword occurrences of a store with kinds looked up in `kinds`
/// (raw keyword -> kind); unknown keywords are Unspecified.
std::vector<RawKeyword> collect_keywords(const corpus::CorpusStore& store,
                                         const std::map<std::string, std::string>& kinds);

/// Replaces every keyword by its group's canonical spelling, dropping
/// duplicates within a conversation.
corpus::CorpusStore canonicalize_keywords(const corpus::CorpusStore& store, const std::vector<KeywordGroup>& groups);

/// "keyword<TAB>kind" lines; blank lines and '#' comments skipped.
std::map<std::string, std::string> load_keyword_kinds(const std::string& path);

}  // namespace aqa::proposer
