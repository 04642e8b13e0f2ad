#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace aqa {

/// Conversation attributes that conditions, targets and filters refer to.
enum class Attribute {
    Location,
    User,
    Time,
    Language,
    Topic,
    Subtopic,
    Keywords,
};

inline constexpr std::array<Attribute, 7> kAllAttributes = {
    Attribute::Location, Attribute::User,     Attribute::Time,     Attribute::Language,
    Attribute::Topic,    Attribute::Subtopic, Attribute::Keywords,
};

/// Canonical lowercase name ("location", "user", ...).
std::string_view attribute_name(Attribute a) noexcept;

/// Accepts canonical names plus the short forms used in combo files
/// ("loc", "lang", "keyword", "username", "subtopics", "topics").
std::optional<Attribute> parse_attribute(std::string_view name) noexcept;

/// Throws InvalidArgument naming the attribute when unknown.
Attribute require_attribute(std::string_view name);

/// Topic, subtopic and keywords may hold several values per conversation.
constexpr bool is_multi_valued(Attribute a) noexcept {
    return a == Attribute::Topic || a == Attribute::Subtopic || a == Attribute::Keywords;
}

/// Inferred attributes come from content, the rest from metadata.
constexpr bool is_inferred(Attribute a) noexcept { return is_multi_valued(a); }

}  // namespace aqa
