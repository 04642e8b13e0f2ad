#include "aqa/attribute.hpp"

#include "aqa/error.hpp"

namespace aqa {

std::string_view attribute_name(Attribute a) noexcept {
    switch (a) {
        case Attribute::Location: return "location";
        case Attribute::User: return "user";
        case Attribute::Time: return "time";
        case Attribute::Language: return "language";
        case Attribute::Topic: return "topic";
        case Attribute::Subtopic: return "subtopic";
        case Attribute::Keywords: return "keywords";
    }
    return "unknown";
}

std::optional<Attribute> parse_attribute(std::string_view name) noexcept {
    if (name == "location" || name == "loc") return Attribute::Location;
    if (name == "user" || name == "username") return Attribute::User;
    if (name == "time") return Attribute::Time;
    if (name == "language" || name == "lang") return Attribute::Language;
    if (name == "topic" || name == "topics") return Attribute::Topic;
    if (name == "subtopic" || name == "subtopics") return Attribute::Subtopic;
    if (name == "keywords" || name == "keyword") return Attribute::Keywords;
    return std::nullopt;
}

Attribute require_attribute(std::string_view name) {
    if (auto a = parse_attribute(name)) return *a;
    throw InvalidArgument("unknown attribute '" + std::string(name) + "'");
}

}  // namespace aqa
