#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aqa/attribute.hpp"
#include "aqa/time.hpp"

namespace aqa::corpus {

/// One user-chatbot dialogue with its metadata and inferred attributes.
struct Conversation {
    std::string id;
    std::string user;
    Timestamp timestamp{};
    std::string location;
    std::string language;
    std::string text;
    std::optional<std::string> summary;
    std::vector<std::string> topics;
    std::vector<std::string> subtopics;
    std::vector<std::string> keywords;
    std::size_t token_count = 0;

    /// Summary when present, otherwise the full text.
    const std::string& summary_or_text() const { return summary ? *summary : text; }
};

/// Values of an attribute for one conversation; time is rendered as a bucket label.
std::vector<std::string> attribute_values(const Conversation& c, Attribute a,
                                          TimeGranularity time_granularity = TimeGranularity::Month);

nlohmann::json to_json(const Conversation& c);

/// Strict parse of one record. Unknown fields are ignored; a missing or
/// mistyped required field throws ParseError naming the field. When `user`
/// is absent but `ip`/`headers` are present the username is derived from them.
Conversation conversation_from_json(const nlohmann::json& j);

/// In-memory conversation collection with unique ids, kept in insertion order.
class CorpusStore {
public:
    CorpusStore() = default;
    explicit CorpusStore(std::vector<Conversation> conversations);

    /// Throws InvalidArgument naming the id on duplicates.
    void add(Conversation c);

    const Conversation* find(const std::string& id) const;
    const Conversation& at(const std::string& id) const;

    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    const std::vector<Conversation>& conversations() const noexcept { return items_; }
    auto begin() const noexcept { return items_.begin(); }
    auto end() const noexcept { return items_.end(); }

    /// One JSON record per line, insertion order.
    void save_jsonl(std::ostream& out) const;
    void save_jsonl(const std::string& path) const;
    static CorpusStore load_jsonl(const std::string& path);

private:
    std::vector<Conversation> items_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace aqa::corpus
