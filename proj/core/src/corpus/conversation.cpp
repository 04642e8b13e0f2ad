#include "aqa/corpus/conversation.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "aqa/corpus/tokenizer.hpp"
#include "aqa/corpus/user_id.hpp"
#include "aqa/error.hpp"

namespace aqa::corpus {

using nlohmann::json;

std::vector<std::string> attribute_values(const Conversation& c, Attribute a, TimeGranularity g) {
    switch (a) {
        case Attribute::Location: return {c.location};
        case Attribute::User: return {c.user};
        case Attribute::Time: return {time_bucket(c.timestamp, g)};
        case Attribute::Language: return {c.language};
        case Attribute::Topic: return c.topics;
        case Attribute::Subtopic: return c.subtopics;
        case Attribute::Keywords: return c.keywords;
    }
    return {};
}

json to_json(const Conversation& c) {
    json j;
    j["id"] = c.id;
    j["user"] = c.user;
    j["timestamp"] = format_rfc3339(c.timestamp);
    j["location"] = c.location;
    j["language"] = c.language;
    j["text"] = c.text;
    if (c.summary) j["summary"] = *c.summary;
    j["topics"] = c.topics;
    j["subtopics"] = c.subtopics;
    j["keywords"] = c.keywords;
    j["token_count"] = c.token_count;
    return j;
}

namespace {

const json& required(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) throw ParseError(std::string("missing field '") + field + "'");
    return *it;
}

std::string required_string(const json& j, const char* field) {
    const json& v = required(j, field);
    if (!v.is_string()) throw ParseError(std::string("field '") + field + "' must be a string");
    return v.get<std::string>();
}

std::vector<std::string> string_list(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) return {};
    if (it->is_string()) return {it->get<std::string>()};
    if (!it->is_array()) throw ParseError(std::string("field '") + field + "' must be a list of strings");
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) throw ParseError(std::string("field '") + field + "' must be a list of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

}  // namespace

Conversation conversation_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("record is not an object");
    Conversation c;
    c.id = required_string(j, "id");
    if (c.id.empty()) throw ParseError("field 'id' is empty");
    if (j.contains("user") && !j["user"].is_null()) {
        c.user = required_string(j, "user");
    } else if (j.contains("ip") || j.contains("headers")) {
        auto get = [&](const char* f) {
            auto it = j.find(f);
            return (it != j.end() && it->is_string()) ? it->get<std::string>() : std::string{};
        };
        c.user = derive_user_id(get("ip"), get("headers"));
    } else {
        throw ParseError("missing field 'user'");
    }
    c.timestamp = parse_rfc3339(required_string(j, "timestamp"));
    c.location = required_string(j, "location");
    c.language = required_string(j, "language");
    c.text = required_string(j, "text");
    if (auto it = j.find("summary"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw ParseError("field 'summary' must be a string");
        c.summary = it->get<std::string>();
    }
    c.topics = string_list(j, "topics");
    c.subtopics = string_list(j, "subtopics");
    c.keywords = string_list(j, "keywords");
    c.token_count = count_tokens(c.text);
    return c;
}

CorpusStore::CorpusStore(std::vector<Conversation> conversations) {
    items_.reserve(conversations.size());
    for (auto& c : conversations) add(std::move(c));
}

void CorpusStore::add(Conversation c) {
    if (by_id_.contains(c.id)) throw InvalidArgument("duplicate conversation id '" + c.id + "'");
    by_id_.emplace(c.id, items_.size());
    items_.push_back(std::move(c));
}

const Conversation* CorpusStore::find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &items_[it->second];
}

const Conversation& CorpusStore::at(const std::string& id) const {
    if (const auto* c = find(id)) return *c;
    throw NotFound("no conversation with id '" + id + "'");
}

void CorpusStore::save_jsonl(std::ostream& out) const {
    for (const auto& c : items_) out << to_json(c).dump() << '\n';
}

void CorpusStore::save_jsonl(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    save_jsonl(out);
}

CorpusStore CorpusStore::load_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFound("cannot open corpus file " + path);
    CorpusStore store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            store.add(conversation_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return store;
}

}  // namespace aqa::corpus
