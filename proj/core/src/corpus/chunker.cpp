#include "aqa/corpus/chunker.hpp"

#include <nlohmann/json.hpp>

#include "aqa/corpus/tokenizer.hpp"
#include "aqa/error.hpp"

namespace aqa::corpus {

namespace {

struct Unit {
    std::size_t begin;  // token index
    std::size_t end;
    std::size_t size() const { return end - begin; }
};

std::vector<Unit> sentence_units(std::string_view text, const std::vector<Token>& tokens, std::size_t max_tokens) {
    std::vector<Unit> units;
    auto push = [&](std::size_t b, std::size_t e) {
        // Oversized sentences are the only place a cut happens.
        for (std::size_t s = b; s < e; s += max_tokens) units.push_back({s, std::min(e, s + max_tokens)});
    };
    std::size_t start = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (ends_sentence(text, tokens[i])) {
            push(start, i + 1);
            start = i + 1;
        }
    }
    if (start < tokens.size()) push(start, tokens.size());
    return units;
}

}  // namespace

std::vector<Chunk> chunk_text(const std::string& parent_id, const std::string& text, const ChunkParams& params) {
    if (params.max_tokens == 0) throw InvalidArgument("max_tokens must be positive");
    if (params.overlap >= params.max_tokens) throw InvalidArgument("overlap must be smaller than max_tokens");
    const auto tokens = tokenize(text);
    std::vector<Chunk> chunks;
    if (tokens.empty()) return chunks;

    const auto units = sentence_units(text, tokens, params.max_tokens);
    std::size_t first = 0;
    while (first < units.size()) {
        std::size_t last = first;
        std::size_t size = 0;
        while (last < units.size() && size + units[last].size() <= params.max_tokens) size += units[last++].size();

        Chunk c;
        c.parent_id = parent_id;
        c.index = chunks.size();
        c.token_span = {units[first].begin, units[last - 1].end};
        const std::size_t byte_begin = tokens[c.token_span.first].begin;
        const std::size_t byte_end = tokens[c.token_span.second - 1].end;
        c.text = text.substr(byte_begin, byte_end - byte_begin);
        chunks.push_back(std::move(c));
        if (last == units.size()) break;

        // Carry trailing whole sentences into the next chunk while they fit
        // the overlap budget and still leave room for the next new sentence.
        std::size_t next = last;
        std::size_t carried = 0;
        while (next - 1 > first && carried + units[next - 1].size() <= params.overlap &&
               carried + units[next - 1].size() + units[last].size() <= params.max_tokens) {
            carried += units[--next].size();
        }
        first = next;
    }
    return chunks;
}

std::vector<Chunk> chunk(const Conversation& conv, const ChunkParams& params) {
    return chunk_text(conv.id, conv.text, params);
}

nlohmann::json to_json(const Chunk& c) {
    return {{"parent_id", c.parent_id},
            {"index", c.index},
            {"text", c.text},
            {"token_span", {c.token_span.first, c.token_span.second}}};
}

Chunk chunk_from_json(const nlohmann::json& j) {
    try {
        Chunk c;
        c.parent_id = j.at("parent_id").get<std::string>();
        c.index = j.at("index").get<std::size_t>();
        c.text = j.at("text").get<std::string>();
        const auto& span = j.at("token_span");
        c.token_span = {span.at(0).get<std::size_t>(), span.at(1).get<std::size_t>()};
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad chunk record: ") + e.what());
    }
}

}  // namespace aqa::corpus
