#include "aqa/index/documents.hpp"

#include <algorithm>
#include <unordered_set>

#include "aqa/corpus/tokenizer.hpp"
#include "aqa/error.hpp"

namespace aqa::index {

using nlohmann::json;

TextGranularity parse_text_granularity(std::string_view name) {
    if (name == "raw") return TextGranularity::Raw;
    if (name == "summary") return TextGranularity::Summary;
    throw InvalidArgument("unknown granularity '" + std::string(name) + "' (expected raw or summary)");
}

std::string_view granularity_name(TextGranularity g) noexcept { return g == TextGranularity::Raw ? "raw" : "summary"; }

json to_json(const IndexDocument& d) {
    return {{"id", d.id}, {"parent_id", d.parent_id}, {"text", d.text}, {"parent_tokens", d.parent_tokens},
            {"meta", to_json(d.meta)}};
}

IndexDocument document_from_json(const json& j) {
    try {
        IndexDocument d;
        d.id = j.at("id").get<std::string>();
        d.parent_id = j.at("parent_id").get<std::string>();
        d.text = j.at("text").get<std::string>();
        d.parent_tokens = j.at("parent_tokens").get<std::size_t>();
        d.meta = meta_from_json(j.at("meta"));
        return d;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad index document: ") + e.what());
    }
}

std::vector<IndexDocument> make_documents(const corpus::CorpusStore& store, TextGranularity g,
                                          const corpus::ChunkParams& chunking) {
    if (g == TextGranularity::Raw) {
        std::vector<corpus::Chunk> chunks;
        for (const auto& c : store) {
            auto cs = corpus::chunk(c, chunking);
            chunks.insert(chunks.end(), std::make_move_iterator(cs.begin()), std::make_move_iterator(cs.end()));
        }
        return documents_from_chunks(store, chunks);
    }
    std::vector<IndexDocument> docs;
    docs.reserve(store.size());
    for (const auto& c : store) {
        IndexDocument d;
        d.id = c.id;
        d.parent_id = c.id;
        d.text = c.summary_or_text();
        d.parent_tokens = c.summary ? corpus::count_tokens(*c.summary) : c.token_count;
        d.meta = meta_from_conversation(c);
        docs.push_back(std::move(d));
    }
    return docs;
}

std::vector<IndexDocument> documents_from_chunks(const corpus::CorpusStore& store,
                                                 const std::vector<corpus::Chunk>& chunks) {
    std::vector<IndexDocument> docs;
    docs.reserve(chunks.size());
    for (const auto& ch : chunks) {
        const auto& c = store.at(ch.parent_id);
        IndexDocument d;
        d.id = ch.id();
        d.parent_id = c.id;
        d.text = ch.text;
        d.parent_tokens = c.token_count;
        d.meta = meta_from_conversation(c);
        docs.push_back(std::move(d));
    }
    return docs;
}

bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) noexcept {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
}

DocTable::DocTable(std::vector<IndexDocument> docs) : docs_(std::move(docs)) {
    std::unordered_set<std::string> ids;
    for (const auto& d : docs_) {
        if (!ids.insert(d.id).second) throw InvalidArgument("duplicate document id '" + d.id + "'");
        auto [it, inserted] = parent_tokens_.emplace(d.parent_id, d.parent_tokens);
        if (!inserted && it->second != d.parent_tokens) {
            throw InvalidArgument("inconsistent parent token counts for '" + d.parent_id + "'");
        }
    }
    parents_.reserve(parent_tokens_.size());
    for (const auto& [p, _] : parent_tokens_) parents_.push_back(p);
    std::sort(parents_.begin(), parents_.end());
    parent_of_.reserve(docs_.size());
    for (const auto& d : docs_) {
        parent_of_.push_back(static_cast<std::size_t>(
            std::lower_bound(parents_.begin(), parents_.end(), d.parent_id) - parents_.begin()));
    }
}

std::size_t DocTable::parent_tokens(const std::string& parent_id) const {
    auto it = parent_tokens_.find(parent_id);
    if (it == parent_tokens_.end()) throw NotFound("no indexed conversation '" + parent_id + "'");
    return it->second;
}

std::vector<ScoredDoc> DocTable::pool_top_k(const std::vector<std::pair<std::size_t, double>>& scored,
                                            std::size_t k) const {
    std::vector<double> best(parents_.size(), 0.0);
    std::vector<char> seen(parents_.size(), 0);
    for (const auto& [i, s] : scored) {
        const std::size_t p = parent_of_[i];
        if (!seen[p] || s > best[p]) best[p] = s;
        seen[p] = 1;
    }
    std::vector<ScoredDoc> out;
    for (std::size_t p = 0; p < parents_.size(); ++p) {
        if (seen[p]) out.push_back({parents_[p], best[p], 0});
    }
    keep_top_k(out, k);
    return out;
}

std::vector<std::size_t> DocTable::passing(const MetadataFilter& filter) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        if (filter.matches(docs_[i].meta)) out.push_back(i);
    }
    return out;
}

void keep_top_k(std::vector<ScoredDoc>& docs, std::size_t k) {
    if (docs.size() > k) {
        std::partial_sort(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(k), docs.end(), ranks_before);
        docs.resize(k);
    } else {
        std::sort(docs.begin(), docs.end(), ranks_before);
    }
}

}  // namespace aqa::index
