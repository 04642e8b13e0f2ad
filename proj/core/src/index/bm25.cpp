#include "aqa/index/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "aqa/corpus/tokenizer.hpp"
#include "aqa/error.hpp"
#include "aqa/text.hpp"

namespace aqa::index {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw NotFound("cannot open '" + p.string() + "'");
    return in;
}

}  // namespace

std::vector<std::string> bm25_terms(std::string_view text) {
    auto words = corpus::word_tokens(text);
    std::erase_if(words, [](const std::string& w) { return is_stopword(w); });
    return words;
}

Bm25Index::Bm25Index(std::vector<IndexDocument> docs, const Bm25Params& params) : params_(params) {
    if (docs.empty()) throw InvalidArgument("cannot build a BM25 index over an empty corpus");
    if (params.k1 < 0 || params.b < 0 || params.b > 1) throw InvalidArgument("BM25 needs k1 >= 0 and b in [0, 1]");
    table_ = DocTable(std::move(docs));
    std::map<std::string, std::map<std::uint32_t, std::uint32_t>> inverted;
    lengths_.reserve(table_.size());
    for (std::size_t i = 0; i < table_.size(); ++i) {
        const auto terms = bm25_terms(table_.doc(i).text);
        lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
        for (const auto& t : terms) ++inverted[t][static_cast<std::uint32_t>(i)];
    }
    for (auto& [term, posting] : inverted) {
        vocab_.emplace(term, static_cast<std::uint32_t>(terms_.size()));
        terms_.push_back(term);
        postings_.emplace_back(posting.begin(), posting.end());
    }
    finish();
}

void Bm25Index::finish() {
    double total = 0.0;
    for (auto l : lengths_) total += l;
    avgdl_ = total / static_cast<double>(lengths_.size());
}

double Bm25Index::idf(std::size_t df) const {
    const double n = static_cast<double>(table_.size());
    const double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::size_t Bm25Index::document_frequency(std::string_view term) const {
    auto it = vocab_.find(std::string(term));
    return it == vocab_.end() ? 0 : postings_[it->second].size();
}

std::vector<std::uint32_t> Bm25Index::query_term_ids(std::string_view query) const {
    std::vector<std::uint32_t> ids;
    for (const auto& t : bm25_terms(query)) {
        auto it = vocab_.find(t);
        if (it != vocab_.end()) ids.push_back(it->second);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

double Bm25Index::score(std::string_view query, std::size_t doc) const {
    if (doc >= table_.size()) throw InvalidArgument("document position out of range");
    double s = 0.0;
    const double norm = params_.k1 * (1.0 - params_.b + params_.b * lengths_[doc] / avgdl_);
    for (auto t : query_term_ids(query)) {
        const auto& post = postings_[t];
        auto it = std::lower_bound(post.begin(), post.end(), std::pair<std::uint32_t, std::uint32_t>{
                                                                  static_cast<std::uint32_t>(doc), 0});
        if (it == post.end() || it->first != doc) continue;
        const double tf = it->second;
        s += idf(post.size()) * tf * (params_.k1 + 1.0) / (tf + norm);
    }
    return s;
}

std::vector<ScoredDoc> Bm25Index::search(std::string_view query, const MetadataFilter& filter, std::size_t k) const {
    if (k == 0) throw InvalidArgument("k must be positive");
    std::vector<char> allowed(table_.size(), 1);
    if (!filter.empty()) {
        std::fill(allowed.begin(), allowed.end(), 0);
        for (auto i : table_.passing(filter)) allowed[i] = 1;
    }
    std::vector<double> acc(table_.size(), 0.0);
    std::vector<char> hit(table_.size(), 0);
    for (auto t : query_term_ids(query)) {
        const double w = idf(postings_[t].size());
        for (const auto& [d, tf] : postings_[t]) {
            if (!allowed[d]) continue;
            const double norm = params_.k1 * (1.0 - params_.b + params_.b * lengths_[d] / avgdl_);
            acc[d] += w * tf * (params_.k1 + 1.0) / (tf + norm);
            hit[d] = 1;
        }
    }
    std::vector<std::pair<std::size_t, double>> scored;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        if (hit[i]) scored.emplace_back(i, acc[i]);
    }
    return table_.pool_top_k(scored, k);
}

void Bm25Index::save(const std::string& dir) const {
    fs::create_directories(dir);
    {
        std::ofstream out(fs::path(dir) / "meta.json");
        json meta = {{"format", "aqa-bm25"},       {"version", kFormatVersion}, {"k1", params_.k1},
                     {"b", params_.b},             {"documents", table_.size()}, {"terms", terms_.size()}};
        out << meta.dump(2) << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "docs.jsonl");
        for (std::size_t i = 0; i < table_.size(); ++i) {
            json j = to_json(table_.doc(i));
            j["length"] = lengths_[i];
            out << j.dump() << '\n';
        }
    }
    std::ofstream out(fs::path(dir) / "postings.jsonl");
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        json p = json::array();
        for (const auto& [d, tf] : postings_[t]) p.push_back({d, tf});
        out << json{terms_[t], p}.dump() << '\n';
    }
    if (!out) throw Error("failed writing BM25 index to '" + dir + "'");
}

Bm25Index Bm25Index::load(const std::string& dir) {
    Bm25Index idx;
    try {
        auto in = open_in(fs::path(dir) / "meta.json");
        const json meta = json::parse(in);
        if (meta.at("format") != "aqa-bm25") throw ParseError("'" + dir + "' is not a BM25 index");
        if (meta.at("version").get<int>() != kFormatVersion) {
            throw ParseError("unsupported BM25 index version " + meta.at("version").dump());
        }
        idx.params_.k1 = meta.at("k1").get<double>();
        idx.params_.b = meta.at("b").get<double>();
        std::vector<IndexDocument> docs;
        auto din = open_in(fs::path(dir) / "docs.jsonl");
        for (std::string line; std::getline(din, line);) {
            if (line.empty()) continue;
            const json j = json::parse(line);
            docs.push_back(document_from_json(j));
            idx.lengths_.push_back(j.at("length").get<std::uint32_t>());
        }
        if (docs.empty()) throw ParseError("BM25 index '" + dir + "' has no documents");
        idx.table_ = DocTable(std::move(docs));
        auto pin = open_in(fs::path(dir) / "postings.jsonl");
        for (std::string line; std::getline(pin, line);) {
            if (line.empty()) continue;
            const json j = json::parse(line);
            const auto term = j.at(0).get<std::string>();
            idx.vocab_.emplace(term, static_cast<std::uint32_t>(idx.terms_.size()));
            idx.terms_.push_back(term);
            auto& post = idx.postings_.emplace_back();
            for (const auto& p : j.at(1)) post.emplace_back(p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>());
        }
    } catch (const json::exception& e) {
        throw ParseError("corrupt BM25 index '" + dir + "': " + e.what());
    }
    idx.finish();
    return idx;
}

}  // namespace aqa::index
