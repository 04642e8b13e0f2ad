#include "aqa/probe/probe.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "aqa/error.hpp"
#include "aqa/random.hpp"
#include "aqa/text.hpp"

namespace aqa::probe {

using nlohmann::json;
using index::ScoredDoc;

namespace {

constexpr std::string_view kAttributeGuide =
    "location: country name, e.g. \"United States\"\n"
    "language: language name, e.g. \"English\"\n"
    "user: user id\n"
    "time: \"YYYY-MM\", \"YYYY-Www\", \"YYYY-MM-DD\" or {\"op\":\"range\",\"begin\":...,\"end\":...}\n";

std::size_t require_k(std::size_t k, const char* what) {
    if (k == 0) throw InvalidArgument(std::string(what) + " must be positive");
    return k;
}

}  // namespace

Backend parse_backend(std::string_view name) {
    if (name == "bm25") return Backend::Bm25;
    if (name == "dense") return Backend::Dense;
    throw InvalidArgument("unknown backend '" + std::string(name) + "' (expected bm25 or dense)");
}

std::string_view backend_name(Backend b) noexcept { return b == Backend::Bm25 ? "bm25" : "dense"; }

Retriever Retriever::bm25(std::shared_ptr<const index::Bm25Index> idx) {
    if (!idx) throw InvalidArgument("bm25 retriever needs an index");
    Retriever r;
    r.backend_ = Backend::Bm25;
    r.bm25_ = std::move(idx);
    return r;
}

Retriever Retriever::dense(std::shared_ptr<const index::DenseIndex> idx, clients::Embedder& embedder) {
    if (!idx) throw InvalidArgument("dense retriever needs an index");
    if (embedder.dim() != idx->dim()) {
        throw InvalidArgument("embedder dimension " + std::to_string(embedder.dim()) + " does not match index dimension " +
                              std::to_string(idx->dim()));
    }
    Retriever r;
    r.backend_ = Backend::Dense;
    r.dense_ = std::move(idx);
    r.embedder_ = &embedder;
    return r;
}

const index::DocTable& Retriever::table() const noexcept {
    return backend_ == Backend::Bm25 ? bm25_->table() : dense_->table();
}

std::vector<ScoredDoc> Retriever::search(const std::string& query, const index::MetadataFilter& filter,
                                         std::size_t k) const {
    if (backend_ == Backend::Bm25) return bm25_->search(query, filter, k);
    const auto v = embedder_->embed_one(query);
    return dense_->search(v, filter, k);
}

std::vector<std::vector<ScoredDoc>> Retriever::search_many(const std::vector<std::string>& queries,
                                                           const index::MetadataFilter& filter, std::size_t k) const {
    std::vector<std::vector<ScoredDoc>> out;
    out.reserve(queries.size());
    if (backend_ == Backend::Bm25) {
        for (const auto& q : queries) out.push_back(bm25_->search(q, filter, k));
        return out;
    }
    if (queries.empty()) return out;
    const auto vs = embedder_->embed(queries);
    for (const auto& v : vs) out.push_back(dense_->search(v, filter, k));
    return out;
}

json to_json(const BroadQuerySet& b) {
    return {{"filters", index::to_json(b.filters)},
            {"queries", b.queries},
            {"prompt_id", b.prompt_id},
            {"dropped_filters", b.dropped_filters}};
}

BroadQuerySet broad_query_set_from_json(const json& j) {
    try {
        BroadQuerySet b;
        b.filters = index::filter_from_json(j.at("filters"));
        b.queries = j.at("queries").get<std::vector<std::string>>();
        b.prompt_id = j.value("prompt_id", std::string("probe_queries"));
        b.dropped_filters = j.value("dropped_filters", std::vector<std::string>{});
        return b;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad query set: ") + e.what());
    }
}

BroadQuerySet generate_broad_queries(const std::string& question, clients::ChatClient& client, std::size_t max_n) {
    if (trim(question).empty()) throw InvalidArgument("question is empty");
    require_k(max_n, "max_n");
    BroadQuerySet out;
    const auto ex = client.chat(out.prompt_id, {{"question", question},
                                                {"max_queries", std::to_string(max_n)},
                                                {"attributes", std::string(kAttributeGuide)}});
    const json res = clients::parse_json_response(ex.response);
    if (!res.is_object()) throw ParseError("probe_queries response is not an object");
    out.filters = index::filter_from_json_lenient(res.value("filters", json()), out.dropped_filters);
    const auto qit = res.find("queries");
    if (qit == res.end() || !qit->is_array()) throw ParseError("probe_queries response has no query list");
    std::set<std::string> seen;
    for (const auto& q : *qit) {
        if (!q.is_string()) continue;
        std::string text(trim(q.get<std::string>()));
        if (text.empty() || !seen.insert(text).second) continue;
        out.queries.push_back(std::move(text));
        if (out.queries.size() == max_n) break;
    }
    if (out.queries.empty()) throw ParseError("probe_queries response has no usable query");
    return out;
}

std::vector<std::string> EvidenceSet::ids() const {
    std::vector<std::string> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(d.doc_id);
    return out;
}

json to_json(const EvidenceSet& e) {
    json docs = json::array();
    for (const auto& d : e.docs) docs.push_back({{"id", d.doc_id}, {"score", d.score}, {"query", d.source_query_index}});
    return {{"k", e.k}, {"token_total", e.token_total}, {"docs", std::move(docs)}};
}

EvidenceSet evidence_from_json(const json& j) {
    try {
        EvidenceSet e;
        e.k = j.at("k").get<std::size_t>();
        e.token_total = j.at("token_total").get<std::size_t>();
        for (const auto& d : j.at("docs")) {
            e.docs.push_back({d.at("id").get<std::string>(), d.at("score").get<double>(), d.value("query", 0)});
        }
        return e;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad evidence set: ") + e.what());
    }
}

EvidenceSet make_evidence(std::vector<ScoredDoc> docs, std::size_t k, const index::DocTable& table) {
    index::keep_top_k(docs, k);
    EvidenceSet e;
    e.k = k;
    for (const auto& d : docs) e.token_total += table.parent_tokens(d.doc_id);
    e.docs = std::move(docs);
    return e;
}

std::vector<ScoredDoc> max_pool_merge(const std::vector<std::vector<ScoredDoc>>& per_query) {
    std::unordered_map<std::string, ScoredDoc> best;
    for (std::size_t qi = 0; qi < per_query.size(); ++qi) {
        for (const auto& d : per_query[qi]) {
            ScoredDoc cand{d.doc_id, d.score, static_cast<int>(qi)};
            auto [it, inserted] = best.emplace(d.doc_id, cand);
            if (inserted) continue;
            auto& cur = it->second;
            if (cand.score > cur.score ||
                (cand.score == cur.score && cand.source_query_index < cur.source_query_index)) {
                cur = cand;
            }
        }
    }
    std::vector<ScoredDoc> out;
    out.reserve(best.size());
    for (auto& [_, d] : best) out.push_back(std::move(d));
    std::sort(out.begin(), out.end(), index::ranks_before);
    return out;
}

EvidenceSet fan_out_retrieve(const Retriever& r, const BroadQuerySet& bqs, std::size_t per_query_k,
                             std::size_t final_k) {
    require_k(final_k, "final_k");
    if (bqs.queries.empty()) throw InvalidArgument("fan-out retrieval needs at least one query");
    const std::size_t pk = per_query_k == 0 ? final_k : per_query_k;
    return make_evidence(max_pool_merge(r.search_many(bqs.queries, bqs.filters, pk)), final_k, r.table());
}

EvidenceSet rag_retrieve(const Retriever& r, const std::string& question, std::size_t k) {
    require_k(k, "k");
    return make_evidence(r.search(question, {}, k), k, r.table());
}

AblationMode parse_ablation_mode(std::string_view name) {
    if (name == "filter_only") return AblationMode::FilterOnly;
    if (name == "question_and_filter") return AblationMode::QuestionAndFilter;
    throw InvalidArgument("unknown ablation mode '" + std::string(name) + "'");
}

std::string_view ablation_name(AblationMode m) noexcept {
    return m == AblationMode::FilterOnly ? "filter_only" : "question_and_filter";
}

EvidenceSet ablate(AblationMode mode, const Retriever& r, const std::string& question, const BroadQuerySet& bqs,
                   std::size_t k) {
    require_k(k, "k");
    if (mode == AblationMode::QuestionAndFilter) return make_evidence(r.search(question, bqs.filters, k), k, r.table());
    const auto& table = r.table();
    std::map<std::string, double> newest;
    for (auto i : table.passing(bqs.filters)) {
        const auto& d = table.doc(i);
        const double t = static_cast<double>(d.meta.timestamp.time_since_epoch().count());
        auto [it, inserted] = newest.emplace(d.parent_id, t);
        if (!inserted) it->second = std::max(it->second, t);
    }
    std::vector<ScoredDoc> docs;
    docs.reserve(newest.size());
    for (const auto& [id, t] : newest) docs.push_back({id, t, 0});
    return make_evidence(std::move(docs), k, table);
}

EvidenceSet oracle_evidence(const std::vector<std::string>& supporting_ids, const index::DocTable& table,
                            std::size_t k, std::uint64_t seed) {
    require_k(k, "k");
    std::vector<std::string> ids;
    const auto& parents = table.parents();
    for (const auto& id : supporting_ids) {
        if (std::binary_search(parents.begin(), parents.end(), id)) ids.push_back(id);
    }
    Rng rng(seed);
    rng.shuffle(ids);
    if (ids.size() > k) ids.resize(k);
    EvidenceSet e;
    e.k = k;
    // Scores decrease along the shuffled order so ranks_before keeps it.
    for (std::size_t i = 0; i < ids.size(); ++i) {
        e.token_total += table.parent_tokens(ids[i]);
        e.docs.push_back({ids[i], static_cast<double>(ids.size() - i), 0});
    }
    return e;
}

RetrievalMode parse_retrieval_mode(std::string_view name) {
    if (name == "rag") return RetrievalMode::Rag;
    if (name == "probe") return RetrievalMode::Probe;
    if (name == "filter_only") return RetrievalMode::FilterOnly;
    if (name == "question_and_filter") return RetrievalMode::QuestionAndFilter;
    if (name == "oracle") return RetrievalMode::Oracle;
    throw InvalidArgument("unknown retrieval mode '" + std::string(name) + "'");
}

std::string_view retrieval_mode_name(RetrievalMode m) noexcept {
    switch (m) {
        case RetrievalMode::Rag: return "rag";
        case RetrievalMode::Probe: return "probe";
        case RetrievalMode::FilterOnly: return "filter_only";
        case RetrievalMode::QuestionAndFilter: return "question_and_filter";
        case RetrievalMode::Oracle: return "oracle";
    }
    return "probe";
}

void RetrievalConfig::validate() const {
    require_k(final_k, "final_k");
    require_k(max_n, "max_n");
}

json to_json(const RetrievalConfig& c) {
    return {{"mode", retrieval_mode_name(c.mode)},
            {"backend", backend_name(c.backend)},
            {"granularity", index::granularity_name(c.granularity)},
            {"per_query_k", c.per_query_k},
            {"final_k", c.final_k},
            {"max_n", c.max_n}};
}

RetrievalConfig retrieval_config_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("retrieval config must be an object");
    RetrievalConfig c;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "mode") c.mode = parse_retrieval_mode(v.get<std::string>());
            else if (key == "backend") c.backend = parse_backend(v.get<std::string>());
            else if (key == "granularity") c.granularity = index::parse_text_granularity(v.get<std::string>());
            else if (key == "per_query_k") c.per_query_k = v.get<std::size_t>();
            else if (key == "final_k") c.final_k = v.get<std::size_t>();
            else if (key == "max_n") c.max_n = v.get<std::size_t>();
            else throw ParseError("unknown retrieval config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad retrieval config: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    c.validate();
    return c;
}

EvidenceSet retrieve(const RetrievalConfig& cfg, const Retriever& r, const std::string& question,
                     clients::ChatClient& client, const std::vector<std::string>& supporting_ids, std::uint64_t seed,
                     BroadQuerySet* bqs_out) {
    cfg.validate();
    switch (cfg.mode) {
        case RetrievalMode::Rag: return rag_retrieve(r, question, cfg.final_k);
        case RetrievalMode::Oracle: return oracle_evidence(supporting_ids, r.table(), cfg.final_k, seed);
        default: break;
    }
    BroadQuerySet bqs = generate_broad_queries(question, client, cfg.max_n);
    EvidenceSet e;
    if (cfg.mode == RetrievalMode::Probe) {
        e = fan_out_retrieve(r, bqs, cfg.per_query_k, cfg.final_k);
    } else {
        e = ablate(cfg.mode == RetrievalMode::FilterOnly ? AblationMode::FilterOnly : AblationMode::QuestionAndFilter, r,
                   question, bqs, cfg.final_k);
    }
    if (bqs_out) *bqs_out = std::move(bqs);
    return e;
}

}  // namespace aqa::probe
