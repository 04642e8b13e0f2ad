#include "aqa/eval/benchmark.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "aqa/error.hpp"
#include "aqa/hash.hpp"
#include "aqa/random.hpp"
#include "aqa/text.hpp"
#include "aqa/time.hpp"

namespace aqa::eval {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::map<std::string, std::uint64_t> grades_of(const aggdb::AggregativeQuestion& q) {
    std::map<std::string, std::uint64_t> g;
    for (const auto& c : q.candidates) g[c.value] = c.grade;
    return g;
}

std::vector<std::string> values_of(const aggdb::AggregativeQuestion& q) {
    std::vector<std::string> v;
    for (const auto& c : q.candidates) v.push_back(c.value);
    return v;
}

json metric_map(const std::map<std::size_t, double>& m, const char* prefix) {
    json out = json::object();
    for (const auto& [k, v] : m) out[std::string(prefix) + std::to_string(k)] = v;
    return out;
}

}  // namespace

std::string render_context(const std::vector<std::string>& ids, const corpus::CorpusStore& store,
                           index::TextGranularity granularity) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto& c = store.at(ids[i]);
        out += "[" + std::to_string(i + 1) + "] user=" + c.user +
               " time=" + time_bucket(c.timestamp, TimeGranularity::Day) + " location=" + c.location +
               " language=" + c.language + "\n";
        out += granularity == index::TextGranularity::Summary ? c.summary_or_text() : c.text;
        out += "\n\n";
    }
    return out;
}

std::vector<std::string> rank_candidates(const std::string& question, const std::vector<std::string>& candidates,
                                         const std::string& context, clients::ChatClient& client,
                                         clients::TokenUsage* usage) {
    std::string listing;
    for (const auto& c : candidates) listing += "- " + c + "\n";
    const auto ex = client.chat("answer_ranking", {{"question", question},
                                                   {"candidates", listing},
                                                   {"candidates_json", json(candidates).dump()},
                                                   {"context", context.empty() ? std::string("(none)") : context}});
    if (usage) *usage += ex.usage;
    const json res = clients::parse_json_response(ex.response);
    const auto it = res.find("ranking");
    if (it == res.end() || !it->is_array()) throw ParseError("answer_ranking response has no ranking list");

    std::map<std::string, std::string> by_lower;
    for (const auto& c : candidates) by_lower.emplace(lower(c), c);
    std::vector<std::string> order;
    std::set<std::string> seen;
    for (const auto& v : *it) {
        if (!v.is_string()) throw ParseError("answer_ranking entry is not a string: " + v.dump());
        const std::string key = lower(std::string(trim(v.get<std::string>())));
        auto m = by_lower.find(key);
        if (m == by_lower.end()) throw ParseError("answer_ranking names unknown candidate '" + v.get<std::string>() + "'");
        if (!seen.insert(key).second) throw ParseError("answer_ranking repeats candidate '" + m->second + "'");
        order.push_back(m->second);
    }
    if (order.size() != candidates.size()) {
        std::string missing;
        for (const auto& c : candidates) {
            if (!seen.contains(lower(c))) missing += (missing.empty() ? "" : ", ") + c;
        }
        throw ParseError("answer_ranking is missing candidates: " + missing);
    }
    return order;
}

BenchmarkSummary summarize(const std::vector<QuestionResult>& results) {
    BenchmarkSummary s;
    s.questions = results.size();
    std::map<std::size_t, std::size_t> recall_n;
    for (const auto& r : results) {
        if (r.error) ++s.errors;
        if (!r.metrics) continue;
        ++s.evaluated;
        for (const auto& [k, v] : r.metrics->ndcg_at) s.mean_ndcg_at[k] += v;
        for (const auto& [k, v] : r.metrics->recall_at) {
            s.mean_recall_at[k] += v;
            ++recall_n[k];
        }
        s.total_input_tokens += r.metrics->input_tokens;
        s.total_evidence_tokens += r.metrics->evidence_tokens;
    }
    for (auto& [k, v] : s.mean_ndcg_at) v /= static_cast<double>(s.evaluated);
    for (auto& [k, v] : s.mean_recall_at) v /= static_cast<double>(recall_n[k]);
    return s;
}

json to_json(const BenchmarkReport& r) {
    json results = json::array();
    for (const auto& q : r.results) {
        json j{{"question_id", q.question_id}, {"mode", q.mode}};
        if (q.metrics) {
            j["ndcg"] = metric_map(q.metrics->ndcg_at, "@");
            j["recall"] = metric_map(q.metrics->recall_at, "@");
            j["input_tokens"] = q.metrics->input_tokens;
            j["evidence_tokens"] = q.metrics->evidence_tokens;
        }
        if (!q.predicted.empty()) j["predicted"] = q.predicted;
        if (!q.evidence_ids.empty()) j["evidence_ids"] = q.evidence_ids;
        if (q.error) j["error"] = *q.error;
        results.push_back(std::move(j));
    }
    const auto& s = r.summary;
    json summary{{"questions", s.questions},
                 {"evaluated", s.evaluated},
                 {"errors", s.errors},
                 {"mean_ndcg", metric_map(s.mean_ndcg_at, "@")},
                 {"mean_recall", metric_map(s.mean_recall_at, "@")},
                 {"total_input_tokens", s.total_input_tokens},
                 {"total_evidence_tokens", s.total_evidence_tokens}};
    return {{"format", "aqa-report"}, {"version", 1}, {"config", r.config}, {"summary", summary},
            {"results", results}};
}

BenchmarkReport run_benchmark(const std::vector<aggdb::AggregativeQuestion>& questions,
                              const probe::RetrievalConfig& cfg, const probe::Retriever& retriever,
                              const corpus::CorpusStore& store, clients::ChatClient& client,
                              const BenchmarkOptions& options) {
    cfg.validate();
    BenchmarkReport report;
    report.config = probe::to_json(cfg);
    report.config["gain"] = gain_name(options.gain);
    report.config["seed"] = options.seed;

    std::vector<const aggdb::AggregativeQuestion*> order;
    for (const auto& q : questions) order.push_back(&q);
    std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });

    for (const auto* q : order) {
        QuestionResult r;
        r.question_id = q->id;
        r.mode = std::string(probe::retrieval_mode_name(cfg.mode));
        try {
            const std::uint64_t seed = options.seed ^ fnv1a64(q->id);
            const auto before = client.total_usage();
            const auto evidence = probe::retrieve(cfg, retriever, q->question_text, client, q->supporting_ids, seed);
            const auto ids = evidence.ids();
            const auto context = render_context(ids, store, cfg.granularity);
            const auto predicted = rank_candidates(q->question_text, values_of(*q), context, client);
            RankingMetrics m;
            const auto grades = grades_of(*q);
            for (auto k : kNdcgKs) m.ndcg_at[k] = ndcg_at_k(predicted, grades, k, options.gain);
            const std::set<std::string> oracle(q->supporting_ids.begin(), q->supporting_ids.end());
            if (!oracle.empty()) {
                for (auto k : kRecallKs) {
                    if (k <= cfg.final_k) m.recall_at[k] = recall_at_k(ids, oracle, k);
                }
            }
            m.input_tokens = client.total_usage().input_tokens - before.input_tokens;
            m.evidence_tokens = evidence.token_total;
            r.metrics = std::move(m);
            if (options.keep_details) {
                r.predicted = predicted;
                r.evidence_ids = ids;
            }
        } catch (const Error& e) {
            r.error = e.what();
        }
        report.results.push_back(std::move(r));
    }
    report.summary = summarize(report.results);
    return report;
}

std::vector<QCResult> run_qc(const std::vector<aggdb::AggregativeQuestion>& questions,
                             const corpus::CorpusStore& store, clients::ChatClient& client, const QCOptions& options) {
    if (options.context_k == 0) throw InvalidArgument("context_k must be positive");
    std::vector<QCResult> out;
    for (const auto& q : questions) {
        QCResult r;
        r.question_id = q.id;
        try {
            const auto grades = grades_of(q);
            const auto candidates = values_of(q);
            std::vector<std::string> ids = q.supporting_ids;
            Rng rng(options.seed ^ fnv1a64(q.id));
            rng.shuffle(ids);
            if (ids.size() > options.context_k) ids.resize(options.context_k);

            auto score = [&](const std::string& context) {
                return ndcg_at_k(rank_candidates(q.question_text, candidates, context, client), grades, options.k,
                                 options.gain);
            };
            const double none = score("");
            const double raw = score(render_context(ids, store, index::TextGranularity::Raw));
            const double summary = score(render_context(ids, store, index::TextGranularity::Summary));
            std::vector<std::uint64_t> g;
            for (const auto& c : q.candidates) g.push_back(c.grade);
            const auto base = random_baseline(g, options.k, options.trials, options.seed, options.gain);
            r.decision = qc_filter(none, raw, summary, base.mean, base.std);
        } catch (const Error& e) {
            r.error = e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

json to_json(const QCResult& r) {
    json j{{"question_id", r.question_id}};
    if (r.decision) {
        const auto& d = *r.decision;
        j["s_no_context"] = d.s_no_context;
        j["s_raw_context"] = d.s_raw_context;
        j["s_summary_context"] = d.s_summary_context;
        j["s_context"] = d.s_context;
        j["s_random"] = d.s_random;
        j["s_std"] = d.s_std;
        j["s_threshold"] = d.s_threshold;
        j["z"] = d.z;
        j["keep"] = d.keep;
    }
    if (r.error) j["error"] = *r.error;
    return j;
}

}  // namespace aqa::eval
