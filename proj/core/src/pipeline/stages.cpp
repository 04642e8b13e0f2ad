#include "aqa/pipeline/stages.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "aqa/aggdb/aggdb.hpp"
#include "aqa/aggdb/question.hpp"
#include "aqa/corpus/filters.hpp"
#include "aqa/corpus/ingest.hpp"
#include "aqa/eval/benchmark.hpp"
#include "aqa/index/bm25.hpp"
#include "aqa/index/dense.hpp"
#include "aqa/proposer/keywords.hpp"
#include "aqa/hash.hpp"
#include "aqa/random.hpp"
#include "aqa/taxonomy/kmeans.hpp"

namespace aqa::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace artifacts {

std::string index_dir(probe::Backend b, index::TextGranularity g) {
    return "index/" + std::string(probe::backend_name(b)) + "-" + std::string(index::granularity_name(g));
}

std::string evidence_file(const probe::RetrievalConfig& r) { return "evidence/" + retrieval_name(r) + ".jsonl"; }
std::string report_file(const probe::RetrievalConfig& r) { return "reports/" + retrieval_name(r) + ".json"; }

}  // namespace artifacts

namespace {

constexpr std::pair<Stage, std::string_view> kStageNames[] = {
    {Stage::Ingest, "ingest"},     {Stage::Dedup, "dedup"},         {Stage::Keywords, "keywords"},
    {Stage::Taxonomy, "taxonomy"}, {Stage::Chunk, "chunk"},         {Stage::Index, "index"},
    {Stage::Propose, "propose"},   {Stage::Questions, "questions"}, {Stage::Qc, "qc"},
    {Stage::Retrieve, "retrieve"}, {Stage::Evaluate, "evaluate"},   {Stage::Report, "report"},
};

// Writes through a temporary file so a failed stage leaves no partial output.
template <typename Fn>
void write_atomic(const fs::path& path, Fn&& fn) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        fn(out);
        if (!out) throw Error("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) {
    write_atomic(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

void write_store(const fs::path& path, const corpus::CorpusStore& store) {
    write_atomic(path, [&](std::ostream& out) { store.save_jsonl(out); });
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("'" + path.string() + "': " + e.what());
    }
}

struct Ctx {
    const PipelineConfig& cfg;
    Manifest& m;
    const StageOptions& opts;

    fs::path at(const std::string& a) const { return m.path(a); }
    void need(const std::string& a, Stage producer) const { m.require(a, std::string(stage_name(producer)), opts.force); }
    corpus::CorpusStore store(const std::string& a, Stage producer) const {
        need(a, producer);
        return corpus::CorpusStore::load_jsonl(at(a).string());
    }
};

std::string external_input(const Ctx& c, const fs::path& p) { return c.m.key_of(fs::absolute(p)); }

StageResult ingest_stage(const Ctx& c) {
    StageResult r;
    std::vector<std::string> inputs;
    fs::path source;
    if (c.cfg.input) {
        source = *c.cfg.input;
        inputs.push_back(external_input(c, source));
    } else {
        const auto synth = corpus::generate_synthetic(c.cfg.synthetic);
        write_atomic(c.at(artifacts::kSyntheticCorpus), [&](std::ostream& o) { corpus::write_synthetic_jsonl(synth, o); });
        write_atomic(c.at(artifacts::kSyntheticKinds), [&](std::ostream& o) { corpus::write_keyword_kinds(synth, o); });
        c.m.record(artifacts::kSyntheticCorpus, "ingest", {}, to_json(c.cfg)["synthetic"]);
        c.m.record(artifacts::kSyntheticKinds, "ingest", {}, to_json(c.cfg)["synthetic"]);
        source = c.at(artifacts::kSyntheticCorpus);
        inputs.push_back(artifacts::kSyntheticCorpus);
        r.outputs = {artifacts::kSyntheticCorpus, artifacts::kSyntheticKinds};
    }
    std::ifstream in(source);
    if (!in) throw NotFound("cannot open input corpus '" + source.string() + "'");
    corpus::CorpusStore store;
    const auto rep = corpus::ingest(in, store);
    write_store(c.at(artifacts::kIngested), store);
    json rejected = json::array();
    for (const auto& e : rep.rejected) rejected.push_back({{"line", e.line}, {"error", e.message}});
    write_json(c.at(artifacts::kIngestReport), {{"accepted", rep.accepted}, {"rejected", rejected}});
    c.m.record(artifacts::kIngested, "ingest", inputs);
    c.m.record(artifacts::kIngestReport, "ingest", inputs);
    r.outputs.push_back(artifacts::kIngested);
    r.outputs.push_back(artifacts::kIngestReport);
    r.item_errors = rep.rejected.size();
    r.summary = std::to_string(rep.accepted) + " accepted, " + std::to_string(rep.rejected.size()) + " rejected";
    return r;
}

StageResult dedup_stage(const Ctx& c) {
    const auto store = c.store(artifacts::kIngested, Stage::Ingest);
    corpus::DedupResult dr;
    const auto deduped = corpus::dedup_store(store, c.cfg.minhash, c.cfg.lsh, &dr);
    const auto short_enough = corpus::filter_by_length(deduped, c.cfg.max_tokens);
    const auto active = corpus::filter_active_users(short_enough, c.cfg.min_sessions);
    write_store(c.at(artifacts::kClean), active);
    std::size_t multi = 0;
    for (const auto& cl : dr.clusters) multi += cl.size() > 1;
    write_json(c.at(artifacts::kDedupReport), {{"input", store.size()},
                                               {"after_dedup", deduped.size()},
                                               {"after_length", short_enough.size()},
                                               {"after_active_users", active.size()},
                                               {"duplicate_clusters", multi},
                                               {"candidate_pairs", dr.candidate_pairs},
                                               {"verified_pairs", dr.verified_pairs}});
    const json params = {{"dedup", to_json(c.cfg)["dedup"]}, {"filters", to_json(c.cfg)["filters"]}};
    c.m.record(artifacts::kClean, "dedup", {artifacts::kIngested}, params);
    c.m.record(artifacts::kDedupReport, "dedup", {artifacts::kIngested}, params);
    StageResult r;
    r.outputs = {artifacts::kClean, artifacts::kDedupReport};
    r.summary = std::to_string(store.size()) + " -> " + std::to_string(deduped.size()) + " (dedup) -> " +
                std::to_string(short_enough.size()) + " (length) -> " + std::to_string(active.size()) +
                " (active users)";
    return r;
}

std::optional<fs::path> kinds_path(const Ctx& c) {
    if (c.cfg.keyword_kinds) return *c.cfg.keyword_kinds;
    if (!c.cfg.input && fs::exists(c.at(artifacts::kSyntheticKinds))) return c.at(artifacts::kSyntheticKinds);
    return std::nullopt;
}

StageResult keywords_stage(const Ctx& c) {
    const auto store = c.store(artifacts::kClean, Stage::Dedup);
    std::vector<std::string> inputs{artifacts::kClean};
    std::map<std::string, std::string> kinds;
    if (const auto kp = kinds_path(c)) {
        kinds = proposer::load_keyword_kinds(kp->string());
        inputs.push_back(external_input(c, fs::absolute(*kp)));
    }
    const auto groups = proposer::merge_keywords(proposer::collect_keywords(store, kinds));
    const auto canonical = proposer::canonicalize_keywords(store, groups);
    write_store(c.at(artifacts::kKeywords), canonical);
    write_json(c.at(artifacts::kKeywordGroups), proposer::to_json(groups));
    c.m.record(artifacts::kKeywords, "keywords", inputs);
    c.m.record(artifacts::kKeywordGroups, "keywords", inputs);
    std::size_t raw = 0;
    for (const auto& g : groups) raw += g.members.size();
    StageResult r;
    r.outputs = {artifacts::kKeywords, artifacts::kKeywordGroups};
    r.summary = std::to_string(raw) + " raw keywords in " + std::to_string(groups.size()) + " groups";
    return r;
}

StageResult taxonomy_stage(const Ctx& c) {
    auto store = c.store(artifacts::kKeywords, Stage::Keywords);
    StageResult r;
    const json params = to_json(c.cfg)["taxonomy"];
    if (!c.cfg.taxonomy_enabled || store.empty()) {
        write_store(c.at(artifacts::kFinal), store);
        c.m.record(artifacts::kFinal, "taxonomy", {artifacts::kKeywords}, params);
        r.outputs = {artifacts::kFinal};
        r.summary = "taxonomy disabled, corpus passed through";
        return r;
    }
    auto client = make_chat_client(c.cfg, store);
    auto embedder = make_embedder(c.cfg);

    std::vector<std::size_t> sample(store.size());
    for (std::size_t i = 0; i < sample.size(); ++i) sample[i] = i;
    Rng rng(c.cfg.seed);
    rng.shuffle(sample);
    if (sample.size() > c.cfg.taxonomy_sample) sample.resize(c.cfg.taxonomy_sample);
    std::sort(sample.begin(), sample.end());
    std::vector<std::string> summaries;
    for (auto i : sample) summaries.push_back(store.conversations()[i].summary_or_text());

    auto tparams = c.cfg.taxonomy;
    tparams.seed = c.cfg.seed;
    const auto run = taxonomy::generate_taxonomy(summaries, embedder->embed(summaries), tparams, *client);

    std::vector<taxonomy::LabelAssignment> assigned;
    std::vector<std::string> errors;
    std::size_t filled = 0;
    if (!run.taxonomy.labels.empty()) {
        for (const auto& s : summaries) {
            try {
                assigned.push_back(taxonomy::assign_labels(s, run.taxonomy, *client));
            } catch (const Error& e) {
                errors.push_back(e.what());
            }
        }
        // Conversations without topics take the assigned labels.
        std::vector<corpus::Conversation> convs = store.conversations();
        for (auto& conv : convs) {
            if (!conv.topics.empty()) continue;
            try {
                const auto a = taxonomy::assign_labels(conv.summary_or_text(), run.taxonomy, *client);
                for (const auto& l : a.labels) {
                    if (l != taxonomy::kUndefinedLabel) conv.topics.push_back(l);
                }
                filled += !conv.topics.empty();
            } catch (const Error& e) {
                errors.push_back(conv.id + ": " + e.what());
            }
        }
        store = corpus::CorpusStore(std::move(convs));
    }
    json quality = nullptr;
    if (!assigned.empty()) {
        const auto q = taxonomy::quality_score(assigned);
        quality = {{"coverage", q.coverage}, {"certainty", q.certainty}, {"quality", q.quality}};
    }
    fs::create_directories(c.at(artifacts::kTaxonomy).parent_path());
    save_taxonomy(c.at(artifacts::kTaxonomy).string(), run.taxonomy);
    write_json(c.at(artifacts::kTaxonomyReport), {{"rounds", run.rounds},
                                                  {"scores", run.scores},
                                                  {"stop_reason", run.stop_reason},
                                                  {"labels", run.taxonomy.labels.size()},
                                                  {"sample", summaries.size()},
                                                  {"quality", quality},
                                                  {"filled_topics", filled},
                                                  {"errors", errors}});
    write_store(c.at(artifacts::kFinal), store);
    for (const char* a : {artifacts::kTaxonomy, artifacts::kTaxonomyReport, artifacts::kFinal}) {
        c.m.record(a, "taxonomy", {artifacts::kKeywords}, params);
    }
    r.outputs = {artifacts::kTaxonomy, artifacts::kTaxonomyReport, artifacts::kFinal};
    r.item_errors = errors.size();
    std::ostringstream s;
    s << run.taxonomy.labels.size() << " labels after " << run.rounds << " rounds (" << run.stop_reason << ")";
    if (!quality.is_null()) s << ", quality " << quality["quality"].get<double>();
    r.summary = s.str();
    return r;
}

std::vector<corpus::Chunk> read_chunks(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw NotFound("cannot open '" + p.string() + "'");
    std::vector<corpus::Chunk> out;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(corpus::chunk_from_json(json::parse(line)));
    }
    return out;
}

StageResult chunk_stage(const Ctx& c) {
    const auto store = c.store(artifacts::kFinal, Stage::Taxonomy);
    std::size_t n = 0;
    write_atomic(c.at(artifacts::kChunks), [&](std::ostream& out) {
        for (const auto& conv : store) {
            for (const auto& ch : corpus::chunk(conv, c.cfg.chunking)) {
                out << corpus::to_json(ch).dump() << '\n';
                ++n;
            }
        }
    });
    c.m.record(artifacts::kChunks, "chunk", {artifacts::kFinal}, to_json(c.cfg)["chunk"]);
    StageResult r;
    r.outputs = {artifacts::kChunks};
    r.summary = std::to_string(n) + " chunks from " + std::to_string(store.size()) + " conversations";
    return r;
}

std::vector<std::pair<probe::Backend, index::TextGranularity>> needed_indexes(const PipelineConfig& cfg) {
    std::set<std::pair<probe::Backend, index::TextGranularity>> s;
    for (const auto& r : cfg.retrieval) s.emplace(r.backend, r.granularity);
    return {s.begin(), s.end()};
}

StageResult index_stage(const Ctx& c) {
    const auto store = c.store(artifacts::kFinal, Stage::Taxonomy);
    StageResult r;
    std::unique_ptr<clients::Embedder> embedder;
    for (const auto& [backend, g] : needed_indexes(c.cfg)) {
        std::vector<std::string> inputs{artifacts::kFinal};
        std::vector<index::IndexDocument> docs;
        if (g == index::TextGranularity::Raw) {
            c.need(artifacts::kChunks, Stage::Chunk);
            docs = index::documents_from_chunks(store, read_chunks(c.at(artifacts::kChunks)));
            inputs.push_back(artifacts::kChunks);
        } else {
            docs = index::make_documents(store, g);
        }
        const auto dir = artifacts::index_dir(backend, g);
        const auto tmp = c.at(dir + ".tmp");
        fs::remove_all(tmp);
        if (backend == probe::Backend::Bm25) {
            index::Bm25Index(std::move(docs)).save(tmp.string());
        } else {
            if (!embedder) embedder = make_embedder(c.cfg);
            std::vector<std::string> texts;
            for (const auto& d : docs) texts.push_back(d.text);
            const auto vectors = embedder->embed(texts);
            index::DenseIndex(std::move(docs), vectors).save(tmp.string());
        }
        fs::remove_all(c.at(dir));
        fs::rename(tmp, c.at(dir));
        c.m.record(dir, "index", inputs, {{"embedding_dim", c.cfg.client.embedding_dim}});
        r.outputs.push_back(dir);
    }
    r.summary = std::to_string(r.outputs.size()) + " index(es) built";
    return r;
}

fs::path combos_path(const PipelineConfig& cfg) {
    return cfg.combos ? *cfg.combos : fs::path(proposer::default_combos_path());
}

StageResult propose_stage(const Ctx& c) {
    const auto store = c.store(artifacts::kFinal, Stage::Taxonomy);
    const auto cpath = combos_path(c.cfg);
    const auto combos = proposer::load_combos(cpath.string());
    const aggdb::AggDb db(store);
    const auto all = proposer::enumerate_proposals(db, combos, c.cfg.admission);
    const auto sampled = proposer::sample_proposals(all, c.cfg.seed, c.cfg.per_key);
    write_atomic(c.at(artifacts::kProposals), [&](std::ostream& out) { proposer::write_proposals(out, sampled); });
    std::size_t admitted = 0;
    for (const auto& [_, l] : all) admitted += l.size();
    c.m.record(artifacts::kProposals, "propose", {artifacts::kFinal, external_input(c, fs::absolute(cpath))},
               to_json(c.cfg)["questions"]);
    StageResult r;
    r.outputs = {artifacts::kProposals};
    r.summary = std::to_string(admitted) + " admitted proposals over " + std::to_string(all.size()) +
                " top-1 values, " + std::to_string(sampled.size()) + " sampled";
    return r;
}

StageResult questions_stage(const Ctx& c) {
    const auto store = c.store(artifacts::kFinal, Stage::Taxonomy);
    c.need(artifacts::kProposals, Stage::Propose);
    std::ifstream in(c.at(artifacts::kProposals));
    const auto proposals = proposer::read_proposals(in);
    const aggdb::AggDb db(store);
    auto client = make_chat_client(c.cfg, store);
    proposer::QuestionBuildParams qp;
    qp.candidates = c.cfg.candidates;
    qp.max_questions = c.cfg.max_questions;
    qp.seed = c.cfg.seed;
    const auto built = proposer::build_questions(db, proposals, *client, qp);
    write_atomic(c.at(artifacts::kQuestionsRaw), [&](std::ostream& out) { aggdb::write_questions(out, built.questions); });
    c.m.record(artifacts::kQuestionsRaw, "questions", {artifacts::kFinal, artifacts::kProposals},
               to_json(c.cfg)["questions"]);
    StageResult r;
    r.outputs = {artifacts::kQuestionsRaw};
    r.item_errors = built.errors.size();
    r.summary = std::to_string(built.questions.size()) + " questions, " + std::to_string(built.skipped) +
                " proposals skipped, " + std::to_string(built.errors.size()) + " errors";
    return r;
}

StageResult qc_stage(const Ctx& c) {
    const auto store = c.store(artifacts::kFinal, Stage::Taxonomy);
    c.need(artifacts::kQuestionsRaw, Stage::Questions);
    const auto questions = aggdb::read_questions(c.at(artifacts::kQuestionsRaw).string());
    StageResult r;
    std::vector<aggdb::AggregativeQuestion> kept;
    const json params = to_json(c.cfg)["qc"];
    if (!c.cfg.qc_enabled) {
        kept = questions;
        write_atomic(c.at(artifacts::kQc), [](std::ostream&) {});
    } else {
        auto client = make_chat_client(c.cfg, store);
        eval::QCOptions qo;
        qo.context_k = c.cfg.qc_context_k;
        qo.trials = c.cfg.qc_trials;
        qo.seed = c.cfg.seed;
        qo.gain = c.cfg.gain;
        const auto results = eval::run_qc(questions, store, *client, qo);
        write_atomic(c.at(artifacts::kQc), [&](std::ostream& out) {
            for (const auto& q : results) out << eval::to_json(q).dump() << '\n';
        });
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (results[i].error) ++r.item_errors;
            else if (results[i].decision->keep) kept.push_back(questions[i]);
        }
    }
    write_atomic(c.at(artifacts::kQuestions), [&](std::ostream& out) { aggdb::write_questions(out, kept); });
    for (const char* a : {artifacts::kQc, artifacts::kQuestions}) {
        c.m.record(a, "qc", {artifacts::kFinal, artifacts::kQuestionsRaw}, params);
    }
    r.outputs = {artifacts::kQc, artifacts::kQuestions};
    r.summary = std::to_string(kept.size()) + " of " + std::to_string(questions.size()) + " questions kept";
    return r;
}

struct Loaded {
    std::shared_ptr<const index::Bm25Index> bm25;
    std::shared_ptr<const index::DenseIndex> dense;
};

probe::Retriever open_retriever(const Ctx& c, const probe::RetrievalConfig& rc, clients::Embedder& embedder,
                                Loaded& keep, std::string& dir) {
    dir = artifacts::index_dir(rc.backend, rc.granularity);
    c.need(dir, Stage::Index);
    if (rc.backend == probe::Backend::Bm25) {
        keep.bm25 = std::make_shared<index::Bm25Index>(index::Bm25Index::load(c.at(dir).string()));
        return probe::Retriever::bm25(keep.bm25);
    }
    keep.dense = std::make_shared<index::DenseIndex>(index::DenseIndex::load(c.at(dir).string()));
    return probe::Retriever::dense(keep.dense, embedder);
}

StageResult retrieve_stage(const Ctx& c) {
    const auto store = c.store(artifacts::kFinal, Stage::Taxonomy);
    c.need(artifacts::kQuestions, Stage::Qc);
    const auto questions = aggdb::read_questions(c.at(artifacts::kQuestions).string());
    auto client = make_chat_client(c.cfg, store);
    auto embedder = make_embedder(c.cfg);
    StageResult r;
    for (const auto& rc : c.cfg.retrieval) {
        Loaded keep;
        std::string dir;
        const auto retriever = open_retriever(c, rc, *embedder, keep, dir);
        const auto file = artifacts::evidence_file(rc);
        write_atomic(c.at(file), [&](std::ostream& out) {
            for (const auto& q : questions) {
                json j{{"question_id", q.id}};
                try {
                    probe::BroadQuerySet bqs;
                    const auto ev = probe::retrieve(rc, retriever, q.question_text, *client, q.supporting_ids,
                                                    c.cfg.seed ^ fnv1a64(q.id), &bqs);
                    if (!bqs.queries.empty()) j["queries"] = probe::to_json(bqs);
                    j["evidence"] = probe::to_json(ev);
                } catch (const Error& e) {
                    j["error"] = e.what();
                    ++r.item_errors;
                }
                out << j.dump() << '\n';
            }
        });
        c.m.record(file, "retrieve", {artifacts::kFinal, artifacts::kQuestions, dir}, probe::to_json(rc));
        r.outputs.push_back(file);
    }
    r.summary = std::to_string(questions.size()) + " questions x " + std::to_string(c.cfg.retrieval.size()) +
                " retrieval setting(s)";
    return r;
}

StageResult evaluate_stage(const Ctx& c) {
    const auto store = c.store(artifacts::kFinal, Stage::Taxonomy);
    c.need(artifacts::kQuestions, Stage::Qc);
    // Fail on a missing index before any model call.
    for (const auto& rc : c.cfg.retrieval) c.need(artifacts::index_dir(rc.backend, rc.granularity), Stage::Index);
    const auto questions = aggdb::read_questions(c.at(artifacts::kQuestions).string());
    auto embedder = make_embedder(c.cfg);
    StageResult r;
    std::ostringstream summary;
    for (const auto& rc : c.cfg.retrieval) {
        auto client = make_chat_client(c.cfg, store);
        Loaded keep;
        std::string dir;
        const auto retriever = open_retriever(c, rc, *embedder, keep, dir);
        eval::BenchmarkOptions bo;
        bo.gain = c.cfg.gain;
        bo.seed = c.cfg.seed;
        const auto report = eval::run_benchmark(questions, rc, retriever, store, *client, bo);
        const auto file = artifacts::report_file(rc);
        write_json(c.at(file), eval::to_json(report));
        c.m.record(file, "evaluate", {artifacts::kFinal, artifacts::kQuestions, dir}, probe::to_json(rc));
        r.outputs.push_back(file);
        r.item_errors += report.summary.errors;
        const auto it = report.summary.mean_ndcg_at.find(5);
        summary << (summary.tellp() > 0 ? "; " : "") << retrieval_name(rc) << " NDCG@5 "
                << (it == report.summary.mean_ndcg_at.end() ? 0.0 : it->second);
    }
    r.summary = summary.str();
    return r;
}

StageResult report_stage(const Ctx& c) {
    json runs = json::object();
    std::vector<std::string> inputs;
    for (const auto& rc : c.cfg.retrieval) {
        const auto file = artifacts::report_file(rc);
        c.need(file, Stage::Evaluate);
        const json rep = read_json(c.at(file));
        runs[retrieval_name(rc)] = {{"config", rep.at("config")}, {"summary", rep.at("summary")}};
        inputs.push_back(file);
    }
    std::size_t questions = 0;
    if (fs::exists(c.at(artifacts::kQuestions))) {
        questions = aggdb::read_questions(c.at(artifacts::kQuestions).string()).size();
    }
    write_json(c.at(artifacts::kReport), {{"format", "aqa-summary"}, {"version", 1}, {"questions", questions}, {"runs", runs}});
    c.m.record(artifacts::kReport, "report", inputs);
    StageResult r;
    r.outputs = {artifacts::kReport};
    r.summary = std::to_string(runs.size()) + " run(s) summarized";
    return r;
}

}  // namespace

std::string_view stage_name(Stage s) noexcept {
    for (const auto& [st, name] : kStageNames) {
        if (st == s) return name;
    }
    return "?";
}

Stage parse_stage(std::string_view name) {
    for (const auto& [st, n] : kStageNames) {
        if (n == name) return st;
    }
    throw InvalidArgument("unknown stage '" + std::string(name) + "'");
}

StageResult run_stage(Stage s, const PipelineConfig& cfg, const StageOptions& opts) {
    cfg.validate();
    Manifest m(cfg.work_dir);
    const Ctx c{cfg, m, opts};
    StageResult r;
    switch (s) {
        case Stage::Ingest: r = ingest_stage(c); break;
        case Stage::Dedup: r = dedup_stage(c); break;
        case Stage::Keywords: r = keywords_stage(c); break;
        case Stage::Taxonomy: r = taxonomy_stage(c); break;
        case Stage::Chunk: r = chunk_stage(c); break;
        case Stage::Index: r = index_stage(c); break;
        case Stage::Propose: r = propose_stage(c); break;
        case Stage::Questions: r = questions_stage(c); break;
        case Stage::Qc: r = qc_stage(c); break;
        case Stage::Retrieve: r = retrieve_stage(c); break;
        case Stage::Evaluate: r = evaluate_stage(c); break;
        case Stage::Report: r = report_stage(c); break;
    }
    r.stage = s;
    return r;
}

std::vector<StageResult> run_pipeline(const PipelineConfig& cfg, const StageOptions& opts) {
    std::vector<StageResult> out;
    for (auto s : kAllStages) out.push_back(run_stage(s, cfg, opts));
    return out;
}

}  // namespace aqa::pipeline
