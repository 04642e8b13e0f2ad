// aqa: command line front end for the corpus, benchmark and evaluation stages.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "aqa/corpus/synthetic.hpp"
#include "aqa/error.hpp"
#include "aqa/pipeline/config.hpp"
#include "aqa/pipeline/stages.hpp"

namespace {

using aqa::pipeline::PipelineConfig;

struct Common {
    std::string config;
    std::string work_dir;
    bool force = false;
    std::optional<std::uint64_t> seed;
};

struct RetrievalFlags {
    std::string mode, backend, granularity;
    std::optional<std::size_t> final_k, per_query_k, max_n;

    bool any() const { return !mode.empty() || !backend.empty() || !granularity.empty() || final_k || per_query_k || max_n; }
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("-c,--config", c.config, "Pipeline config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("-w,--work-dir", c.work_dir, "Artifact directory (overrides the config)");
    sub->add_flag("-f,--force", c.force, "Accept stale inputs");
    sub->add_option("--seed", c.seed, "Pipeline seed (overrides the config)");
}

void add_retrieval(CLI::App* sub, RetrievalFlags& r) {
    sub->add_option("--mode", r.mode, "rag, probe, filter_only, question_and_filter or oracle");
    sub->add_option("--backend", r.backend, "bm25 or dense");
    sub->add_option("--granularity", r.granularity, "raw or summary");
    sub->add_option("--final-k", r.final_k, "Evidence conversations per question");
    sub->add_option("--per-query-k", r.per_query_k, "Depth of each generated query (0: final-k)");
    sub->add_option("--max-n", r.max_n, "Generated queries per question");
}

PipelineConfig effective_config(const Common& c, const RetrievalFlags* r) {
    PipelineConfig cfg = c.config.empty() ? PipelineConfig{} : aqa::pipeline::load_config(c.config);
    if (!c.work_dir.empty()) cfg.work_dir = c.work_dir;
    if (c.seed) cfg.seed = *c.seed;
    if (r && r->any()) {
        // Flags describe a single retrieval setting on top of the first configured one.
        aqa::probe::RetrievalConfig rc = cfg.retrieval.empty() ? aqa::probe::RetrievalConfig{} : cfg.retrieval.front();
        if (!r->mode.empty()) rc.mode = aqa::probe::parse_retrieval_mode(r->mode);
        if (!r->backend.empty()) rc.backend = aqa::probe::parse_backend(r->backend);
        if (!r->granularity.empty()) rc.granularity = aqa::index::parse_text_granularity(r->granularity);
        if (r->final_k) rc.final_k = *r->final_k;
        if (r->per_query_k) rc.per_query_k = *r->per_query_k;
        if (r->max_n) rc.max_n = *r->max_n;
        cfg.retrieval = {rc};
    }
    return cfg;
}

int report_results(const std::vector<aqa::pipeline::StageResult>& results) {
    std::size_t errors = 0;
    for (const auto& r : results) {
        std::cout << aqa::pipeline::stage_name(r.stage) << ": " << r.summary << '\n';
        errors += r.item_errors;
    }
    if (errors > 0) {
        std::cerr << "aqa: " << errors << " item error(s); see the stage reports\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Aggregative question answering: corpus preparation, benchmark construction, retrieval and evaluation"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    Common common;
    RetrievalFlags rflags;

    // synth
    aqa::corpus::SyntheticParams sp;
    std::string synth_out, synth_kinds;
    auto* synth = app.add_subcommand("synth", "Write a synthetic corpus with planted attribute distributions");
    synth->add_option("-o,--out", synth_out, "Output JSONL")->required();
    synth->add_option("--kinds-out", synth_kinds, "Keyword kinds TSV");
    synth->add_option("-n,--conversations", sp.conversations, "Conversations")->capture_default_str();
    synth->add_option("--active-users", sp.active_users, "Users above the activity threshold")->capture_default_str();
    synth->add_option("--inactive-users", sp.inactive_users, "Users below it")->capture_default_str();
    synth->add_option("--seed", sp.seed, "Generator seed")->capture_default_str();
    synth->add_option("--duplicate-rate", sp.duplicate_rate)->capture_default_str();
    synth->add_option("--start-month", sp.start_month)->capture_default_str();
    synth->add_option("--months", sp.months)->capture_default_str();

    // one subcommand per stage
    std::string ingest_input;
    std::map<CLI::App*, aqa::pipeline::Stage> stage_cmds;
    const std::map<aqa::pipeline::Stage, std::string> help = {
        {aqa::pipeline::Stage::Ingest, "Load the input corpus (synthetic when none is configured)"},
        {aqa::pipeline::Stage::Dedup, "Near-duplicate removal, length filter and active-user filter"},
        {aqa::pipeline::Stage::Keywords, "Canonicalize keyword spellings"},
        {aqa::pipeline::Stage::Taxonomy, "Generate a topic taxonomy, score it and fill missing topics"},
        {aqa::pipeline::Stage::Chunk, "Split transcripts into overlapping chunks"},
        {aqa::pipeline::Stage::Index, "Build BM25 and/or dense indexes"},
        {aqa::pipeline::Stage::Propose, "Enumerate and sample question proposals"},
        {aqa::pipeline::Stage::Questions, "Build graded candidates and question text"},
        {aqa::pipeline::Stage::Qc, "Drop questions that context does not help answer"},
        {aqa::pipeline::Stage::Retrieve, "Write retrieved evidence per question"},
        {aqa::pipeline::Stage::Evaluate, "Rank candidates with retrieved evidence and score them"},
        {aqa::pipeline::Stage::Report, "Summarize evaluation reports"},
    };
    for (auto s : aqa::pipeline::kAllStages) {
        auto* sub = app.add_subcommand(std::string(aqa::pipeline::stage_name(s)), help.at(s));
        add_common(sub, common);
        if (s == aqa::pipeline::Stage::Ingest) sub->add_option("-i,--input", ingest_input, "Corpus JSONL")->check(CLI::ExistingFile);
        if (s == aqa::pipeline::Stage::Index || s == aqa::pipeline::Stage::Retrieve ||
            s == aqa::pipeline::Stage::Evaluate || s == aqa::pipeline::Stage::Report) {
            add_retrieval(sub, rflags);
        }
        stage_cmds[sub] = s;
    }

    auto* pipeline = app.add_subcommand("pipeline", "Run every stage in order");
    add_common(pipeline, common);

    auto* show = app.add_subcommand("config", "Print the effective configuration");
    add_common(show, common);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            const auto corpus = aqa::corpus::generate_synthetic(sp);
            std::ofstream out(synth_out);
            if (!out) throw aqa::Error("cannot write '" + synth_out + "'");
            aqa::corpus::write_synthetic_jsonl(corpus, out);
            if (!synth_kinds.empty()) {
                std::ofstream kinds(synth_kinds);
                if (!kinds) throw aqa::Error("cannot write '" + synth_kinds + "'");
                aqa::corpus::write_keyword_kinds(corpus, kinds);
            }
            std::cout << "synth: " << corpus.conversations.size() << " conversations\n";
            return 0;
        }
        if (show->parsed()) {
            std::cout << aqa::pipeline::to_json(effective_config(common, nullptr)).dump(2) << '\n';
            return 0;
        }
        const aqa::pipeline::StageOptions opts{common.force};
        if (pipeline->parsed()) return report_results(aqa::pipeline::run_pipeline(effective_config(common, nullptr), opts));
        for (const auto& [sub, stage] : stage_cmds) {
            if (!sub->parsed()) continue;
            auto cfg = effective_config(common, &rflags);
            if (!ingest_input.empty()) cfg.input = ingest_input;
            return report_results({aqa::pipeline::run_stage(stage, cfg, opts)});
        }
    } catch (const aqa::Error& e) {
        std::cerr << "aqa: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "aqa: unexpected error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
