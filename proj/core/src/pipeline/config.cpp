#include "aqa/pipeline/config.hpp"

#include <fstream>
#include <set>

#include "aqa/clients/http.hpp"
#include "aqa/clients/mock.hpp"
#include "aqa/clients/prompts.hpp"
#include "aqa/error.hpp"

namespace aqa::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads known keys of one JSON object and rejects the rest.
class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw ParseError("config section '" + name_ + "' must be an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return;
        try {
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw ParseError("config key '" + name_ + "." + key + "': " + e.what());
        }
    }

    void path(const char* key, std::optional<fs::path>& out, const fs::path& base) {
        std::string s;
        get(key, s);
        if (!s.empty()) out = resolve(s, base);
    }

    const json* sub(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() || it->is_null() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& [k, _] : j_.items()) {
            if (!seen_.count(k)) throw ParseError("unknown config key '" + name_ + (name_.empty() ? "" : ".") + k + "'");
        }
    }

    static fs::path resolve(const std::string& s, const fs::path& base) {
        fs::path p(s);
        return p.is_relative() && !base.empty() ? base / p : p;
    }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

std::string client_kind_name(ClientKind k) {
    switch (k) {
        case ClientKind::Mock: return "mock";
        case ClientKind::Http: return "http";
        case ClientKind::Replay: return "replay";
    }
    return "mock";
}

ClientKind parse_client_kind(const std::string& s) {
    if (s == "mock") return ClientKind::Mock;
    if (s == "http") return ClientKind::Http;
    if (s == "replay") return ClientKind::Replay;
    throw ParseError("unknown client kind '" + s + "' (expected mock, http or replay)");
}

json opt_path(const std::optional<fs::path>& p) { return p ? json(p->generic_string()) : json(nullptr); }

void require_positive(std::size_t v, const char* what) {
    if (v == 0) throw InvalidArgument(std::string(what) + " must be positive");
}

}  // namespace

void PipelineConfig::validate() const {
    if (input && !fs::exists(*input)) throw InvalidArgument("input corpus '" + input->string() + "' does not exist");
    if (keyword_kinds && !fs::exists(*keyword_kinds)) {
        throw InvalidArgument("keyword kinds file '" + keyword_kinds->string() + "' does not exist");
    }
    if (combos && !fs::exists(*combos)) throw InvalidArgument("combos file '" + combos->string() + "' does not exist");
    if (prompts_dir && !fs::is_directory(*prompts_dir)) {
        throw InvalidArgument("prompts directory '" + prompts_dir->string() + "' does not exist");
    }
    if (client.kind == ClientKind::Replay && (!client.replay_log || !fs::exists(*client.replay_log))) {
        throw InvalidArgument("replay client needs an existing client.replay_log");
    }
    if (lsh.bands * lsh.rows != minhash.num_perm) {
        throw InvalidArgument("dedup bands * rows must equal num_perm");
    }
    require_positive(chunking.max_tokens, "chunk.max_tokens");
    if (chunking.overlap >= chunking.max_tokens) throw InvalidArgument("chunk.overlap must be below chunk.max_tokens");
    require_positive(candidates, "questions.candidates");
    require_positive(per_key, "questions.per_key");
    require_positive(qc_context_k, "qc.context_k");
    require_positive(qc_trials, "qc.trials");
    require_positive(client.embedding_dim, "client.embedding_dim");
    std::set<std::string> names;
    for (const auto& r : retrieval) {
        r.validate();
        if (!names.insert(retrieval_name(r)).second) {
            throw InvalidArgument("retrieval setting '" + retrieval_name(r) + "' is listed twice");
        }
    }
}

json to_json(const PipelineConfig& c) {
    const auto& s = c.synthetic;
    json retrieval = json::array();
    for (const auto& r : c.retrieval) retrieval.push_back(probe::to_json(r));
    return {
        {"version", kConfigVersion},
        {"work_dir", c.work_dir.generic_string()},
        {"input", opt_path(c.input)},
        {"keyword_kinds", opt_path(c.keyword_kinds)},
        {"seed", c.seed},
        {"synthetic",
         {{"conversations", s.conversations},
          {"active_users", s.active_users},
          {"inactive_users", s.inactive_users},
          {"seed", s.seed},
          {"duplicate_rate", s.duplicate_rate},
          {"long_rate", s.long_rate},
          {"keyword_variant_rate", s.keyword_variant_rate},
          {"second_topic_rate", s.second_topic_rate},
          {"topic_mention_rate", s.topic_mention_rate},
          {"min_turns", s.min_turns},
          {"max_turns", s.max_turns},
          {"start_month", s.start_month},
          {"months", s.months}}},
        {"dedup",
         {{"shingle_size", c.minhash.shingle_size},
          {"num_perm", c.minhash.num_perm},
          {"minhash_seed", c.minhash.seed},
          {"bands", c.lsh.bands},
          {"rows", c.lsh.rows},
          {"threshold", c.lsh.threshold}}},
        {"filters", {{"max_tokens", c.max_tokens}, {"min_sessions", c.min_sessions}}},
        {"chunk", {{"max_tokens", c.chunking.max_tokens}, {"overlap", c.chunking.overlap}}},
        {"taxonomy",
         {{"enabled", c.taxonomy_enabled},
          {"sample", c.taxonomy_sample},
          {"max_rounds", c.taxonomy.max_rounds},
          {"batch_size", c.taxonomy.batch_size},
          {"num_clusters", c.taxonomy.num_clusters},
          {"patience", c.taxonomy.patience},
          {"min_classes", c.taxonomy.min_classes},
          {"kmeans_iterations", c.taxonomy.kmeans_iterations}}},
        {"questions",
         {{"combos", opt_path(c.combos)},
          {"min_support", c.admission.min_support},
          {"min_support_with_user", c.admission.min_support_with_user},
          {"min_top3_coverage", c.admission.min_top3_coverage},
          {"candidates", c.candidates},
          {"per_key", c.per_key},
          {"max_questions", c.max_questions}}},
        {"qc", {{"enabled", c.qc_enabled}, {"context_k", c.qc_context_k}, {"trials", c.qc_trials}}},
        {"retrieval", retrieval},
        {"eval", {{"gain", eval::gain_name(c.gain)}}},
        {"prompts_dir", opt_path(c.prompts_dir)},
        {"client",
         {{"kind", client_kind_name(c.client.kind)},
          {"embedding_dim", c.client.embedding_dim},
          {"replay_log", opt_path(c.client.replay_log)},
          {"mock_seed", c.client.mock_seed}}},
    };
}

PipelineConfig config_from_json(const json& j, const fs::path& base) {
    PipelineConfig c;
    Section top(j, "");
    int version = kConfigVersion;
    top.get("version", version);
    if (version != kConfigVersion) {
        throw ParseError("config version " + std::to_string(version) + " is not supported (expected " +
                         std::to_string(kConfigVersion) + ")");
    }
    std::string work;
    top.get("work_dir", work);
    if (!work.empty()) c.work_dir = Section::resolve(work, base);
    top.path("input", c.input, base);
    top.path("keyword_kinds", c.keyword_kinds, base);
    top.get("seed", c.seed);
    top.path("prompts_dir", c.prompts_dir, base);

    if (const json* sj = top.sub("synthetic")) {
        Section s(*sj, "synthetic");
        auto& p = c.synthetic;
        s.get("conversations", p.conversations);
        s.get("active_users", p.active_users);
        s.get("inactive_users", p.inactive_users);
        s.get("seed", p.seed);
        s.get("duplicate_rate", p.duplicate_rate);
        s.get("long_rate", p.long_rate);
        s.get("keyword_variant_rate", p.keyword_variant_rate);
        s.get("second_topic_rate", p.second_topic_rate);
        s.get("topic_mention_rate", p.topic_mention_rate);
        s.get("min_turns", p.min_turns);
        s.get("max_turns", p.max_turns);
        s.get("start_month", p.start_month);
        s.get("months", p.months);
        s.finish();
    }
    if (const json* dj = top.sub("dedup")) {
        Section s(*dj, "dedup");
        s.get("shingle_size", c.minhash.shingle_size);
        s.get("num_perm", c.minhash.num_perm);
        s.get("minhash_seed", c.minhash.seed);
        s.get("bands", c.lsh.bands);
        s.get("rows", c.lsh.rows);
        s.get("threshold", c.lsh.threshold);
        s.finish();
    }
    if (const json* fj = top.sub("filters")) {
        Section s(*fj, "filters");
        s.get("max_tokens", c.max_tokens);
        s.get("min_sessions", c.min_sessions);
        s.finish();
    }
    if (const json* cj = top.sub("chunk")) {
        Section s(*cj, "chunk");
        s.get("max_tokens", c.chunking.max_tokens);
        s.get("overlap", c.chunking.overlap);
        s.finish();
    }
    if (const json* tj = top.sub("taxonomy")) {
        Section s(*tj, "taxonomy");
        s.get("enabled", c.taxonomy_enabled);
        s.get("sample", c.taxonomy_sample);
        s.get("max_rounds", c.taxonomy.max_rounds);
        s.get("batch_size", c.taxonomy.batch_size);
        s.get("num_clusters", c.taxonomy.num_clusters);
        s.get("patience", c.taxonomy.patience);
        s.get("min_classes", c.taxonomy.min_classes);
        s.get("kmeans_iterations", c.taxonomy.kmeans_iterations);
        s.finish();
    }
    if (const json* qj = top.sub("questions")) {
        Section s(*qj, "questions");
        s.path("combos", c.combos, base);
        s.get("min_support", c.admission.min_support);
        s.get("min_support_with_user", c.admission.min_support_with_user);
        s.get("min_top3_coverage", c.admission.min_top3_coverage);
        s.get("candidates", c.candidates);
        s.get("per_key", c.per_key);
        s.get("max_questions", c.max_questions);
        s.finish();
    }
    if (const json* qj = top.sub("qc")) {
        Section s(*qj, "qc");
        s.get("enabled", c.qc_enabled);
        s.get("context_k", c.qc_context_k);
        s.get("trials", c.qc_trials);
        s.finish();
    }
    if (const json* rj = top.sub("retrieval")) {
        if (!rj->is_array()) throw ParseError("config key 'retrieval' must be a list");
        c.retrieval.clear();
        for (const auto& r : *rj) c.retrieval.push_back(probe::retrieval_config_from_json(r));
    }
    if (const json* ej = top.sub("eval")) {
        Section s(*ej, "eval");
        std::string gain = std::string(eval::gain_name(c.gain));
        s.get("gain", gain);
        try {
            c.gain = eval::parse_gain(gain);
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what());
        }
        s.finish();
    }
    if (const json* kj = top.sub("client")) {
        Section s(*kj, "client");
        std::string kind = client_kind_name(c.client.kind);
        s.get("kind", kind);
        c.client.kind = parse_client_kind(kind);
        s.get("embedding_dim", c.client.embedding_dim);
        s.path("replay_log", c.client.replay_log, base);
        s.get("mock_seed", c.client.mock_seed);
        s.finish();
    }
    top.finish();
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("config '" + path.string() + "': " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

std::string retrieval_name(const probe::RetrievalConfig& r) {
    return std::string(probe::retrieval_mode_name(r.mode)) + "-" + std::string(probe::backend_name(r.backend)) + "-" +
           std::string(index::granularity_name(r.granularity));
}

std::unique_ptr<clients::ChatClient> make_chat_client(const PipelineConfig& cfg, const corpus::CorpusStore& store) {
    auto prompts = clients::PromptLibrary::load(cfg.prompts_dir ? cfg.prompts_dir->string()
                                                                : clients::default_prompts_dir());
    std::unique_ptr<clients::ChatClient> client;
    switch (cfg.client.kind) {
        case ClientKind::Mock:
            client = std::make_unique<clients::MockChatClient>(
                std::move(prompts), clients::mock_policy_from_corpus(store, cfg.client.mock_seed));
            break;
        case ClientKind::Http:
            client = std::make_unique<clients::HttpChatClient>(std::move(prompts), clients::chat_config_from_env());
            break;
        case ClientKind::Replay:
            return std::make_unique<clients::ReplayChatClient>(
                std::move(prompts), std::make_shared<clients::ReplayLog>(cfg.client.replay_log->string()));
    }
    if (cfg.client.replay_log) client->attach_log(std::make_shared<clients::ReplayLog>(cfg.client.replay_log->string()));
    return client;
}

std::unique_ptr<clients::Embedder> make_embedder(const PipelineConfig& cfg) {
    if (cfg.client.kind == ClientKind::Http) {
        return std::make_unique<clients::HttpEmbedder>(clients::embed_config_from_env(), cfg.client.embedding_dim);
    }
    return std::make_unique<clients::MockEmbedder>(cfg.client.embedding_dim, cfg.client.mock_seed);
}

}  // namespace aqa::pipeline
