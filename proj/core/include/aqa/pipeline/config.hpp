#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqa/clients/chat.hpp"
#include "aqa/clients/embedder.hpp"
#include "aqa/corpus/chunker.hpp"
#include "aqa/corpus/conversation.hpp"
#include "aqa/corpus/dedup.hpp"
#include "aqa/corpus/minhash.hpp"
#include "aqa/corpus/synthetic.hpp"
#include "aqa/eval/metrics.hpp"
#include "aqa/probe/probe.hpp"
#include "aqa/proposer/proposals.hpp"
#include "aqa/taxonomy/taxonomy.hpp"

namespace aqa::pipeline {

inline constexpr int kConfigVersion = 1;

enum class ClientKind { Mock, Http, Replay };

struct ClientConfig {
    ClientKind kind = ClientKind::Mock;
    std::size_t embedding_dim = index::kDefaultEmbeddingDim;
    std::optional<std::filesystem::path> replay_log;  ///< recorded (http) or served (replay)
    std::uint64_t mock_seed = 0;
};

/// Everything a pipeline run depends on. Relative paths in a config file
/// resolve against the file's directory.
struct PipelineConfig {
    std::filesystem::path work_dir = "work";
    std::optional<std::filesystem::path> input;  ///< JSONL corpus; synthetic when absent
    corpus::SyntheticParams synthetic;
    std::optional<std::filesystem::path> keyword_kinds;
    std::uint64_t seed = 7;

    corpus::MinHashParams minhash;
    corpus::LshParams lsh;
    std::size_t max_tokens = 4096;
    std::size_t min_sessions = 10;
    corpus::ChunkParams chunking;

    bool taxonomy_enabled = true;
    taxonomy::TaxonomyParams taxonomy;
    std::size_t taxonomy_sample = 500;  ///< summaries fed to taxonomy generation

    std::optional<std::filesystem::path> combos;  ///< default combos file when absent
    proposer::AdmissionRules admission;
    std::size_t candidates = 10;
    std::size_t per_key = 2;
    std::size_t max_questions = 0;

    bool qc_enabled = true;
    std::size_t qc_context_k = 100;
    std::size_t qc_trials = 10000;

    std::vector<probe::RetrievalConfig> retrieval{probe::RetrievalConfig{}};
    eval::Gain gain = eval::Gain::Linear;

    std::optional<std::filesystem::path> prompts_dir;
    ClientConfig client;

    /// Throws InvalidArgument naming the offending setting or missing path.
    void validate() const;
};

nlohmann::json to_json(const PipelineConfig& c);
/// Unknown keys are rejected; missing keys keep their defaults.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// "probe-dense-summary"
std::string retrieval_name(const probe::RetrievalConfig& r);

std::unique_ptr<clients::ChatClient> make_chat_client(const PipelineConfig& cfg, const corpus::CorpusStore& store);
std::unique_ptr<clients::Embedder> make_embedder(const PipelineConfig& cfg);

}  // namespace aqa::pipeline
