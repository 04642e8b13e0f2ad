#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "aqa/pipeline/config.hpp"
#include "aqa/pipeline/manifest.hpp"

namespace aqa::pipeline {

/// Artifact paths inside the work directory.
namespace artifacts {
inline constexpr const char* kSyntheticCorpus = "corpus/synthetic.jsonl";
inline constexpr const char* kSyntheticKinds = "corpus/keyword_kinds.tsv";
inline constexpr const char* kIngested = "corpus/ingested.jsonl";
inline constexpr const char* kIngestReport = "corpus/ingest_report.json";
inline constexpr const char* kClean = "corpus/clean.jsonl";
inline constexpr const char* kDedupReport = "corpus/dedup_report.json";
inline constexpr const char* kKeywords = "corpus/keywords.jsonl";
inline constexpr const char* kKeywordGroups = "corpus/keyword_groups.json";
inline constexpr const char* kTaxonomy = "taxonomy/taxonomy.json";
inline constexpr const char* kTaxonomyReport = "taxonomy/report.json";
inline constexpr const char* kFinal = "corpus/final.jsonl";
inline constexpr const char* kChunks = "chunks.jsonl";
inline constexpr const char* kProposals = "proposals.jsonl";
inline constexpr const char* kQuestionsRaw = "questions_raw.jsonl";
inline constexpr const char* kQc = "qc.jsonl";
inline constexpr const char* kQuestions = "questions.jsonl";
inline constexpr const char* kReport = "report.json";

std::string index_dir(probe::Backend b, index::TextGranularity g);
std::string evidence_file(const probe::RetrievalConfig& r);
std::string report_file(const probe::RetrievalConfig& r);
}  // namespace artifacts

enum class Stage { Ingest, Dedup, Keywords, Taxonomy, Chunk, Index, Propose, Questions, Qc, Retrieve, Evaluate, Report };

inline constexpr Stage kAllStages[] = {Stage::Ingest,  Stage::Dedup,     Stage::Keywords, Stage::Taxonomy,
                                       Stage::Chunk,   Stage::Index,     Stage::Propose,  Stage::Questions,
                                       Stage::Qc,      Stage::Retrieve,  Stage::Evaluate, Stage::Report};

std::string_view stage_name(Stage s) noexcept;
Stage parse_stage(std::string_view name);

struct StageOptions {
    bool force = false;  ///< accept stale inputs
};

struct StageResult {
    Stage stage = Stage::Ingest;
    std::vector<std::string> outputs;
    std::size_t item_errors = 0;  ///< rejected lines, failed questions, ...
    std::string summary;          ///< one line for humans
};

/// Runs one stage. Missing inputs throw NotFound naming the artifact and
/// the stage that produces it; stale inputs throw StaleArtifact.
StageResult run_stage(Stage s, const PipelineConfig& cfg, const StageOptions& opts = {});

/// Every stage in order; stops at the first exception.
std::vector<StageResult> run_pipeline(const PipelineConfig& cfg, const StageOptions& opts = {});

}  // namespace aqa::pipeline
