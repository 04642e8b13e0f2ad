#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqa/clients/chat.hpp"
#include "aqa/taxonomy/kmeans.hpp"

namespace aqa::taxonomy {

inline constexpr std::string_view kUndefinedLabel = "Undefined";

struct TaxonomyLabel {
    std::string name;
    std::string description;
    friend bool operator==(const TaxonomyLabel&, const TaxonomyLabel&) = default;
};

struct Taxonomy {
    std::vector<TaxonomyLabel> labels;
    std::optional<std::string> parent;  ///< topic a subtopic taxonomy refines

    bool contains(std::string_view name) const;
    std::vector<std::string> names() const;
    /// Throws InvalidArgument on duplicate or empty names.
    void validate() const;
    friend bool operator==(const Taxonomy&, const Taxonomy&) = default;
};

nlohmann::json to_json(const Taxonomy& t);
Taxonomy taxonomy_from_json(const nlohmann::json& j);
void save_taxonomy(const std::string& path, const Taxonomy& t);
Taxonomy load_taxonomy(const std::string& path);

struct TaxonomyParams {
    std::size_t max_rounds = 10;    ///< N
    std::size_t batch_size = 50;    ///< B
    std::size_t num_clusters = 10;  ///< K, capped at the number of items
    std::size_t patience = 3;       ///< rounds without a better score before stopping
    std::size_t min_classes = 10;   ///< filled into the min_class_number_requirement slot
    std::size_t kmeans_iterations = 100;
    std::uint64_t seed = 0;
};

struct TaxonomyRun {
    Taxonomy taxonomy;
    std::vector<double> scores;  ///< one per round that reported a score
    std::size_t rounds = 0;      ///< model calls made
    std::string stop_reason;     ///< "patience", "batches exhausted", "max rounds" or "empty input"
};

/// Clusters the embeddings, feeds round-robin batches of summaries to the
/// model (taxonomy_initial first, taxonomy_update afterwards) and stops when
/// the model-reported score has not improved for `patience` rounds, batches
/// run out, or max_rounds calls were made. A score on the initial response is
/// optional and, when present, is the first score to beat.
TaxonomyRun generate_taxonomy(const std::vector<std::string>& summaries, const Matrix& embeddings,
                              const TaxonomyParams& params, clients::ChatClient& client);

struct LabelAssignment {
    std::vector<std::string> labels;
    std::vector<int> relevance;  ///< 0..10 per label
    friend bool operator==(const LabelAssignment&, const LabelAssignment&) = default;
};

/// Validates a label_assignment response against the taxonomy: labels must
/// be taxonomy names or "Undefined", relevance integers in [0, 10].
LabelAssignment parse_label_assignment(const nlohmann::json& response, const Taxonomy& taxonomy);

/// Throws InvalidArgument on an empty taxonomy, ParseError on a bad response.
LabelAssignment assign_labels(const std::string& item, const Taxonomy& taxonomy, clients::ChatClient& client);

/// 1 - (#assignments labeled Undefined and nothing else) / N.
double coverage_score(std::span<const LabelAssignment> assignments);
/// Mean of 1 - H over assignments, H the normalized entropy of relevance
/// shares (H = 0 for a single label).
double certainty_score(std::span<const LabelAssignment> assignments);

struct TaxonomyQuality {
    double coverage = 0.0;
    double certainty = 0.0;
    double quality = 0.0;  ///< coverage + certainty
};

TaxonomyQuality quality_score(std::span<const LabelAssignment> assignments);

}  // namespace aqa::taxonomy
