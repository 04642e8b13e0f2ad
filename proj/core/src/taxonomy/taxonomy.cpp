#include "aqa/taxonomy/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "aqa/error.hpp"

namespace aqa::taxonomy {

using nlohmann::json;

bool Taxonomy::contains(std::string_view name) const {
    return std::any_of(labels.begin(), labels.end(), [&](const TaxonomyLabel& l) { return l.name == name; });
}

std::vector<std::string> Taxonomy::names() const {
    std::vector<std::string> out;
    for (const auto& l : labels) out.push_back(l.name);
    return out;
}

void Taxonomy::validate() const {
    std::set<std::string> seen;
    for (const auto& l : labels) {
        if (l.name.empty()) throw InvalidArgument("taxonomy label with an empty name");
        if (!seen.insert(l.name).second) throw InvalidArgument("duplicate taxonomy label '" + l.name + "'");
    }
}

json to_json(const Taxonomy& t) {
    json labels = json::array();
    for (const auto& l : t.labels) labels.push_back({{"name", l.name}, {"description", l.description}});
    json j = {{"labels", labels}};
    if (t.parent) j["parent"] = *t.parent;
    return j;
}

namespace {

std::vector<TaxonomyLabel> labels_from_json(const json& arr) {
    if (!arr.is_array()) throw ParseError("taxonomy labels must be a list");
    std::vector<TaxonomyLabel> out;
    for (const auto& l : arr) {
        if (!l.is_object() || !l.contains("name") || !l["name"].is_string()) {
            throw ParseError("taxonomy entry lacks a name: " + l.dump());
        }
        out.push_back({l["name"].get<std::string>(), l.value("description", std::string())});
    }
    return out;
}

}  // namespace

Taxonomy taxonomy_from_json(const json& j) {
    Taxonomy t;
    if (!j.is_object() || !j.contains("labels")) throw ParseError("taxonomy lacks 'labels'");
    t.labels = labels_from_json(j["labels"]);
    if (j.contains("parent") && j["parent"].is_string()) t.parent = j["parent"].get<std::string>();
    try {
        t.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    return t;
}

void save_taxonomy(const std::string& path, const Taxonomy& t) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << to_json(t).dump(2) << '\n';
}

Taxonomy load_taxonomy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open taxonomy '" + path + "'");
    try {
        return taxonomy_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ParseError("taxonomy '" + path + "': " + e.what());
    }
}

TaxonomyRun generate_taxonomy(const std::vector<std::string>& summaries, const Matrix& embeddings,
                              const TaxonomyParams& params, clients::ChatClient& client) {
    if (summaries.size() != embeddings.size()) {
        throw InvalidArgument("got " + std::to_string(embeddings.size()) + " embeddings for " +
                              std::to_string(summaries.size()) + " summaries");
    }
    if (params.max_rounds == 0 || params.batch_size == 0 || params.num_clusters == 0 || params.patience == 0) {
        throw InvalidArgument("taxonomy parameters must be positive");
    }
    TaxonomyRun run;
    if (summaries.empty()) {
        run.stop_reason = "empty input";
        return run;
    }
    const std::size_t k = std::min(params.num_clusters, summaries.size());
    const auto km = kmeans(embeddings, k, params.kmeans_iterations, params.seed);
    const auto batches = round_robin_batches(group_by_cluster(km.assignments, k), params.batch_size);

    std::optional<double> best;
    std::size_t stale = 0;
    run.stop_reason = "max rounds";
    for (std::size_t round = 1; round <= params.max_rounds; ++round) {
        if (round > batches.size()) {
            run.stop_reason = "batches exhausted";
            break;
        }
        json batch_json = json::array();
        std::string batch_text;
        for (auto i : batches[round - 1]) {
            batch_json.push_back(summaries[i]);
            batch_text += "- " + summaries[i] + "\n";
        }
        clients::PromptVariables vars = {{"batch", batch_text},
                                         {"batch_json", batch_json.dump()},
                                         {"min_class_number_requirement", std::to_string(params.min_classes)}};
        const bool initial = round == 1;
        if (!initial) {
            vars["taxonomy"] = to_json(run.taxonomy).dump(2);
            vars["taxonomy_json"] = to_json(run.taxonomy)["labels"].dump();
        }
        const auto exchange = client.chat(initial ? "taxonomy_initial" : "taxonomy_update", vars);
        ++run.rounds;

        std::optional<double> score;
        try {
            const json res = clients::parse_json_response(exchange.response);
            if (!res.is_object() || !res.contains("taxonomy")) throw ParseError("response lacks 'taxonomy'");
            Taxonomy next;
            next.labels = labels_from_json(res["taxonomy"]);
            next.validate();
            if (res.contains("score")) {
                if (!res["score"].is_number()) throw ParseError("'score' is not a number");
                score = res["score"].get<double>();
            } else if (!initial) {
                throw ParseError("update response lacks 'score'");
            }
            run.taxonomy = std::move(next);
        } catch (const Error& e) {
            throw ParseError("taxonomy round " + std::to_string(round) + ": " + e.what());
        }

        if (!score) continue;
        run.scores.push_back(*score);
        if (!best || *score > *best) {
            best = score;
            stale = 0;
        } else if (++stale >= params.patience) {
            run.stop_reason = "patience";
            break;
        }
    }
    return run;
}

LabelAssignment parse_label_assignment(const json& response, const Taxonomy& taxonomy) {
    if (!response.is_object() || !response.contains("labels") || !response["labels"].is_array()) {
        throw ParseError("label response lacks a 'labels' list");
    }
    LabelAssignment a;
    for (const auto& entry : response["labels"]) {
        if (!entry.is_object() || !entry.contains("label") || !entry["label"].is_string()) {
            throw ParseError("label entry lacks 'label': " + entry.dump());
        }
        const auto label = entry["label"].get<std::string>();
        if (label != kUndefinedLabel && !taxonomy.contains(label)) {
            throw ParseError("label '" + label + "' is not in the taxonomy");
        }
        if (!entry.contains("relevance") || !entry["relevance"].is_number_integer()) {
            throw ParseError("label '" + label + "' lacks an integer relevance");
        }
        const int r = entry["relevance"].get<int>();
        if (r < 0 || r > 10) throw ParseError("relevance " + std::to_string(r) + " of '" + label + "' is outside [0, 10]");
        a.labels.push_back(label);
        a.relevance.push_back(r);
    }
    if (a.labels.empty()) throw ParseError("label response has no labels");
    return a;
}

LabelAssignment assign_labels(const std::string& item, const Taxonomy& taxonomy, clients::ChatClient& client) {
    if (taxonomy.labels.empty()) throw InvalidArgument("cannot assign labels with an empty taxonomy");
    const auto exchange = client.chat("label_assignment", {{"taxonomy", to_json(taxonomy).dump(2)},
                                                           {"taxonomy_json", to_json(taxonomy)["labels"].dump()},
                                                           {"item", item}});
    return parse_label_assignment(clients::parse_json_response(exchange.response), taxonomy);
}

double coverage_score(std::span<const LabelAssignment> assignments) {
    if (assignments.empty()) throw InvalidArgument("coverage of zero assignments is undefined");
    std::size_t undefined = 0;
    for (const auto& a : assignments) {
        const bool only_undefined = !a.labels.empty() && std::all_of(a.labels.begin(), a.labels.end(), [](const auto& l) {
            return l == kUndefinedLabel;
        });
        if (only_undefined) ++undefined;
    }
    return 1.0 - static_cast<double>(undefined) / static_cast<double>(assignments.size());
}

double certainty_score(std::span<const LabelAssignment> assignments) {
    if (assignments.empty()) throw InvalidArgument("certainty of zero assignments is undefined");
    double total = 0.0;
    for (const auto& a : assignments) {
        if (a.labels.size() != a.relevance.size() || a.labels.empty()) {
            throw InvalidArgument("assignment needs one relevance per label");
        }
        double sum = 0.0;
        for (int r : a.relevance) {
            if (r < 0) throw InvalidArgument("negative relevance");
            sum += r;
        }
        if (sum == 0.0) throw InvalidArgument("assignment has all-zero relevance");
        double h = 0.0;
        const std::size_t m = a.relevance.size();
        if (m > 1) {
            for (int r : a.relevance) {
                if (r == 0) continue;
                const double p = r / sum;
                h -= p * std::log2(p);
            }
            h /= std::log2(static_cast<double>(m));
        }
        total += 1.0 - h;
    }
    return total / static_cast<double>(assignments.size());
}

TaxonomyQuality quality_score(std::span<const LabelAssignment> assignments) {
    TaxonomyQuality q;
    q.coverage = coverage_score(assignments);
    q.certainty = certainty_score(assignments);
    q.quality = q.coverage + q.certainty;
    return q;
}

}  // namespace aqa::taxonomy
