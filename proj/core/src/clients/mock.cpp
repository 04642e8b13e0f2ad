#include "aqa/clients/mock.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <set>

#include "aqa/corpus/tokenizer.hpp"
#include "aqa/error.hpp"
#include "aqa/hash.hpp"
#include "aqa/text.hpp"

namespace aqa::clients {

using nlohmann::json;

namespace {

bool alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Byte offsets of whole-phrase matches; case-sensitive on the given strings.
std::vector<std::size_t> mention_offsets(std::string_view hay, std::string_view needle) {
    std::vector<std::size_t> out;
    if (needle.empty()) return out;
    for (std::size_t pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) {
        const std::size_t end = pos + needle.size();
        const bool left_ok = pos == 0 || !alnum(hay[pos - 1]) || !alnum(needle.front());
        const bool right_ok = end == hay.size() || !alnum(hay[end]) || !alnum(needle.back());
        if (left_ok && right_ok) {
            out.push_back(pos);
            pos = end - 1;
        }
    }
    return out;
}

const json& need(const PromptVariables& vars, const char* name, json& storage) {
    auto it = vars.find(name);
    if (it == vars.end()) throw InvalidArgument(std::string("mock needs variable '") + name + "'");
    storage = json::parse(it->second);
    return storage;
}

const std::string& need_text(const PromptVariables& vars, const char* name) {
    auto it = vars.find(name);
    if (it == vars.end()) throw InvalidArgument(std::string("mock needs variable '") + name + "'");
    return it->second;
}

std::string taxonomy_response(const MockPolicy& policy, const PromptVariables& vars, bool update) {
    json batch_storage, tax_storage;
    const json& batch = need(vars, "batch_json", batch_storage);
    json taxonomy = json::array();
    std::set<std::string> known;
    if (update) {
        for (const auto& entry : need(vars, "taxonomy_json", tax_storage)) {
            if (known.insert(entry.at("name").get<std::string>()).second) taxonomy.push_back(entry);
        }
    }
    std::string joined;
    for (const auto& item : batch) joined += ascii_lower(item.get<std::string>()) + "\n";
    std::vector<std::pair<std::size_t, std::string>> found;
    for (const auto& label : policy.labels) {
        if (known.count(label)) continue;
        auto offs = mention_offsets(joined, ascii_lower(label));
        if (!offs.empty()) found.emplace_back(offs.front(), label);
    }
    std::sort(found.begin(), found.end());
    for (const auto& [_, label] : found) {
        taxonomy.push_back({{"name", label}, {"description", "Conversations about " + ascii_lower(label) + "."}});
    }
    return json{{"taxonomy", taxonomy}, {"score", taxonomy.size()}}.dump();
}

std::string label_response(const PromptVariables& vars) {
    json tax_storage;
    const json& taxonomy = need(vars, "taxonomy_json", tax_storage);
    const std::string item = ascii_lower(need_text(vars, "item"));
    std::vector<std::pair<std::string, std::size_t>> hits;
    std::size_t best = 0;
    for (const auto& entry : taxonomy) {
        const auto name = entry.at("name").get<std::string>();
        const std::size_t n = mention_offsets(item, ascii_lower(name)).size();
        if (n > 0) {
            hits.emplace_back(name, n);
            best = std::max(best, n);
        }
    }
    json labels = json::array();
    if (hits.empty()) {
        labels.push_back({{"label", "Undefined"}, {"relevance", 10}});
    } else {
        std::stable_sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        for (const auto& [name, n] : hits) {
            const long r = std::lround(10.0 * static_cast<double>(n) / static_cast<double>(best));
            labels.push_back({{"label", name}, {"relevance", std::max(1L, r)}});
        }
    }
    return json{{"labels", labels}}.dump();
}

std::string question_response(const PromptVariables& vars) {
    json storage;
    const json& conds = need(vars, "conditions_json", storage);
    const std::string& target = need_text(vars, "target");
    std::string where;
    for (const auto& c : conds) {
        if (!where.empty()) where += " and ";
        where += c.at("attribute").get<std::string>() + " is " + c.at("value").get<std::string>();
    }
    std::string q = where.empty() ? "Across all conversations, which " + target + " is most common?"
                                  : "Among conversations where " + where + ", which " + target + " is most common?";
    return json{{"question", q}}.dump();
}

std::string probe_response(const MockPolicy& policy, const PromptVariables& vars) {
    const std::string& question = need_text(vars, "question");
    std::size_t max_queries = 8;
    if (auto it = vars.find("max_queries"); it != vars.end()) max_queries = std::stoul(it->second);

    // Filters: metadata values mentioned verbatim, and explicit periods.
    json filters = json::array();
    for (const auto& [attr, values] : policy.metadata_values) {
        std::vector<std::string> hits;
        for (const auto& v : values) {
            if (!mention_offsets(question, v).empty()) hits.push_back(v);
        }
        if (hits.size() == 1) {
            filters.push_back({{"attribute", attribute_name(attr)}, {"op", "equals"}, {"value", hits.front()}});
        } else if (hits.size() > 1) {
            filters.push_back({{"attribute", attribute_name(attr)}, {"op", "in"}, {"values", hits}});
        }
    }
    static const std::regex period(R"((^|[^0-9A-Za-z])(\d{4}-(W\d{2}|\d{2}(-\d{2})?))(?![0-9A-Za-z]))");
    for (auto it = std::sregex_iterator(question.begin(), question.end(), period); it != std::sregex_iterator();
         ++it) {
        filters.push_back({{"attribute", "time"}, {"op", "equals"}, {"value", (*it)[2].str()}});
    }

    // Content terms, longest match wins where they overlap.
    const std::string lowered = ascii_lower(question);
    struct Hit {
        std::size_t begin, end;
        std::string term;
    };
    std::vector<Hit> hits;
    for (const auto& term : policy.content_terms) {
        const auto lt = ascii_lower(term);
        for (auto off : mention_offsets(lowered, lt)) hits.push_back({off, off + lt.size(), term});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.end - a.begin != b.end - b.begin) return a.end - a.begin > b.end - b.begin;
        return a.begin < b.begin;
    });
    std::vector<Hit> kept;
    for (const auto& h : hits) {
        const bool inside = std::any_of(kept.begin(), kept.end(),
                                        [&](const Hit& k) { return h.begin < k.end && k.begin < h.end; });
        if (!inside) kept.push_back(h);
    }
    std::sort(kept.begin(), kept.end(), [](const Hit& a, const Hit& b) { return a.begin < b.begin; });

    std::vector<std::string> queries;
    std::set<std::string> seen;
    auto add = [&](const std::string& q) {
        if (queries.size() < max_queries && seen.insert(ascii_lower(q)).second) queries.push_back(q);
    };
    if (kept.empty()) {
        add(question);
    } else {
        std::vector<std::string> terms;
        for (const auto& h : kept) terms.push_back(h.term);
        add(join(terms, " "));
        for (const auto& t : terms) add(t);
        // Expansions interleaved across terms.
        for (std::size_t round = 0; queries.size() < max_queries; ++round) {
            bool any = false;
            for (const auto& t : terms) {
                auto it = policy.expansions.find(t);
                if (it == policy.expansions.end() || round >= it->second.size()) continue;
                any = true;
                add(it->second[round]);
            }
            if (!any) break;
        }
    }
    return json{{"filters", filters}, {"queries", queries}}.dump();
}

std::string ranking_response(const PromptVariables& vars) {
    json storage;
    const json& candidates = need(vars, "candidates_json", storage);
    const std::string context = ascii_lower(need_text(vars, "context"));
    std::vector<std::pair<std::string, std::size_t>> scored;
    for (const auto& c : candidates) {
        const auto v = c.get<std::string>();
        scored.emplace_back(v, mention_offsets(context, ascii_lower(v)).size());
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    json ranking = json::array();
    for (const auto& [v, _] : scored) ranking.push_back(v);
    return json{{"ranking", ranking}}.dump();
}

}  // namespace

std::size_t count_mentions(std::string_view haystack, std::string_view needle) {
    return mention_offsets(ascii_lower(haystack), ascii_lower(needle)).size();
}

json to_json(const MockPolicy& p) {
    json meta = json::object();
    for (const auto& [a, v] : p.metadata_values) meta[std::string(attribute_name(a))] = v;
    return {{"seed", p.seed},
            {"embedding_dim", p.embedding_dim},
            {"metadata_values", meta},
            {"content_terms", p.content_terms},
            {"expansions", p.expansions},
            {"labels", p.labels},
            {"fixed_responses", p.fixed_responses}};
}

MockPolicy mock_policy_from_json(const json& j) {
    MockPolicy p;
    try {
        p.seed = j.value("seed", std::uint64_t{0});
        p.embedding_dim = j.value("embedding_dim", index::kDefaultEmbeddingDim);
        if (j.contains("metadata_values")) {
            for (const auto& [k, v] : j["metadata_values"].items()) {
                p.metadata_values[require_attribute(k)] = v.get<std::vector<std::string>>();
            }
        }
        p.content_terms = j.value("content_terms", std::vector<std::string>{});
        p.expansions = j.value("expansions", std::map<std::string, std::vector<std::string>>{});
        p.labels = j.value("labels", std::vector<std::string>{});
        p.fixed_responses = j.value("fixed_responses", std::map<std::string, std::vector<std::string>>{});
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad mock policy: ") + e.what());
    }
    return p;
}

MockPolicy mock_policy_from_corpus(const corpus::CorpusStore& store, std::uint64_t seed,
                                   std::size_t keywords_per_topic) {
    MockPolicy p;
    p.seed = seed;
    std::map<Attribute, std::set<std::string>> meta;
    std::set<std::string> content;
    std::set<std::string> topics;
    // term -> topic -> conversations holding both
    std::map<std::string, std::map<std::string, std::size_t>> subs_with, kws_with;
    for (const auto& c : store) {
        meta[Attribute::Location].insert(c.location);
        meta[Attribute::Language].insert(c.language);
        meta[Attribute::User].insert(c.user);
        for (const auto& t : c.topics) {
            topics.insert(t);
            content.insert(t);
            for (const auto& s : c.subtopics) ++subs_with[s][t];
            for (const auto& k : c.keywords) ++kws_with[k][t];
        }
        content.insert(c.subtopics.begin(), c.subtopics.end());
        content.insert(c.keywords.begin(), c.keywords.end());
    }
    for (auto& [a, values] : meta) {
        values.erase(std::string());
        p.metadata_values[a].assign(values.begin(), values.end());
    }
    p.content_terms.assign(content.begin(), content.end());
    p.labels.assign(topics.begin(), topics.end());

    // A term expands only the topic it co-occurs with most often, so
    // conversations that mix two topics do not leak terms across them.
    using Ranked = std::vector<std::pair<std::string, std::size_t>>;
    auto by_home = [](const std::map<std::string, std::map<std::string, std::size_t>>& with) {
        std::map<std::string, Ranked> out;
        for (const auto& [term, per_topic] : with) {
            auto best = per_topic.begin();
            for (auto it = per_topic.begin(); it != per_topic.end(); ++it) {
                if (it->second > best->second) best = it;
            }
            out[best->first].emplace_back(term, best->second);
        }
        for (auto& [_, v] : out) {
            std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        }
        return out;
    };
    const auto subs = by_home(subs_with);
    const auto kws = by_home(kws_with);
    for (const auto& t : topics) {
        auto& ex = p.expansions[t];
        if (auto it = subs.find(t); it != subs.end()) {
            for (const auto& [s, _] : it->second) ex.push_back(s);
        }
        if (auto it = kws.find(t); it != kws.end()) {
            for (std::size_t i = 0; i < it->second.size() && i < keywords_per_topic; ++i) ex.push_back(it->second[i].first);
        }
    }
    return p;
}

MockChatClient::MockChatClient(PromptLibrary prompts, MockPolicy policy)
    : ChatClient(std::move(prompts)), policy_(std::move(policy)) {}

std::string MockChatClient::complete(const std::string& prompt_id, const std::string&, const PromptVariables& vars) {
    if (auto it = policy_.fixed_responses.find(prompt_id); it != policy_.fixed_responses.end() && !it->second.empty()) {
        std::lock_guard lock(mu_);
        const std::size_t i = std::min(served_[prompt_id]++, it->second.size() - 1);
        return it->second[i];
    }
    try {
        if (prompt_id == "taxonomy_initial") return taxonomy_response(policy_, vars, false);
        if (prompt_id == "taxonomy_update") return taxonomy_response(policy_, vars, true);
        if (prompt_id == "label_assignment") return label_response(vars);
        if (prompt_id == "question_generation") return question_response(vars);
        if (prompt_id == "probe_queries") return probe_response(policy_, vars);
        if (prompt_id == "answer_ranking") return ranking_response(vars);
    } catch (const json::exception& e) {
        throw InvalidArgument("mock could not read variables of '" + prompt_id + "': " + e.what());
    }
    throw NotFound("mock has no behavior for prompt '" + prompt_id + "'");
}

void check_embed_batch(const std::vector<std::string>& texts) {
    if (texts.empty()) throw InvalidArgument("embedding batch is empty");
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (trim(texts[i]).empty()) throw InvalidArgument("text " + std::to_string(i) + " of the batch is empty");
    }
}

MockEmbedder::MockEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim == 0) throw InvalidArgument("embedding dimension must be positive");
}

std::vector<index::EmbeddingVector> MockEmbedder::embed(const std::vector<std::string>& texts) {
    check_embed_batch(texts);
    const std::uint64_t basis = mix64(seed_);
    std::vector<index::EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        auto words = corpus::word_tokens(text);
        std::vector<std::string> content;
        for (auto& w : words) {
            if (!is_stopword(w)) content.push_back(std::move(w));
        }
        if (content.empty()) content = corpus::word_tokens(text);
        if (content.empty()) content.push_back(std::string(trim(text)));
        index::EmbeddingVector v(dim_, 0.0);
        for (const auto& w : content) {
            const std::uint64_t h = fnv1a64(w, basis);
            v[h % dim_] += (mix64(h) & 1) ? 1.0 : -1.0;
        }
        // Colliding features may cancel exactly; fall back to a fixed coordinate.
        if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[fnv1a64(text, basis) % dim_] = 1.0;
        out.push_back(index::normalized(std::move(v)));
    }
    return out;
}

}  // namespace aqa::clients
