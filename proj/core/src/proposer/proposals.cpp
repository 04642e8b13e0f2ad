#include "aqa/proposer/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

#include "aqa/error.hpp"
#include "aqa/hash.hpp"
#include "aqa/random.hpp"
#include "aqa/text.hpp"

#ifndef AQA_DATA_DIR
#define AQA_DATA_DIR "data"
#endif

namespace aqa::proposer {

using nlohmann::json;
using aggdb::AggregationRow;
using aggdb::ConditionSet;

std::string Combo::describe() const {
    std::string out;
    for (auto a : conditions) {
        if (!out.empty()) out += ",";
        out += attribute_name(a);
    }
    return (out.empty() ? "none" : out) + "->" + std::string(attribute_name(target));
}

Combo parse_combo(std::string_view line) {
    const auto arrow = line.find("->");
    if (arrow == std::string_view::npos) throw ParseError("combo '" + std::string(line) + "' lacks '->'");
    Combo c;
    const auto target = trim(line.substr(arrow + 2));
    auto t = parse_attribute(target);
    if (!t) throw ParseError("unknown target attribute '" + std::string(target) + "'");
    c.target = *t;
    const auto conds = trim(line.substr(0, arrow));
    if (!conds.empty() && conds != "none") {
        std::size_t start = 0;
        while (start <= conds.size()) {
            const auto comma = conds.find(',', start);
            const auto name = trim(conds.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            auto a = parse_attribute(name);
            if (!a) throw ParseError("unknown condition attribute '" + std::string(name) + "'");
            c.conditions.push_back(*a);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
    }
    if (c.conditions.size() > aggdb::kMaxConditions) throw ParseError("combo '" + std::string(line) + "' has more than 3 conditions");
    return c;
}

std::vector<Combo> read_combos(std::istream& in) {
    std::vector<Combo> out;
    std::size_t lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        try {
            out.push_back(parse_combo(t));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<Combo> load_combos(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open combos file '" + path + "'");
    return read_combos(in);
}

std::string default_combos_path() {
    if (const char* env = std::getenv("AQA_COMBOS_FILE"); env && *env) return env;
    return std::string(AQA_DATA_DIR) + "/combos_default.txt";
}

json to_json(const QuestionProposal& p) {
    return {{"conditions", aggdb::to_json(p.conditions)},
            {"target", attribute_name(p.target)},
            {"support", p.support},
            {"top3_coverage", p.top3_coverage},
            {"entropy", p.entropy},
            {"top1_value", p.top1_value}};
}

QuestionProposal proposal_from_json(const json& j) {
    try {
        QuestionProposal p;
        p.conditions = aggdb::condition_set_from_json(j.at("conditions"));
        p.target = require_attribute(j.at("target").get<std::string>());
        p.support = j.at("support").get<std::size_t>();
        p.top3_coverage = j.at("top3_coverage").get<double>();
        p.entropy = j.at("entropy").get<double>();
        p.top1_value = j.at("top1_value").get<std::string>();
        return p;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad proposal: ") + e.what());
    }
}

double top3_coverage(const std::vector<AggregationRow>& rows) {
    std::size_t total = 0, top = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        total += rows[i].count;
        if (i < 3) top += rows[i].count;
    }
    return total == 0 ? 0.0 : static_cast<double>(top) / static_cast<double>(total);
}

bool admissible(const ConditionSet& conditions, std::size_t support, const std::vector<AggregationRow>& rows,
                const AdmissionRules& rules) {
    if (rows.empty()) return false;
    const std::size_t need = conditions.has(Attribute::User) ? rules.min_support_with_user : rules.min_support;
    if (support < need) return false;
    return top3_coverage(rows) >= rules.min_top3_coverage;
}

double normalized_entropy(std::span<const std::size_t> counts) {
    double total = 0.0;
    std::size_t m = 0;
    for (auto c : counts) {
        total += static_cast<double>(c);
        if (c > 0) ++m;
    }
    if (m == 0) throw InvalidArgument("entropy needs at least one positive count");
    if (m == 1) return 0.0;
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return std::clamp(h / std::log2(static_cast<double>(m)), 0.0, 1.0);
}

namespace {

struct Stats {
    std::size_t support = 0;
    std::map<std::string, std::size_t> counts;

    void add(const Stats& o) {
        support += o.support;
        for (const auto& [v, n] : o.counts) counts[v] += n;
    }
};

// One condition group: an attribute with how many times the combo uses it.
struct Group {
    Attribute attribute;
    std::size_t arity;
    bool any_of;  // repeated single-valued attribute: values are alternatives
};

// All strictly increasing r-tuples drawn from sorted values.
void combinations(const std::vector<std::string>& values, std::size_t r, std::vector<std::string>& cur,
                  std::size_t from, std::vector<std::vector<std::string>>& out) {
    if (cur.size() == r) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = from; i + (r - cur.size()) <= values.size(); ++i) {
        cur.push_back(values[i]);
        combinations(values, r, cur, i + 1, out);
        cur.pop_back();
    }
}

std::vector<std::vector<std::string>> combinations(const std::vector<std::string>& values, std::size_t r) {
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> cur;
    combinations(values, r, cur, 0, out);
    return out;
}

using Key = std::vector<std::vector<std::string>>;  // per group, its chosen values

void emit(const Combo& combo, const std::vector<Group>& groups, const Key& key, const Stats& s,
          const AdmissionRules& rules, ProposalMap& out) {
    ConditionSet cond;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (const auto& v : key[g]) cond.conditions.push_back({groups[g].attribute, v});
    }
    std::vector<AggregationRow> rows;
    for (const auto& [v, n] : s.counts) rows.push_back({v, n});
    aggdb::sort_rows(rows);
    if (!admissible(cond, s.support, rows, rules)) return;
    std::vector<std::size_t> counts;
    for (const auto& r : rows) counts.push_back(r.count);
    QuestionProposal p;
    p.conditions = std::move(cond);
    p.target = combo.target;
    p.support = s.support;
    p.top3_coverage = top3_coverage(rows);
    p.entropy = normalized_entropy(counts);
    p.top1_value = rows.front().value;
    out[p.top1_value].push_back(std::move(p));
}

void enumerate_combo(const aggdb::AggDb& db, const Combo& combo, const AdmissionRules& rules, ProposalMap& out) {
    if (std::find(combo.conditions.begin(), combo.conditions.end(), combo.target) != combo.conditions.end()) {
        throw InvalidArgument("combo " + combo.describe() + ": target is also a condition");
    }
    std::vector<Group> groups;
    for (auto a : combo.conditions) {
        auto it = std::find_if(groups.begin(), groups.end(), [a](const Group& g) { return g.attribute == a; });
        if (it == groups.end()) {
            groups.push_back({a, 1, false});
        } else {
            ++it->arity;
        }
    }
    std::size_t or_group = groups.size();
    for (std::size_t g = 0; g < groups.size(); ++g) {
        groups[g].any_of = groups[g].arity > 1 && !is_multi_valued(groups[g].attribute);
        if (groups[g].any_of) {
            if (or_group != groups.size()) {
                throw InvalidArgument("combo " + combo.describe() + " repeats more than one single-valued attribute");
            }
            or_group = g;
        }
    }

    // Stage 1: per configuration, an alternative group contributes one value.
    std::map<Key, Stats> stage;
    const std::size_t n = db.store().size();
    for (std::size_t pos = 0; pos < n; ++pos) {
        std::vector<std::vector<std::vector<std::string>>> options(groups.size());
        bool viable = true;
        for (std::size_t g = 0; g < groups.size() && viable; ++g) {
            const auto& vals = db.values(pos, groups[g].attribute);
            options[g] = combinations(vals, groups[g].any_of ? 1 : groups[g].arity);
            viable = !options[g].empty();
        }
        if (!viable) continue;
        const auto& targets = db.values(pos, combo.target);
        std::vector<std::size_t> idx(groups.size(), 0);
        while (true) {
            Key key(groups.size());
            for (std::size_t g = 0; g < groups.size(); ++g) key[g] = options[g][idx[g]];
            Stats& s = stage[key];
            ++s.support;
            for (const auto& t : targets) ++s.counts[t];
            std::size_t g = 0;
            for (; g < groups.size(); ++g) {
                if (++idx[g] < options[g].size()) break;
                idx[g] = 0;
            }
            if (g == groups.size()) break;
        }
    }

    if (or_group == groups.size()) {
        for (const auto& [key, s] : stage) emit(combo, groups, key, s, rules, out);
        return;
    }
    // Stage 2: alternatives of a single-valued attribute select disjoint
    // conversation sets, so their statistics add up.
    std::map<Key, std::map<std::string, const Stats*>> by_rest;
    for (const auto& [key, s] : stage) {
        Key rest = key;
        rest[or_group].clear();
        by_rest[rest][key[or_group].front()] = &s;
    }
    for (const auto& [rest, members] : by_rest) {
        std::vector<std::string> values;
        for (const auto& [v, _] : members) values.push_back(v);
        for (const auto& tuple : combinations(values, groups[or_group].arity)) {
            Stats total;
            for (const auto& v : tuple) total.add(*members.at(v));
            Key key = rest;
            key[or_group] = tuple;
            emit(combo, groups, key, total, rules, out);
        }
    }
}

}  // namespace

ProposalMap enumerate_proposals(const aggdb::AggDb& db, const std::vector<Combo>& combos, const AdmissionRules& rules) {
    ProposalMap out;
    for (const auto& combo : combos) enumerate_combo(db, combo, rules, out);
    for (auto& [_, list] : out) {
        std::stable_sort(list.begin(), list.end(), [](const QuestionProposal& a, const QuestionProposal& b) {
            if (a.entropy != b.entropy) return a.entropy < b.entropy;
            if (a.support != b.support) return a.support > b.support;
            const auto da = a.conditions.describe() + "->" + std::string(attribute_name(a.target));
            const auto db_ = b.conditions.describe() + "->" + std::string(attribute_name(b.target));
            return da < db_;
        });
    }
    return out;
}

std::vector<QuestionProposal> sample_proposals(const ProposalMap& proposals, std::uint64_t seed, std::size_t per_key) {
    std::vector<const std::string*> keys;
    for (const auto& [k, _] : proposals) keys.push_back(&k);
    Rng rng(seed);
    rng.shuffle(keys);
    std::vector<QuestionProposal> out;
    for (std::size_t pass = 0; pass < per_key; ++pass) {
        for (const auto* k : keys) {
            const auto& list = proposals.at(*k);
            if (pass < list.size()) out.push_back(list[pass]);
        }
    }
    return out;
}

std::string render_question(const QuestionProposal& proposal, clients::ChatClient& client) {
    std::string conditions;
    for (const auto& c : proposal.conditions.conditions) {
        conditions += "- " + std::string(attribute_name(c.attribute)) + " = " + c.value + "\n";
    }
    if (conditions.empty()) conditions = "(none)\n";
    const auto exchange = client.chat("question_generation", {{"conditions", conditions},
                                                              {"conditions_json", aggdb::to_json(proposal.conditions).dump()},
                                                              {"target", std::string(attribute_name(proposal.target))}});
    std::string text;
    try {
        const json res = clients::parse_json_response(exchange.response);
        if (res.is_object() && res.contains("question") && res["question"].is_string()) {
            text = res["question"].get<std::string>();
        }
    } catch (const ParseError&) {
        text = exchange.response;
    }
    text = std::string(trim(text));
    if (text.empty()) throw ParseError("question_generation returned an empty question");
    return text;
}

QuestionBuildReport build_questions(const aggdb::AggDb& db, const std::vector<QuestionProposal>& proposals,
                                    clients::ChatClient& client, const QuestionBuildParams& params) {
    QuestionBuildReport out;
    for (std::size_t i = 0; i < proposals.size(); ++i) {
        if (params.max_questions != 0 && out.questions.size() == params.max_questions) break;
        const auto& p = proposals[i];
        aggdb::CandidateSet cs;
        try {
            cs = db.build_candidates(p.conditions, p.target, params.candidates, params.seed + i);
        } catch (const InvalidArgument&) {
            ++out.skipped;
            continue;
        }
        aggdb::AggregativeQuestion q;
        try {
            q.question_text = render_question(p, client);
        } catch (const Error& e) {
            out.errors.push_back(p.conditions.describe() + "->" + std::string(attribute_name(p.target)) + ": " +
                                 e.what());
            continue;
        }
        char id[32];
        std::snprintf(id, sizeof id, "q-%05zu", out.questions.size() + 1);
        q.id = id;
        q.conditions = p.conditions;
        q.target = p.target;
        q.candidates = std::move(cs.candidates);
        // Grade order must not leak to the ranker.
        Rng shuffle_rng(mix64(params.seed ^ (i + 1)));
        shuffle_rng.shuffle(q.candidates);
        q.supporting_ids = std::move(cs.supporting_ids);
        out.questions.push_back(std::move(q));
    }
    return out;
}

void write_proposals(std::ostream& out, const std::vector<QuestionProposal>& ps) {
    for (const auto& p : ps) out << to_json(p).dump() << '\n';
}

std::vector<QuestionProposal> read_proposals(std::istream& in) {
    std::vector<QuestionProposal> out;
    std::size_t lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            out.push_back(proposal_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace aqa::proposer
