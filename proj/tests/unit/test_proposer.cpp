#include <aqa/aggdb/aggdb.hpp>
#include <aqa/clients/mock.hpp>
#include <aqa/corpus/synthetic.hpp>
#include <aqa/error.hpp>
#include <aqa/proposer/keywords.hpp>
#include <aqa/proposer/proposals.hpp>
#include <aqa/random.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "test_util.hpp"

using namespace aqa;
using namespace aqa::proposer;
using aggdb::AggregationRow;
using aggdb::ConditionSet;

namespace {

clients::MockChatClient mock_client() {
    return clients::MockChatClient(clients::PromptLibrary::load(clients::default_prompts_dir()), {});
}

QuestionProposal proposal(const std::string& top1, double entropy, std::size_t support = 100) {
    QuestionProposal p;
    p.top1_value = top1;
    p.entropy = entropy;
    p.support = support;
    p.conditions = {{{Attribute::Location, top1 + "-" + std::to_string(entropy)}}};
    return p;
}

// Partition of raw strings into connected components of the pairwise relation.
std::set<std::set<std::string>> closure_oracle(const std::vector<std::string>& words, std::string_view kind) {
    const std::size_t n = words.size();
    std::vector<std::size_t> comp(n);
    for (std::size_t i = 0; i < n; ++i) comp[i] = i;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (comp[i] != comp[j] && keywords_equivalent(words[i], words[j], kind)) {
                    auto lo = std::min(comp[i], comp[j]);
                    comp[i] = comp[j] = lo;
                    changed = true;
                }
    }
    std::map<std::size_t, std::set<std::string>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[comp[i]].insert(words[i]);
    std::set<std::set<std::string>> out;
    for (auto& [_, g] : groups) out.insert(g);
    return out;
}

}  // namespace

TEST(Normalize, Examples) {
    EXPECT_EQ(normalize_keyword("Pokémon"), "pokemon");
    EXPECT_EQ(normalize_keyword("  C++  "), "c++");
    EXPECT_EQ(normalize_keyword("C#"), "c#");
    EXPECT_EQ(normalize_keyword("Spider-Man: Homecoming"), "spider man homecoming");
}

TEST(Normalize, Idempotent) {
    for (const char* s : {"Pokémon", "  C++  ", "Ça va / Très_bien!", "The Lord of the Rings", "", "---"})
        EXPECT_EQ(normalize_keyword(normalize_keyword(s)), normalize_keyword(s)) << s;
}

TEST(Equivalent, Rules) {
    EXPECT_TRUE(keywords_equivalent("lord of the rings", "the lord of the rings", kUnspecifiedKind));
    EXPECT_TRUE(keywords_equivalent("lotr", "lord of the rings", "Book"));
    EXPECT_FALSE(keywords_equivalent("john ronald reuel tolkien", "john ronald reuel tolkien sr", kPublicFigure));
    EXPECT_TRUE(keywords_equivalent("john ronald reuel tolkien", "john ronald reuel tolkien sr", "Book"));
    EXPECT_TRUE(keywords_equivalent("age of empires", "age of empires ii", "Video Games"));
    EXPECT_TRUE(keywords_equivalent("empires ii definitive", "age of empires ii definitive", "Video Games"));
    // Two-word prefixes do not count.
    EXPECT_FALSE(keywords_equivalent("star wars", "star wars andor", "Film"));
    EXPECT_FALSE(keywords_equivalent("python", "java", "Programming Language"));
}

TEST(Equivalent, Symmetric) {
    const std::vector<std::string> words = {"lotr", "lord of the rings", "the lord of the rings", "Pokémon", "pokemon",
                                            "age of empires", "age of empires ii", "aoe", "star wars", "sw"};
    for (const auto& a : words)
        for (const auto& b : words)
            for (std::string_view kind : {kUnspecifiedKind, kPublicFigure})
                EXPECT_EQ(keywords_equivalent(a, b, kind), keywords_equivalent(b, a, kind)) << a << " | " << b;
}

TEST(Merge, SpellingsCollapse) {
    auto groups = merge_keywords({{"pokemon", "Video Games", 3}, {"pokémon", "Video Games", 5}, {"Pokemon", "Video Games", 1}});
    ASSERT_EQ(groups.size(), 1u);
    EXPECT_EQ(groups[0].members.size(), 3u);
    EXPECT_EQ(groups[0].canonical, "pokémon");
}

TEST(Merge, CanonicalTieBreaks) {
    auto groups = merge_keywords({{"the lord of the rings", "Book", 2}, {"lord of the rings", "Book", 2}});
    ASSERT_EQ(groups.size(), 1u);
    EXPECT_EQ(groups[0].canonical, "lord of the rings");
}

TEST(Merge, KindsNeverMerge) {
    auto groups = merge_keywords({{"dune", "Book", 1}, {"dune", "Film", 1}});
    EXPECT_EQ(groups.size(), 2u);
}

TEST(Merge, TransitiveClosureOracle) {
    const std::vector<std::string> vocab = {"the", "lord", "of", "rings", "age", "empires", "star", "wars",
                                            "a", "new", "hope", "lotr", "aoe"};
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        std::set<std::string> distinct;
        while (distinct.size() < 50) {
            std::string w;
            std::size_t n = 1 + rng.below(5);
            for (std::size_t i = 0; i < n; ++i) w += (i ? " " : "") + rng.pick(vocab);
            distinct.insert(w);
        }
        std::vector<std::string> words(distinct.begin(), distinct.end());
        std::vector<RawKeyword> raw;
        for (const auto& w : words) raw.push_back({w, "Book", 1 + rng.below(4)});
        std::set<std::set<std::string>> got;
        for (const auto& g : merge_keywords(raw)) {
            got.insert(g.members);
            EXPECT_TRUE(g.members.contains(g.canonical));
        }
        EXPECT_EQ(got, closure_oracle(words, "Book"));

        auto shuffled = raw;
        rng.shuffle(shuffled);
        EXPECT_EQ(merge_keywords(shuffled), merge_keywords(raw));
    }
}

TEST(Merge, JsonRoundTrip) {
    auto groups = merge_keywords({{"lotr", "Book", 1}, {"lord of the rings", "Book", 4}, {"c++", "Programming Language", 2}});
    EXPECT_EQ(keyword_groups_from_json(to_json(groups)), groups);
}

TEST(Entropy, Examples) {
    std::vector<std::size_t> uniform{5, 5, 5, 5};
    EXPECT_NEAR(normalized_entropy(uniform), 1.0, 1e-12);
    std::vector<std::size_t> single{7};
    EXPECT_EQ(normalized_entropy(single), 0.0);
    std::vector<std::size_t> halves{2, 1, 1};
    EXPECT_NEAR(normalized_entropy(halves), 1.5 / std::log2(3.0), 1e-12);
    EXPECT_NEAR(normalized_entropy(halves), 0.9464, 1e-4);
    std::vector<std::size_t> zero{0, 0};
    EXPECT_THROW(normalized_entropy(zero), InvalidArgument);
}

TEST(Entropy, BoundsProperty) {
    Rng rng(3);
    for (int t = 0; t < 500; ++t) {
        std::vector<std::size_t> c(1 + rng.below(8));
        for (auto& x : c) x = rng.below(20);
        c[0] += 1;
        double h = normalized_entropy(c);
        EXPECT_GE(h, 0.0);
        EXPECT_LE(h, 1.0);
    }
}

TEST(Admission, SupportThresholds) {
    std::vector<AggregationRow> rows{{"a", 30}, {"b", 19}};
    ConditionSet loc{{{Attribute::Location, "Peru"}}};
    EXPECT_FALSE(admissible(loc, 49, rows));
    rows[1].count = 20;
    EXPECT_TRUE(admissible(loc, 50, rows));
    ConditionSet user{{{Attribute::User, "bob"}}};
    std::vector<AggregationRow> small{{"a", 6}, {"b", 4}};
    EXPECT_TRUE(admissible(user, 10, small));
    EXPECT_FALSE(admissible(user, 9, small));
}

TEST(Admission, TopThreeCoverage) {
    std::vector<AggregationRow> rows{{"a", 50}, {"b", 50}, {"c", 49}};
    for (int i = 0; i < 851; ++i) rows.push_back({"z" + std::to_string(1000 + i), 1});
    EXPECT_NEAR(top3_coverage(rows), 0.149, 1e-12);
    EXPECT_FALSE(admissible({}, 1000, rows));
    rows[2].count = 50;
    rows.pop_back();
    EXPECT_NEAR(top3_coverage(rows), 0.15, 1e-12);
    EXPECT_TRUE(admissible({}, 1000, rows));
}

TEST(Combos, Parse) {
    EXPECT_EQ(parse_combo("loc,lang->topic"), (Combo{{Attribute::Location, Attribute::Language}, Attribute::Topic}));
    EXPECT_EQ(parse_combo("none->keywords").conditions.size(), 0u);
    EXPECT_EQ(parse_combo("->user").target, Attribute::User);
    EXPECT_THROW(parse_combo("a,b,c,d->topic"), ParseError);
    EXPECT_THROW(parse_combo("topic"), ParseError);
    EXPECT_EQ(load_combos(default_combos_path()).size(), 73u);
}

TEST(Enumerate, TargetAmongConditionsThrows) {
    corpus::CorpusStore store;
    store.add(test::make_conv("a", "u"));
    aggdb::AggDb db(store);
    EXPECT_THROW(enumerate_proposals(db, {parse_combo("topic->topic")}), InvalidArgument);
}

TEST(Enumerate, MatchesPerValueScan) {
    corpus::SyntheticParams sp;
    sp.conversations = 1000;
    corpus::CorpusStore store(corpus::generate_synthetic(sp).conversations);
    aggdb::AggDb db(store);
    for (const char* c : {"loc->topic", "lang->subtopic", "user->topic", "topic->loc"}) {
        Combo combo = parse_combo(c);
        auto map = enumerate_proposals(db, {combo});
        std::set<std::string> got;
        for (const auto& [key, list] : map)
            for (const auto& p : list) {
                EXPECT_EQ(p.top1_value, key);
                got.insert(p.conditions.describe());
            }
        std::set<std::string> want;
        for (const auto& row : db.global_distribution(combo.conditions[0])) {
            ConditionSet cs{{{combo.conditions[0], row.value}}};
            auto agg = db.aggregate(cs, combo.target);
            if (admissible(cs, agg.support, agg.rows)) want.insert(cs.describe());
        }
        EXPECT_EQ(got, want) << c;
        EXPECT_FALSE(want.empty()) << c;
    }
}

TEST(Enumerate, ListsSortedByEntropyAndReCheckable) {
    corpus::SyntheticParams sp;
    sp.conversations = 1000;
    corpus::CorpusStore store(corpus::generate_synthetic(sp).conversations);
    aggdb::AggDb db(store);
    auto map = enumerate_proposals(db, {parse_combo("loc,lang->topic"), parse_combo("user,time->subtopic")});
    ASSERT_FALSE(map.empty());
    for (const auto& [key, list] : map) {
        for (std::size_t i = 1; i < list.size(); ++i) EXPECT_LE(list[i - 1].entropy, list[i].entropy);
        for (const auto& p : list) {
            auto agg = db.aggregate(p.conditions, p.target);
            EXPECT_EQ(agg.support, p.support);
            EXPECT_TRUE(admissible(p.conditions, agg.support, agg.rows));
            EXPECT_EQ(agg.rows.front().value, key);
        }
    }
}

TEST(Sample, AtMostTwicePerKey) {
    ProposalMap map;
    map["X"] = {proposal("X", 0.1), proposal("X", 0.2), proposal("X", 0.3)};
    map["Y"] = {proposal("Y", 0.5)};
    auto out = sample_proposals(map, 1);
    ASSERT_EQ(out.size(), 3u);
    std::map<std::string, int> n;
    for (const auto& p : out) ++n[p.top1_value];
    EXPECT_EQ(n["X"], 2);
    EXPECT_EQ(n["Y"], 1);
    // First pass takes one proposal per key.
    std::set<std::string> first{out[0].top1_value, out[1].top1_value};
    EXPECT_EQ(first, (std::set<std::string>{"X", "Y"}));
    EXPECT_EQ(out[2].top1_value, "X");
    EXPECT_DOUBLE_EQ(out[2].entropy, 0.2);
}

TEST(Sample, EmptyAndDeterministic) {
    EXPECT_TRUE(sample_proposals({}, 3).empty());
    ProposalMap map;
    for (int k = 0; k < 10; ++k)
        for (int i = 0; i < 3; ++i) map["k" + std::to_string(k)].push_back(proposal("k" + std::to_string(k), 0.1 * i));
    EXPECT_EQ(sample_proposals(map, 9), sample_proposals(map, 9));
}

TEST(Render, MockTemplateWithConditions) {
    auto client = mock_client();
    QuestionProposal p;
    p.conditions = {{{Attribute::Location, "United States"}, {Attribute::Topic, "Software"}}};
    p.target = Attribute::Subtopic;
    auto text = render_question(p, client);
    EXPECT_NE(text.find("United States"), std::string::npos) << text;
    EXPECT_NE(text.find("Software"), std::string::npos) << text;
    EXPECT_NE(text.find("where"), std::string::npos) << text;
    EXPECT_EQ(render_question(p, client), text);
}

TEST(Render, NoConditionsNoWhereClause) {
    auto client = mock_client();
    QuestionProposal p;
    p.target = Attribute::Topic;
    auto text = render_question(p, client);
    EXPECT_EQ(text.find("where"), std::string::npos) << text;
    EXPECT_NE(text.find("topic"), std::string::npos) << text;
}

TEST(Render, EmptyResponseThrows) {
    clients::MockPolicy policy;
    policy.fixed_responses["question_generation"] = {""};
    clients::MockChatClient client(clients::PromptLibrary::load(clients::default_prompts_dir()), policy);
    EXPECT_THROW(render_question(QuestionProposal{}, client), ParseError);
}

TEST(BuildQuestions, CandidatesAndIds) {
    corpus::SyntheticParams sp;
    sp.conversations = 1000;
    corpus::CorpusStore store(corpus::generate_synthetic(sp).conversations);
    aggdb::AggDb db(store);
    auto sampled = sample_proposals(enumerate_proposals(db, {parse_combo("loc->topic")}), 4);
    ASSERT_FALSE(sampled.empty());
    auto client = mock_client();
    auto rep = build_questions(db, sampled, client, {10, 0, 4});
    ASSERT_EQ(rep.questions.size() + rep.skipped + rep.errors.size(), sampled.size());
    for (std::size_t i = 0; i < rep.questions.size(); ++i) {
        const auto& q = rep.questions[i];
        char id[16];
        std::snprintf(id, sizeof id, "q-%05zu", i + 1);
        EXPECT_EQ(q.id, id);
        EXPECT_EQ(q.candidates.size(), 10u);
        auto want = db.build_candidates(q.conditions, q.target, 10, 0);
        std::multiset<std::uint64_t> a, b;
        for (const auto& c : q.candidates) a.insert(c.grade);
        for (const auto& c : want.candidates) b.insert(c.grade);
        EXPECT_EQ(a, b);
    }
}

TEST(Proposals, JsonlRoundTrip) {
    std::vector<QuestionProposal> ps{proposal("A", 0.25, 70), proposal("B", 0.5, 12)};
    ps[1].target = Attribute::Keywords;
    ps[1].top3_coverage = 0.4;
    std::stringstream ss;
    write_proposals(ss, ps);
    EXPECT_EQ(read_proposals(ss), ps);
}
