#include <aqa/aggdb/aggdb.hpp>
#include <aqa/aggdb/question.hpp>
#include <aqa/corpus/synthetic.hpp>
#include <aqa/error.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <set>
#include <sstream>

#include "naive_aggdb.hpp"
#include "test_util.hpp"

using namespace aqa;
using namespace aqa::aggdb;

namespace {

corpus::CorpusStore planted() {
    corpus::CorpusStore store;
    for (int i = 0; i < 100; ++i) {
        auto c = test::make_conv("c" + std::to_string(i), "u" + std::to_string(i % 4), i < 60 ? "United States" : "Peru");
        c.topics = {i < 60 ? "A" : "B"};
        store.add(c);
    }
    return store;
}

corpus::CorpusStore with_topics(const std::vector<std::pair<std::string, int>>& sizes) {
    corpus::CorpusStore store;
    int id = 0;
    for (const auto& [topic, n] : sizes)
        for (int i = 0; i < n; ++i) {
            auto c = test::make_conv("c" + std::to_string(id++), "u");
            c.topics = {topic};
            store.add(c);
        }
    return store;
}

}  // namespace

TEST(Match, EmptyConditionSetMatchesAll) {
    auto store = planted();
    AggDb db(store);
    EXPECT_EQ(db.match({}).size(), 100u);
}

TEST(Match, PlantedLocation) {
    auto store = planted();
    AggDb db(store);
    ConditionSet cs{{{Attribute::Location, "United States"}}};
    auto ids = db.match(cs);
    EXPECT_EQ(ids.size(), 60u);
    EXPECT_EQ(ids, oracle::naive_match(store, cs));
}

TEST(Match, AbsentValueEmpty) {
    auto store = planted();
    AggDb db(store);
    EXPECT_TRUE(db.match({{{Attribute::Location, "Atlantis"}}}).empty());
}

TEST(Match, RepeatedUserMeansAnyOf) {
    auto store = planted();
    AggDb db(store);
    ConditionSet cs{{{Attribute::User, "u0"}, {Attribute::User, "u1"}}};
    EXPECT_EQ(db.match(cs).size(), 50u);
}

TEST(Match, TimePeriodCondition) {
    corpus::CorpusStore store;
    store.add(test::make_conv("apr", "u", "X", "Y", "t", "2023-04-30T23:59:59Z"));
    store.add(test::make_conv("may", "u", "X", "Y", "t", "2023-05-01T00:00:00Z"));
    AggDb db(store);
    EXPECT_EQ(db.match({{{Attribute::Time, "2023-04"}}}), std::vector<std::string>{"apr"});
    EXPECT_THROW(db.match({{{Attribute::Time, "april"}}}), Error);
}

TEST(ConditionSet, AtMostThree) {
    ConditionSet cs{{{Attribute::User, "a"}, {Attribute::User, "b"}, {Attribute::User, "c"}, {Attribute::User, "d"}}};
    EXPECT_THROW(cs.validate(), InvalidArgument);
}

TEST(ConditionSet, UnknownAttributeInJsonThrows) {
    auto j = nlohmann::json::parse(R"([{"attribute":"colour","value":"red"}])");
    EXPECT_THROW(condition_set_from_json(j), Error);
}

TEST(Aggregate, PlantedCounts) {
    auto store = planted();
    AggDb db(store);
    auto r = db.aggregate({}, Attribute::Topic);
    EXPECT_EQ(r.rows, (std::vector<AggregationRow>{{"A", 60}, {"B", 40}}));
    EXPECT_EQ(r.support, 100u);
}

TEST(Aggregate, ZeroMatches) {
    auto store = planted();
    AggDb db(store);
    auto r = db.aggregate({{{Attribute::Location, "Atlantis"}}}, Attribute::Topic);
    EXPECT_TRUE(r.rows.empty());
    EXPECT_EQ(r.support, 0u);
}

TEST(Aggregate, TiesLexicographic) {
    auto store = with_topics({{"Zeta", 50}, {"Alpha", 50}});
    AggDb db(store);
    auto r = db.aggregate({}, Attribute::Topic);
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_EQ(r.rows[0].value, "Alpha");
    EXPECT_EQ(r.rows[1].value, "Zeta");
}

TEST(Aggregate, TargetAmongConditionsThrows) {
    auto store = planted();
    AggDb db(store);
    EXPECT_THROW(db.aggregate({{{Attribute::Topic, "A"}}}, Attribute::Topic), InvalidArgument);
}

TEST(Aggregate, MultiValuedCountedOncePerConversation) {
    corpus::CorpusStore store;
    auto c = test::make_conv("c", "u");
    c.keywords = {"x", "x", "y"};
    store.add(c);
    AggDb db(store);
    auto r = db.aggregate({}, Attribute::Keywords);
    EXPECT_EQ(r.rows, (std::vector<AggregationRow>{{"x", 1}, {"y", 1}}));
}

TEST(Candidates, TopTenOfTwelve) {
    std::vector<std::pair<std::string, int>> sizes;
    for (int i = 0; i < 12; ++i) sizes.emplace_back("t" + std::to_string(10 + i), 12 - i);
    auto store = with_topics(sizes);
    AggDb db(store);
    auto cs = db.build_candidates({}, Attribute::Topic);
    ASSERT_EQ(cs.candidates.size(), 10u);
    for (int i = 0; i < 10; ++i) {
        EXPECT_EQ(cs.candidates[i].value, "t" + std::to_string(10 + i));
        EXPECT_EQ(cs.candidates[i].grade, static_cast<std::uint64_t>(12 - i));
    }
}

TEST(Candidates, SevenValuesPaddedToTen) {
    std::vector<std::pair<std::string, int>> sizes;
    for (int i = 0; i < 15; ++i) sizes.emplace_back("t" + std::to_string(10 + i), 3 + i);
    auto store = with_topics(sizes);
    AggDb db(store);
    // Restrict to the first seven topics by user.
    corpus::CorpusStore store2;
    for (auto c : store) {
        int t = std::stoi(c.topics[0].substr(1)) - 10;
        c.user = t < 7 ? "seven" : "other";
        store2.add(c);
    }
    AggDb db2(store2);
    auto cs = db2.build_candidates({{{Attribute::User, "seven"}}}, Attribute::Topic, 10, 3);
    ASSERT_EQ(cs.candidates.size(), 10u);
    std::set<std::string> values;
    std::size_t graded = 0;
    for (const auto& c : cs.candidates) {
        values.insert(c.value);
        graded += c.grade > 0;
    }
    EXPECT_EQ(values.size(), 10u);
    EXPECT_EQ(graded, 7u);
    for (std::size_t i = 7; i < 10; ++i) EXPECT_EQ(cs.candidates[i].grade, 0u);
    EXPECT_EQ(cs, db2.build_candidates({{{Attribute::User, "seven"}}}, Attribute::Topic, 10, 3));
}

TEST(Candidates, ExactlyTenNoPadding) {
    std::vector<std::pair<std::string, int>> sizes;
    for (int i = 0; i < 10; ++i) sizes.emplace_back("t" + std::to_string(i), 1 + i);
    auto store = with_topics(sizes);
    AggDb db(store);
    auto cs = db.build_candidates({}, Attribute::Topic);
    for (const auto& c : cs.candidates) EXPECT_GT(c.grade, 0u);
}

TEST(Candidates, EmptyAggregationThrows) {
    auto store = planted();
    AggDb db(store);
    EXPECT_THROW(db.build_candidates({{{Attribute::Location, "Atlantis"}}}, Attribute::Topic), InvalidArgument);
}

class AggDbOracle : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        corpus::SyntheticParams p;
        p.conversations = 1000;
        store_ = new corpus::CorpusStore(corpus::generate_synthetic(p).conversations);
    }
    static void TearDownTestSuite() { delete store_; }
    static corpus::CorpusStore* store_;
};
corpus::CorpusStore* AggDbOracle::store_ = nullptr;

TEST_F(AggDbOracle, AggregateAndCandidatesMatchFullScan) {
    AggDb db(*store_);
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        auto [cs, target] = oracle::random_query(*store_, rng);
        auto expected = oracle::naive_aggregate(*store_, cs, target);
        ASSERT_EQ(db.aggregate(cs, target), expected) << cs.describe();
        EXPECT_EQ(db.match(cs), oracle::naive_match(*store_, cs));
        if (expected.rows.empty()) {
            EXPECT_THROW(db.build_candidates(cs, target), InvalidArgument);
            continue;
        }
        auto cands = db.build_candidates(cs, target, 10, i);
        auto graded = oracle::naive_graded(*store_, cs, target, 10);
        ASSERT_GE(cands.candidates.size(), graded.graded.size());
        EXPECT_TRUE(std::equal(graded.graded.begin(), graded.graded.end(), cands.candidates.begin()));
        EXPECT_EQ(cands.supporting_ids, graded.supporting_ids);
        std::set<std::string> distinct;
        for (const auto& c : cands.candidates) distinct.insert(c.value);
        EXPECT_EQ(distinct.size(), cands.candidates.size());
    }
}

TEST_F(AggDbOracle, AddingConditionNeverIncreasesSupport) {
    AggDb db(*store_);
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        auto [cs, target] = oracle::random_query(*store_, rng);
        if (cs.conditions.size() >= 3) continue;
        const auto& c = store_->conversations()[rng.below(store_->size())];
        Attribute extra = rng.bernoulli(0.5) ? Attribute::Language : Attribute::Topic;
        if (cs.has(extra) || extra == target || c.topics.empty()) continue;
        auto more = cs;
        more.conditions.push_back({extra, extra == Attribute::Language ? c.language : c.topics[0]});
        EXPECT_LE(db.aggregate(more, target).support, db.aggregate(cs, target).support);
    }
}

TEST(Question, JsonlRoundTrip) {
    AggregativeQuestion q;
    q.id = "q-00001";
    q.question_text = "Which topic?";
    q.conditions = {{{Attribute::Location, "Peru"}}};
    q.target = Attribute::Topic;
    q.candidates = {{"A", 3}, {"B", 0}};
    q.supporting_ids = {"c1", "c2"};
    std::stringstream ss;
    write_questions(ss, {q, q});
    auto back = read_questions(ss);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0], q);
}

TEST(Question, BadLineReportsLineNumber) {
    std::stringstream ss("{}\n");
    try {
        read_questions(ss);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("1"), std::string::npos);
    }
}
