#include <aqa/corpus/chunker.hpp>
#include <aqa/error.hpp>
#include <aqa/index/bm25.hpp>
#include <aqa/index/dense.hpp>
#include <aqa/index/documents.hpp>
#include <aqa/index/filter.hpp>
#include <aqa/random.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "test_util.hpp"

using namespace aqa;
using namespace aqa::index;

namespace {

IndexDocument doc(std::string id, std::string text, std::string location = "United States",
                  std::string parent = "") {
    IndexDocument d;
    d.id = id;
    d.parent_id = parent.empty() ? id : parent;
    d.text = std::move(text);
    d.parent_tokens = 10;
    d.meta.values[Attribute::Location] = {std::move(location)};
    d.meta.timestamp = parse_rfc3339("2023-05-10T00:00:00Z");
    return d;
}

std::vector<ScoredDoc> brute_force(const std::vector<std::pair<std::string, double>>& scores, std::size_t k) {
    std::vector<ScoredDoc> out;
    for (const auto& [id, s] : scores) out.push_back({id, s, 0});
    std::sort(out.begin(), out.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
    });
    if (out.size() > k) out.resize(k);
    return out;
}

EmbeddingVector random_unit(Rng& rng, std::size_t dim) {
    EmbeddingVector v(dim);
    for (auto& x : v) x = rng.normal();
    return normalized(std::move(v));
}

std::string random_text(Rng& rng, std::size_t n) {
    static const std::vector<std::string> vocab = {"apple", "banana", "cherry", "date", "elder", "fig",
                                                   "grape", "honeydew", "kiwi", "lemon", "mango", "nectarine"};
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += rng.pick(vocab) + " ";
    return s;
}

}  // namespace

TEST(Bm25, HandComputedToyCorpus) {
    Bm25Index idx({doc("d0", "apple banana"), doc("d1", "apple apple cherry"), doc("d2", "banana date egg fig")});
    // N=3, df(apple)=2, avgdl=3.
    const double idf = std::log(1.6);
    EXPECT_NEAR(idx.score("apple", 0), idf * 2.2 / 1.9, 1e-9);
    EXPECT_NEAR(idx.score("apple", 1), idf * 1.375, 1e-9);
    EXPECT_EQ(idx.score("apple", 2), 0.0);
    // Two query terms add up; banana has df=2 as well.
    EXPECT_NEAR(idx.score("apple banana", 0), 2 * idf * 2.2 / 1.9, 1e-9);
}

TEST(Bm25, EmptyCorpusThrows) {
    EXPECT_THROW(Bm25Index(std::vector<IndexDocument>{}), InvalidArgument);
}

TEST(Bm25, DuplicateIdsThrow) {
    EXPECT_THROW(Bm25Index({doc("a", "x"), doc("a", "y")}), InvalidArgument);
}

TEST(Bm25, ZeroKThrows) {
    Bm25Index idx({doc("a", "apple")});
    EXPECT_THROW(idx.search("apple", {}, 0), InvalidArgument);
}

TEST(Bm25, MatchingDocRanksAboveNonMatching) {
    Bm25Index idx({doc("none", "cherry date"), doc("all", "apple banana")});
    auto hits = idx.search("apple banana", {}, 10);
    ASSERT_FALSE(hits.empty());
    EXPECT_EQ(hits[0].doc_id, "all");
    for (const auto& h : hits) EXPECT_NE(h.doc_id, "none");
}

TEST(Bm25, FilterExcludesHigherScoringDoc) {
    Bm25Index idx({doc("fr", "apple apple apple", "France"), doc("us", "apple pie", "United States")});
    MetadataFilter f{{FilterClause::equals(Attribute::Location, "United States")}};
    auto hits = idx.search("apple", f, 5);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].doc_id, "us");
}

TEST(Bm25, SearchMatchesFullScan) {
    Rng rng(21);
    std::vector<IndexDocument> docs;
    for (int i = 0; i < 100; ++i)
        docs.push_back(doc("d" + std::to_string(i), random_text(rng, 3 + rng.below(20)), i % 3 ? "France" : "Chile"));
    Bm25Index idx(docs);
    MetadataFilter f{{FilterClause::equals(Attribute::Location, "France")}};
    for (int q = 0; q < 20; ++q) {
        std::string query = random_text(rng, 1 + rng.below(3));
        std::vector<std::pair<std::string, double>> all;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            if (!f.matches(docs[i].meta)) continue;
            double s = idx.score(query, i);
            if (s > 0) all.emplace_back(docs[i].id, s);
        }
        auto expected = brute_force(all, 10);
        auto got = idx.search(query, f, 10);
        ASSERT_EQ(got.size(), expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i].doc_id, expected[i].doc_id);
            EXPECT_DOUBLE_EQ(got[i].score, expected[i].score);
        }
    }
}

TEST(Bm25, PersistRoundTrip) {
    Rng rng(2);
    std::vector<IndexDocument> docs;
    for (int i = 0; i < 30; ++i) docs.push_back(doc("d" + std::to_string(i), random_text(rng, 10)));
    Bm25Index idx(docs);
    auto dir = test::temp_dir("bm25_roundtrip");
    idx.save(dir.string());
    auto back = Bm25Index::load(dir.string());
    for (const char* q : {"apple kiwi", "mango", "lemon grape fig"})
        EXPECT_EQ(idx.search(q, {}, 30), back.search(q, {}, 30));
}

TEST(Bm25, ChunksMaxPoolIntoParent) {
    Bm25Index idx({doc("p#0", "apple", "X", "p"), doc("p#1", "apple apple apple banana", "X", "p"),
                   doc("q", "banana cherry date")});
    auto hits = idx.search("apple", {}, 5);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].doc_id, "p");
    EXPECT_DOUBLE_EQ(hits[0].score, std::max(idx.score("apple", 0), idx.score("apple", 1)));
}

TEST(Dense, SingleVector) {
    DenseIndex idx({doc("a", "t")}, {{3.0, 4.0}});
    EXPECT_EQ(idx.table().size(), 1u);
    EXPECT_NEAR(idx.vector(0)[0], 0.6, 1e-12);
}

TEST(Dense, DimensionMismatchThrows) {
    EXPECT_THROW(DenseIndex({doc("a", "t"), doc("b", "t")}, {{1.0, 0.0}, {1.0, 0.0, 0.0}}), InvalidArgument);
    DenseIndex idx({doc("a", "t")}, {{1.0, 0.0}});
    EmbeddingVector q{1.0, 0.0, 0.0};
    EXPECT_THROW(idx.search(q, {}, 1), InvalidArgument);
}

TEST(Dense, SelfQueryAndOrthogonal) {
    DenseIndex idx({doc("x", "t"), doc("y", "t")}, {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
    EmbeddingVector q{1.0, 0.0, 0.0};
    auto hits = idx.search(q, {}, 2);
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(hits[0].doc_id, "x");
    EXPECT_DOUBLE_EQ(hits[0].score, 1.0);
    EXPECT_DOUBLE_EQ(hits[1].score, 0.0);
}

TEST(Dense, NormalizeRejectsZero) {
    EXPECT_THROW(normalized({0.0, 0.0}), InvalidArgument);
    EXPECT_THROW(normalized({}), InvalidArgument);
}

class DenseExactness : public ::testing::TestWithParam<std::pair<std::size_t, std::size_t>> {};

TEST_P(DenseExactness, MatchesExhaustiveScan) {
    const auto [n, k] = GetParam();
    Rng rng(n);
    const std::size_t dim = 32;
    std::vector<IndexDocument> docs;
    std::vector<EmbeddingVector> vecs;
    for (std::size_t i = 0; i < n; ++i) {
        docs.push_back(doc("v" + std::to_string(i), "t", i % 2 ? "France" : "Chile"));
        vecs.push_back(random_unit(rng, dim));
    }
    DenseIndex idx(docs, vecs);
    MetadataFilter f{{FilterClause::equals(Attribute::Location, "Chile")}};
    for (int q = 0; q < 10; ++q) {
        auto query = random_unit(rng, dim);
        for (const MetadataFilter* filter : {static_cast<const MetadataFilter*>(nullptr), static_cast<const MetadataFilter*>(&f)}) {
            std::vector<std::pair<std::string, double>> all;
            for (std::size_t i = 0; i < n; ++i) {
                if (filter && !filter->matches(docs[i].meta)) continue;
                double s = 0;
                for (std::size_t d = 0; d < dim; ++d) s += vecs[i][d] * query[d];
                all.emplace_back(docs[i].id, s);
            }
            auto expected = brute_force(all, k);
            auto got = idx.search(query, filter ? *filter : MetadataFilter{}, k);
            ASSERT_EQ(got.size(), expected.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                EXPECT_EQ(got[i].doc_id, expected[i].doc_id);
                EXPECT_NEAR(got[i].score, expected[i].score, 1e-12);
            }
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Sizes, DenseExactness,
                         ::testing::Values(std::pair<std::size_t, std::size_t>{500, 5},
                                           std::pair<std::size_t, std::size_t>{1000, 20}));

TEST(Dense, PersistRoundTrip) {
    Rng rng(8);
    std::vector<IndexDocument> docs;
    std::vector<EmbeddingVector> vecs;
    for (int i = 0; i < 50; ++i) {
        docs.push_back(doc("v" + std::to_string(i), "t"));
        vecs.push_back(random_unit(rng, 16));
    }
    DenseIndex idx(docs, vecs);
    auto dir = test::temp_dir("dense_roundtrip");
    idx.save(dir.string());
    auto back = DenseIndex::load(dir.string());
    auto q = random_unit(rng, 16);
    EXPECT_EQ(idx.search(q, {}, 50), back.search(q, {}, 50));
}

TEST(Dense, EnlargingKKeepsPrefix) {
    Rng rng(4);
    std::vector<IndexDocument> docs;
    std::vector<EmbeddingVector> vecs;
    for (int i = 0; i < 200; ++i) {
        docs.push_back(doc("v" + std::to_string(i), "t"));
        vecs.push_back(random_unit(rng, 8));
    }
    DenseIndex idx(docs, vecs);
    auto q = random_unit(rng, 8);
    auto small = idx.search(q, {}, 10);
    auto large = idx.search(q, {}, 50);
    ASSERT_GE(large.size(), small.size());
    EXPECT_TRUE(std::equal(small.begin(), small.end(), large.begin()));
}

TEST(Filter, ConjunctionAndMultiValued) {
    DocMeta m;
    m.timestamp = parse_rfc3339("2023-04-30T23:59:59Z");
    m.values[Attribute::Location] = {"Chile"};
    m.values[Attribute::Topic] = {"Cooking", "Travel"};
    MetadataFilter f{{FilterClause::equals(Attribute::Location, "Chile"), FilterClause::equals(Attribute::Topic, "Travel")}};
    EXPECT_TRUE(f.matches(m));
    f.clauses.push_back(FilterClause::in_set(Attribute::Language, {"Spanish"}));
    EXPECT_FALSE(f.matches(m));
    EXPECT_TRUE(MetadataFilter{}.matches(m));
}

TEST(Filter, TimeRangeInclusiveStartExclusiveEnd) {
    auto april = FilterClause::time_range(parse_period("2023-04"));
    DocMeta m;
    m.timestamp = parse_rfc3339("2023-04-01T00:00:00Z");
    EXPECT_TRUE(april.matches(m));
    m.timestamp = parse_rfc3339("2023-05-01T00:00:00Z");
    EXPECT_FALSE(april.matches(m));
}

TEST(Filter, JsonRoundTripAndLenientDrop) {
    MetadataFilter f{{FilterClause::equals(Attribute::Location, "Chile"),
                      FilterClause::time_range(parse_period("2023-W17"))}};
    EXPECT_EQ(filter_from_json(to_json(f)), f);
    auto j = nlohmann::json::parse(
        R"([{"attribute":"location","op":"equals","value":"Chile"},{"attribute":"topic","op":"equals","value":"X"},{"bogus":1}])");
    std::vector<std::string> dropped;
    auto lenient = filter_from_json_lenient(j, dropped);
    EXPECT_EQ(lenient.clauses.size(), 1u);
    EXPECT_EQ(dropped.size(), 2u);
    EXPECT_THROW(filter_from_json(j), ParseError);
}

TEST(Documents, SummaryAndRawGranularity) {
    corpus::CorpusStore store;
    auto c = test::make_conv("c1", "u", "Chile", "Spanish", "First sentence here. Second one.");
    c.summary = "short";
    c.token_count = 7;
    store.add(c);
    auto sum = make_documents(store, TextGranularity::Summary);
    ASSERT_EQ(sum.size(), 1u);
    EXPECT_EQ(sum[0].text, "short");
    auto raw = make_documents(store, TextGranularity::Raw);
    ASSERT_EQ(raw.size(), 1u);
    EXPECT_EQ(raw[0].parent_id, "c1");
    EXPECT_EQ(raw[0].id, "c1#0");
}
