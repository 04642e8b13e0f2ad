#include <aqa/clients/mock.hpp>
#include <aqa/error.hpp>
#include <aqa/index/bm25.hpp>
#include <aqa/index/dense.hpp>
#include <aqa/probe/probe.hpp>
#include <aqa/random.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>

#include "fanout_oracle.hpp"
#include "test_util.hpp"

using namespace aqa;
using namespace aqa::probe;
using index::ScoredDoc;

namespace {

const std::vector<std::string> kVocab = {"apple", "banana", "cherry", "date", "elder", "fig", "grape", "kiwi",
                                         "lemon", "mango", "olive", "peach", "pear", "plum", "quince"};
const std::vector<std::string> kCountries = {"Chile", "France", "Japan", "United States"};

std::vector<index::IndexDocument> random_docs(Rng& rng, std::size_t n, bool chunks) {
    std::vector<index::IndexDocument> docs;
    for (std::size_t i = 0; i < n; ++i) {
        index::IndexDocument d;
        d.parent_id = "c" + std::to_string(chunks ? i / 2 : i);
        d.id = chunks ? d.parent_id + "#" + std::to_string(i % 2) : d.parent_id;
        for (std::size_t w = 0, m = 2 + rng.below(10); w < m; ++w) d.text += rng.pick(kVocab) + " ";
        d.parent_tokens = 5 + (chunks ? i / 2 : i);
        d.meta.values[Attribute::Location] = {kCountries[(chunks ? i / 2 : i) % kCountries.size()]};
        d.meta.timestamp = parse_rfc3339("2023-06-01T00:00:00Z") + std::chrono::hours(24 * (i % 30));
        docs.push_back(d);
    }
    return docs;
}

clients::MockChatClient policy_client() {
    clients::MockPolicy p;
    p.metadata_values[Attribute::Location] = kCountries;
    p.content_terms = {"fruit", "apple"};
    p.expansions["fruit"] = {"banana", "cherry", "mango"};
    return clients::MockChatClient(clients::PromptLibrary::load(clients::default_prompts_dir()), p);
}

}  // namespace

TEST(MaxPool, KeepsHighestScore) {
    std::vector<std::vector<ScoredDoc>> per{{{"d", 0.8, 0}, {"e", 0.1, 0}}, {{"d", 0.6, 0}, {"f", 0.7, 0}}};
    auto merged = max_pool_merge(per);
    ASSERT_EQ(merged.size(), 3u);
    EXPECT_EQ(merged[0], (ScoredDoc{"d", 0.8, 0}));
    EXPECT_EQ(merged[1], (ScoredDoc{"f", 0.7, 1}));
    EXPECT_EQ(merged[2], (ScoredDoc{"e", 0.1, 0}));
}

TEST(MaxPool, TieGoesToEarlierQuery) {
    std::vector<std::vector<ScoredDoc>> per{{{"d", 0.5, 0}}, {{"d", 0.5, 0}}};
    EXPECT_EQ(max_pool_merge(per)[0].source_query_index, 0);
}

class FanOut : public ::testing::TestWithParam<bool> {};

TEST_P(FanOut, EqualsUnionMaxOracle) {
    const bool dense = GetParam();
    Rng rng(dense ? 31 : 32);
    auto docs = random_docs(rng, 120, !dense);
    clients::MockEmbedder emb(64, 1);
    std::vector<std::string> texts;
    for (const auto& d : docs) texts.push_back(d.text);
    auto r = dense ? Retriever::dense(std::make_shared<index::DenseIndex>(docs, emb.embed(texts)), emb)
                   : Retriever::bm25(std::make_shared<index::Bm25Index>(docs));
    for (int trial = 0; trial < 100; ++trial) {
        BroadQuerySet bqs;
        for (std::size_t q = 0, n = 1 + rng.below(5); q < n; ++q)
            bqs.queries.push_back(rng.pick(kVocab) + " " + rng.pick(kVocab));
        if (rng.bernoulli(0.5))
            bqs.filters.clauses.push_back(index::FilterClause::equals(Attribute::Location, rng.pick(kCountries)));
        std::size_t per_k = 1 + rng.below(20), final_k = 1 + rng.below(30);
        auto got = fan_out_retrieve(r, bqs, per_k, final_k);
        auto want = oracle::union_max_oracle(r, bqs, per_k, final_k);
        ASSERT_EQ(got.docs, want) << "trial " << trial;
        std::size_t tokens = 0;
        for (const auto& d : got.docs) tokens += r.table().parent_tokens(d.doc_id);
        EXPECT_EQ(got.token_total, tokens);
        for (const auto& d : got.docs) {
            auto it = std::find_if(docs.begin(), docs.end(), [&](const auto& x) { return x.parent_id == d.doc_id; });
            ASSERT_NE(it, docs.end());
            EXPECT_TRUE(bqs.filters.matches(it->meta));
        }

        // Query order never changes the merged documents or scores.
        auto reversed = bqs;
        std::reverse(reversed.queries.begin(), reversed.queries.end());
        auto again = fan_out_retrieve(r, reversed, per_k, final_k);
        ASSERT_EQ(again.docs.size(), got.docs.size());
        for (std::size_t i = 0; i < got.docs.size(); ++i) {
            EXPECT_EQ(again.docs[i].doc_id, got.docs[i].doc_id);
            EXPECT_EQ(again.docs[i].score, got.docs[i].score);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Backends, FanOut, ::testing::Values(false, true),
                         [](const auto& info) { return info.param ? std::string("Dense") : std::string("Bm25"); });

TEST(FanOutEdge, SingleQueryEqualsFilteredSearch) {
    Rng rng(3);
    auto docs = random_docs(rng, 60, false);
    auto r = Retriever::bm25(std::make_shared<index::Bm25Index>(docs));
    BroadQuerySet bqs;
    bqs.queries = {"apple mango"};
    bqs.filters.clauses.push_back(index::FilterClause::equals(Attribute::Location, "Japan"));
    auto got = fan_out_retrieve(r, bqs, 0, 10);
    EXPECT_EQ(got.docs, r.search("apple mango", bqs.filters, 10));
}

TEST(FanOutEdge, ZeroKAndNoQueriesThrow) {
    Rng rng(3);
    auto r = Retriever::bm25(std::make_shared<index::Bm25Index>(random_docs(rng, 10, false)));
    BroadQuerySet bqs;
    bqs.queries = {"apple"};
    EXPECT_THROW(fan_out_retrieve(r, bqs, 5, 0), InvalidArgument);
    EXPECT_THROW(rag_retrieve(r, "apple", 0), InvalidArgument);
    EXPECT_THROW(fan_out_retrieve(r, BroadQuerySet{}, 5, 5), InvalidArgument);
}

TEST(Rag, EqualsUnfilteredDenseSearch) {
    Rng rng(4);
    auto docs = random_docs(rng, 80, false);
    clients::MockEmbedder emb(64, 2);
    std::vector<std::string> texts;
    for (const auto& d : docs) texts.push_back(d.text);
    auto idx = std::make_shared<index::DenseIndex>(docs, emb.embed(texts));
    auto r = Retriever::dense(idx, emb);
    auto got = rag_retrieve(r, "plum pear", 15);
    EXPECT_EQ(got.docs, idx->search(emb.embed_one("plum pear"), {}, 15));
    EXPECT_EQ(got.k, 15u);
}

TEST(Ablate, FilterOnlyPassesFilterNewestFirst) {
    Rng rng(5);
    auto docs = random_docs(rng, 60, false);
    auto r = Retriever::bm25(std::make_shared<index::Bm25Index>(docs));
    BroadQuerySet bqs;
    bqs.queries = {"apple"};
    bqs.filters.clauses.push_back(index::FilterClause::equals(Attribute::Location, "Chile"));
    auto ev = ablate(AblationMode::FilterOnly, r, "question", bqs, 100);
    EXPECT_EQ(ev.docs.size(), 15u);
    std::map<std::string, const index::IndexDocument*> by_id;
    for (const auto& d : docs) by_id[d.id] = &d;
    for (std::size_t i = 0; i < ev.docs.size(); ++i) {
        EXPECT_TRUE(bqs.filters.matches(by_id.at(ev.docs[i].doc_id)->meta));
        if (i) EXPECT_GE(ev.docs[i - 1].score, ev.docs[i].score);
    }
}

TEST(Ablate, QuestionAndFilterWithoutFiltersIsRag) {
    Rng rng(6);
    auto r = Retriever::bm25(std::make_shared<index::Bm25Index>(random_docs(rng, 60, false)));
    BroadQuerySet bqs;
    bqs.queries = {"ignored"};
    EXPECT_EQ(ablate(AblationMode::QuestionAndFilter, r, "kiwi lemon", bqs, 20), rag_retrieve(r, "kiwi lemon", 20));
    EXPECT_THROW(parse_ablation_mode("neither"), Error);
}

TEST(Oracle, SeededSubsetOfSupport) {
    Rng rng(7);
    auto r = Retriever::bm25(std::make_shared<index::Bm25Index>(random_docs(rng, 30, false)));
    std::vector<std::string> ids{"c1", "c2", "c3", "c4", "missing"};
    auto a = oracle_evidence(ids, r.table(), 3, 9);
    EXPECT_EQ(a, oracle_evidence(ids, r.table(), 3, 9));
    EXPECT_EQ(a.docs.size(), 3u);
    for (const auto& d : a.docs) EXPECT_NE(d.doc_id, "missing");
}

TEST(BroadQueries, MockRecognizesLocation) {
    auto client = policy_client();
    auto bqs = generate_broad_queries("Which fruit do users in the United States ask about most?", client);
    ASSERT_EQ(bqs.filters.clauses.size(), 1u);
    EXPECT_EQ(bqs.filters.clauses[0], index::FilterClause::equals(Attribute::Location, "United States"));
    EXPECT_FALSE(bqs.queries.empty());
    EXPECT_EQ(bqs, generate_broad_queries("Which fruit do users in the United States ask about most?", client));
}

TEST(BroadQueries, TruncatesToMaxN) {
    clients::MockPolicy p;
    p.fixed_responses["probe_queries"] = {R"({"filters": [], "queries": ["a", "b", "c", "d", "e"]})"};
    clients::MockChatClient client(clients::PromptLibrary::load(clients::default_prompts_dir()), p);
    auto bqs = generate_broad_queries("q", client, 3);
    EXPECT_EQ(bqs.queries, (std::vector<std::string>{"a", "b", "c"}));
}

TEST(BroadQueries, Errors) {
    clients::MockPolicy p;
    p.fixed_responses["probe_queries"] = {"not json", R"({"filters": [], "queries": []})"};
    clients::MockChatClient client(clients::PromptLibrary::load(clients::default_prompts_dir()), p);
    EXPECT_THROW(generate_broad_queries("", client), InvalidArgument);
    EXPECT_THROW(generate_broad_queries("q", client), ParseError);
    EXPECT_THROW(generate_broad_queries("q", client), ParseError);
}

TEST(BroadQueries, BadFilterClausesDropped) {
    clients::MockPolicy p;
    p.fixed_responses["probe_queries"] = {
        R"({"filters": [{"attribute": "planet", "op": "equals", "value": "Mars"}, {"attribute": "location", "op": "equals", "value": "Chile"}], "queries": ["x"]})"};
    clients::MockChatClient client(clients::PromptLibrary::load(clients::default_prompts_dir()), p);
    auto bqs = generate_broad_queries("q", client);
    EXPECT_EQ(bqs.filters.clauses.size(), 1u);
    EXPECT_EQ(bqs.dropped_filters.size(), 1u);
}

TEST(Serialization, RoundTrips) {
    BroadQuerySet bqs;
    bqs.queries = {"a", "b"};
    bqs.filters.clauses.push_back(index::FilterClause::equals(Attribute::Language, "German"));
    EXPECT_EQ(broad_query_set_from_json(to_json(bqs)), bqs);
    EvidenceSet ev{{{"c1", 0.5, 1}, {"c2", 0.25, 0}}, 10, 42};
    EXPECT_EQ(evidence_from_json(to_json(ev)), ev);
    RetrievalConfig cfg;
    cfg.mode = RetrievalMode::FilterOnly;
    cfg.final_k = 7;
    EXPECT_EQ(retrieval_config_from_json(to_json(cfg)), cfg);
    EXPECT_THROW(retrieval_config_from_json(nlohmann::json{{"final_kk", 3}}), Error);
    cfg.final_k = 0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
}
