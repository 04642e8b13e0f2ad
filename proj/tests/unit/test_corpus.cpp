#include <aqa/corpus/chunker.hpp>
#include <aqa/corpus/conversation.hpp>
#include <aqa/corpus/dedup.hpp>
#include <aqa/corpus/filters.hpp>
#include <aqa/corpus/ingest.hpp>
#include <aqa/corpus/minhash.hpp>
#include <aqa/corpus/synthetic.hpp>
#include <aqa/corpus/tokenizer.hpp>
#include <aqa/corpus/user_id.hpp>
#include <aqa/error.hpp>
#include <aqa/random.hpp>
#include <aqa/text.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

#include "test_util.hpp"

using namespace aqa;
using namespace aqa::corpus;

namespace {

std::string record(const std::string& id, const std::string& extra = "") {
    std::string r = R"({"id":")" + id +
                    R"(","user":"u1","timestamp":"2023-05-01T10:00:00Z","location":"France","language":"French","text":"Bonjour a tous.")";
    return r + extra + "}";
}

std::string random_words(Rng& rng, std::size_t n, std::size_t vocab) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += ' ';
        s += "w" + std::to_string(rng.below(vocab));
    }
    return s;
}

}  // namespace

TEST(Ingest, ThreeValidLines) {
    std::istringstream in(record("a") + "\n" + record("b") + "\n" + record("c") + "\n");
    CorpusStore store;
    auto rep = ingest(in, store);
    EXPECT_EQ(rep.accepted, 3u);
    EXPECT_TRUE(rep.rejected.empty());
    EXPECT_EQ(store.size(), 3u);
}

TEST(Ingest, MissingTextNamesField) {
    std::istringstream in(record("a") + "\n" +
                          R"({"id":"b","user":"u","timestamp":"2023-05-01T10:00:00Z","location":"x","language":"y"})" +
                          "\n" + record("c") + "\n");
    CorpusStore store;
    auto rep = ingest(in, store);
    EXPECT_EQ(rep.accepted, 2u);
    ASSERT_EQ(rep.rejected.size(), 1u);
    EXPECT_EQ(rep.rejected[0].line, 2u);
    EXPECT_NE(rep.rejected[0].message.find("text"), std::string::npos);
}

TEST(Ingest, DuplicateIdNamesId) {
    std::istringstream in(record("dup-7") + "\n" + record("dup-7") + "\n");
    CorpusStore store;
    auto rep = ingest(in, store);
    EXPECT_EQ(rep.accepted, 1u);
    ASSERT_EQ(rep.rejected.size(), 1u);
    EXPECT_EQ(rep.rejected[0].line, 2u);
    EXPECT_NE(rep.rejected[0].message.find("dup-7"), std::string::npos);
}

TEST(Ingest, MalformedJsonContinues) {
    std::istringstream in("{not json\n\n" + record("ok") + "\n");
    CorpusStore store;
    auto rep = ingest(in, store);
    EXPECT_EQ(rep.accepted, 1u);
    ASSERT_EQ(rep.rejected.size(), 1u);
    EXPECT_EQ(rep.rejected[0].line, 1u);
}

TEST(Ingest, UnknownFieldsIgnoredAndTokenCountRecomputed) {
    std::istringstream in(record("a", R"(,"mood":"happy","token_count":999)") + "\n");
    CorpusStore store;
    ingest(in, store);
    ASSERT_EQ(store.size(), 1u);
    EXPECT_EQ(store.at("a").token_count, count_tokens("Bonjour a tous."));
}

TEST(Ingest, UserDerivedFromOrigin) {
    std::istringstream in(
        R"({"id":"a","ip":"1.2.3.4","headers":"UA","timestamp":"2023-05-01T10:00:00Z","location":"x","language":"y","text":"t"})"
        "\n");
    CorpusStore store;
    ingest(in, store);
    EXPECT_EQ(store.at("a").user, derive_user_id("1.2.3.4", "UA"));
}

TEST(Conversation, JsonRoundTrip) {
    auto c = test::make_conv("x", "u", "Chile", "Spanish", "Hola. Que tal?");
    c.summary = "greeting";
    c.topics = {"Small Talk"};
    c.keywords = {"hola"};
    c.token_count = count_tokens(c.text);
    auto back = conversation_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));
}

TEST(UserId, Deterministic) {
    EXPECT_EQ(derive_user_id("10.0.0.1", "Mozilla"), derive_user_id("10.0.0.1", "Mozilla"));
    EXPECT_NE(derive_user_id("10.0.0.1", "Mozilla"), derive_user_id("10.0.0.2", "Mozilla"));
}

TEST(UserId, EmptyInputsGiveReadableName) {
    auto name = derive_user_id("", "");
    ASSERT_FALSE(name.empty());
    EXPECT_TRUE(std::islower(static_cast<unsigned char>(name.front())));
    EXPECT_TRUE(std::isdigit(static_cast<unsigned char>(name.back())));
}

TEST(UserId, NoCollisionsOnHundredThousandOrigins) {
    std::unordered_set<std::string> names;
    for (int i = 0; i < 100000; ++i) {
        std::string ip = std::to_string(i / 65536) + "." + std::to_string((i / 256) % 256) + "." + std::to_string(i % 256) + ".9";
        names.insert(derive_user_id(ip, "agent-" + std::to_string(i % 7)));
    }
    EXPECT_EQ(names.size(), 100000u);
}

TEST(Filters, LengthBoundaryIsStrict) {
    auto c = test::make_conv("a", "u");
    c.token_count = 4096;
    EXPECT_TRUE(keep_by_length(c));
    c.token_count = 4097;
    EXPECT_FALSE(keep_by_length(c));
    c.token_count = 0;
    EXPECT_TRUE(keep_by_length(c));
}

TEST(Filters, ActiveUsersAllOrNothing) {
    CorpusStore store;
    for (int i = 0; i < 10; ++i) store.add(test::make_conv("a" + std::to_string(i), "ten"));
    for (int i = 0; i < 9; ++i) store.add(test::make_conv("b" + std::to_string(i), "nine"));
    auto out = filter_active_users(store);
    EXPECT_EQ(out.size(), 10u);
    for (const auto& c : out) EXPECT_EQ(c.user, "ten");
    EXPECT_TRUE(filter_active_users(CorpusStore{}).empty());
}

TEST(Filters, ActiveUsersPropertyOnSynthetic) {
    SyntheticParams p;
    p.conversations = 400;
    p.active_users = 20;
    p.inactive_users = 6;
    auto syn = generate_synthetic(p);
    auto out = filter_active_users(CorpusStore(syn.conversations), 10);
    std::map<std::string, std::size_t> counts;
    for (const auto& c : out) ++counts[c.user];
    for (const auto& [u, n] : counts) EXPECT_GE(n, 10u) << u;
}

TEST(MinHash, IdenticalTextsIdenticalSignatures) {
    auto a = minhash_signature("the quick brown fox jumps over the lazy dog");
    auto b = minhash_signature("the quick brown fox jumps over the lazy dog");
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.values.size(), 21u);
    EXPECT_EQ(a.shingle_size, 4u);
}

TEST(MinHash, ShortTextSingleShingle) {
    EXPECT_EQ(shingle_set("only three words").size(), 1u);
    EXPECT_NO_THROW(minhash_signature("only three words"));
}

TEST(MinHash, EmptyTextThrows) {
    EXPECT_THROW(minhash_signature(""), InvalidArgument);
}

TEST(MinHash, AgreementTracksExactJaccard) {
    Rng rng(11);
    MinHashParams mh;
    mh.num_perm = 256;
    for (int i = 0; i < 200; ++i) {
        std::string base = random_words(rng, 60, 400);
        auto words = split_whitespace(base);
        double rate = rng.uniform();
        for (auto& w : words)
            if (rng.bernoulli(rate)) w = "z" + std::to_string(rng.below(1000));
        std::string other = join(words, " ");
        double exact = jaccard(shingle_set(base), shingle_set(other));
        double est = signature_agreement(minhash_signature(base, mh), minhash_signature(other, mh));
        EXPECT_NEAR(est, exact, 0.15);
    }
}

TEST(MinHash, UnbiasedOverManyPairs) {
    Rng rng(5);
    MinHashParams mh;
    mh.num_perm = 64;
    double sum_diff = 0;
    for (int i = 0; i < 500; ++i) {
        std::string a = random_words(rng, 40, 60);
        std::string b = random_words(rng, 40, 60);
        double exact = jaccard(shingle_set(a, 1), shingle_set(b, 1));
        mh.shingle_size = 1;
        sum_diff += signature_agreement(minhash_signature(a, mh), minhash_signature(b, mh)) - exact;
    }
    EXPECT_NEAR(sum_diff / 500, 0.0, 0.05);
}

TEST(Lsh, IdenticalDocsOneSurvivor) {
    CorpusStore store;
    auto a = test::make_conv("b-late", "u", "x", "y", "exactly the same long text about many things", "2023-06-01T00:00:00Z");
    auto b = test::make_conv("a-early", "u", "x", "y", "exactly the same long text about many things", "2023-05-01T00:00:00Z");
    store.add(a);
    store.add(b);
    DedupResult res;
    auto out = dedup_store(store, {}, {}, &res);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out.conversations()[0].id, "a-early");
    ASSERT_EQ(res.clusters.size(), 1u);
    EXPECT_EQ(res.clusters[0], (std::vector<std::string>{"a-early", "b-late"}));
}

TEST(Lsh, TimestampTieKeepsSmallestId) {
    CorpusStore store;
    store.add(test::make_conv("zz", "u", "x", "y", "one two three four five six seven"));
    store.add(test::make_conv("aa", "u", "x", "y", "one two three four five six seven"));
    auto out = dedup_store(store, {}, {});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out.conversations()[0].id, "aa");
}

TEST(Lsh, MixedSignatureLengthsThrow) {
    MinHashParams small;
    small.num_perm = 30;
    std::vector<DedupDocument> docs(2);
    docs[0].id = "a";
    docs[0].signature = minhash_signature("alpha beta gamma delta epsilon");
    docs[1].id = "b";
    docs[1].signature = minhash_signature("alpha beta gamma delta epsilon", small);
    EXPECT_THROW(lsh_dedup(docs), InvalidArgument);
}

TEST(Lsh, AnalyticSCurve) {
    // Planted shingle sets with exact Jaccard J; fresh permutations per trial.
    for (double J : {0.1, 0.9}) {
        const std::size_t inter = static_cast<std::size_t>(std::lround(200 * J));
        std::vector<std::uint64_t> a, b;
        for (std::uint64_t i = 0; i < 200; ++i) {
            if (i < inter) {
                a.push_back(i);
                b.push_back(i);
            } else {
                a.push_back(1000 + i);
                b.push_back(5000 + i);
            }
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        const double j = jaccard(a, b);
        int hits = 0;
        for (std::uint64_t t = 0; t < 1000; ++t) {
            MinHashParams mh;
            mh.seed = t + 1;
            hits += lsh_candidate(minhash_from_shingles(a, mh), minhash_from_shingles(b, mh), 7, 3);
        }
        const double expected = 1.0 - std::pow(1.0 - std::pow(j, 3), 7);
        EXPECT_NEAR(hits / 1000.0, expected, 0.05) << "J=" << j;
    }
}

TEST(Lsh, Idempotent) {
    SyntheticParams p;
    p.conversations = 300;
    p.active_users = 20;
    p.duplicate_rate = 0.1;
    auto syn = generate_synthetic(p);
    CorpusStore store(syn.conversations);
    auto once = dedup_store(store, {}, {});
    EXPECT_LT(once.size(), store.size());
    auto twice = dedup_store(once, {}, {});
    EXPECT_EQ(twice.size(), once.size());
}

TEST(Chunker, ShortTextOneChunk) {
    std::string text;
    for (int i = 0; i < 512; ++i) text += "w ";
    ASSERT_EQ(count_tokens(text), 512u);
    auto chunks = chunk_text("p", text);
    ASSERT_EQ(chunks.size(), 1u);
    EXPECT_EQ(chunks[0].token_span, (std::pair<std::size_t, std::size_t>{0, 512}));
}

TEST(Chunker, LongTextCoveredWithinLimits) {
    Rng rng(3);
    std::string text;
    while (count_tokens(text) < 1000) text += random_words(rng, 1 + rng.below(30), 100) + ". ";
    const auto total = count_tokens(text);
    auto chunks = chunk_text("p", text);
    ASSERT_GT(chunks.size(), 1u);
    EXPECT_EQ(chunks.front().token_span.first, 0u);
    EXPECT_EQ(chunks.back().token_span.second, total);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        const auto [b, e] = chunks[i].token_span;
        EXPECT_LE(e - b, 512u);
        EXPECT_EQ(count_tokens(chunks[i].text), e - b);
        EXPECT_EQ(chunks[i].index, i);
        if (i > 0) {
            const auto [pb, pe] = chunks[i - 1].token_span;
            EXPECT_GT(b, pb);
            EXPECT_GT(e, pe);
            EXPECT_LE(b, pe) << "gap between chunks";
            EXPECT_LE(pe - b, 128u) << "overlap too large";
        }
    }
}

TEST(Chunker, ShortSentencesNeverSplit) {
    Rng rng(9);
    for (int doc = 0; doc < 20; ++doc) {
        std::string text;
        while (count_tokens(text) < 1500) text += random_words(rng, 3 + rng.below(40), 200) + ". ";
        auto toks = tokenize(text);
        std::set<std::size_t> boundaries{0, toks.size()};
        for (std::size_t i = 0; i < toks.size(); ++i)
            if (ends_sentence(text, toks[i])) boundaries.insert(i + 1);
        for (const auto& c : chunk_text("p", text)) {
            EXPECT_TRUE(boundaries.contains(c.token_span.first)) << c.token_span.first;
            EXPECT_TRUE(boundaries.contains(c.token_span.second)) << c.token_span.second;
        }
    }
}

TEST(Chunker, OverlongSentenceIsCut) {
    std::string text;
    for (int i = 0; i < 1200; ++i) text += "word ";
    auto chunks = chunk_text("p", text);
    ASSERT_GE(chunks.size(), 3u);
    for (const auto& c : chunks) EXPECT_LE(c.token_span.second - c.token_span.first, 512u);
    EXPECT_EQ(chunks.back().token_span.second, 1200u);
}

TEST(Chunker, JsonRoundTrip) {
    auto chunks = chunk_text("conv-1", "Hello there. General Kenobi.");
    auto back = chunk_from_json(to_json(chunks[0]));
    EXPECT_EQ(back.id(), "conv-1#0");
    EXPECT_EQ(back.text, chunks[0].text);
    EXPECT_EQ(back.token_span, chunks[0].token_span);
}

TEST(Tokenizer, Rules) {
    EXPECT_EQ(count_tokens("Hello, world!"), 4u);
    EXPECT_EQ(count_tokens(""), 0u);
    EXPECT_EQ(word_tokens("C++ is Fun"), (std::vector<std::string>{"c", "is", "fun"}));
}

TEST(Synthetic, Deterministic) {
    SyntheticParams p;
    p.conversations = 120;
    p.active_users = 8;
    p.inactive_users = 2;
    std::ostringstream a, b;
    write_synthetic_jsonl(generate_synthetic(p), a);
    write_synthetic_jsonl(generate_synthetic(p), b);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Synthetic, BadTurnBoundsThrow) {
    SyntheticParams p;
    p.min_turns = 10;
    p.max_turns = 5;
    EXPECT_THROW(generate_synthetic(p), InvalidArgument);
}
