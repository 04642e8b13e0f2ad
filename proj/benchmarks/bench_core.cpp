#include <aqa/aggdb/aggdb.hpp>
#include <aqa/clients/mock.hpp>
#include <aqa/corpus/minhash.hpp>
#include <aqa/corpus/synthetic.hpp>
#include <aqa/eval/metrics.hpp>
#include <aqa/index/bm25.hpp>
#include <aqa/index/dense.hpp>
#include <aqa/index/documents.hpp>
#include <aqa/random.hpp>

#include <benchmark/benchmark.h>

using namespace aqa;

namespace {

const corpus::CorpusStore& store(std::size_t n) {
    static std::map<std::size_t, corpus::CorpusStore> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        corpus::SyntheticParams p;
        p.conversations = n;
        it = cache.emplace(n, corpus::CorpusStore(corpus::generate_synthetic(p).conversations)).first;
    }
    return it->second;
}

}  // namespace

static void BM_Bm25Search(benchmark::State& state) {
    const auto docs = index::make_documents(store(state.range(0)), index::TextGranularity::Summary);
    const index::Bm25Index idx(docs);
    for (auto _ : state) benchmark::DoNotOptimize(idx.search("travel hotel booking", {}, 100));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(docs.size()));
}
BENCHMARK(BM_Bm25Search)->Arg(1000)->Arg(5000);

static void BM_DenseSearch(benchmark::State& state) {
    const auto docs = index::make_documents(store(state.range(0)), index::TextGranularity::Summary);
    clients::MockEmbedder emb(static_cast<std::size_t>(state.range(1)));
    std::vector<std::string> texts;
    for (const auto& d : docs) texts.push_back(d.text);
    const index::DenseIndex idx(docs, emb.embed(texts));
    const auto q = emb.embed_one("travel hotel booking");
    for (auto _ : state) benchmark::DoNotOptimize(idx.search(q, {}, 100));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(docs.size()));
}
BENCHMARK(BM_DenseSearch)->Args({1000, 512})->Args({1000, 3072});

static void BM_MinHashSignature(benchmark::State& state) {
    const auto& text = store(1000).conversations().front().text;
    corpus::MinHashParams p;
    p.num_perm = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(corpus::minhash_signature(text, p));
}
BENCHMARK(BM_MinHashSignature)->Arg(21)->Arg(256);

static void BM_Ndcg(benchmark::State& state) {
    Rng rng(1);
    std::vector<std::uint64_t> grades(10);
    for (auto& g : grades) g = rng.below(50);
    for (auto _ : state) benchmark::DoNotOptimize(eval::ndcg_from_grades(grades, 5));
}
BENCHMARK(BM_Ndcg);

static void BM_RandomBaseline(benchmark::State& state) {
    std::vector<std::uint64_t> grades{9, 7, 5, 3, 2, 1, 1, 0, 0, 0};
    for (auto _ : state) benchmark::DoNotOptimize(eval::random_baseline(grades, 10, 10000, 3));
}
BENCHMARK(BM_RandomBaseline)->Unit(benchmark::kMillisecond);

static void BM_Aggregate(benchmark::State& state) {
    const auto& s = store(static_cast<std::size_t>(state.range(0)));
    const aggdb::AggDb db(s);
    const aggdb::ConditionSet cs{{{Attribute::Location, s.conversations().front().location}}};
    for (auto _ : state) benchmark::DoNotOptimize(db.aggregate(cs, Attribute::Topic));
}
BENCHMARK(BM_Aggregate)->Arg(1000)->Arg(5000);

BENCHMARK_MAIN();
