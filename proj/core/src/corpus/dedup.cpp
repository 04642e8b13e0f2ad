#include "aqa/corpus/dedup.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "aqa/error.hpp"
#include "aqa/hash.hpp"

namespace aqa::corpus {

namespace {

std::uint64_t band_key(const MinHashSignature& s, std::size_t band, std::size_t rows) {
    std::uint64_t h = mix64(band + 1);
    for (std::size_t r = 0; r < rows; ++r) h = mix64(h ^ s.values[band * rows + r]);
    return h;
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

DedupDocument make_dedup_document(const Conversation& c, const MinHashParams& params) {
    DedupDocument d;
    d.id = c.id;
    d.timestamp = c.timestamp;
    d.shingles = shingle_set(c.text, params.shingle_size);
    d.signature = minhash_from_shingles(d.shingles, params);
    return d;
}

bool lsh_candidate(const MinHashSignature& a, const MinHashSignature& b, std::size_t bands, std::size_t rows) {
    if (a.values.size() != b.values.size()) throw InvalidArgument("mixed signature lengths");
    if (a.values.size() < bands * rows) throw InvalidArgument("signature shorter than bands * rows");
    for (std::size_t band = 0; band < bands; ++band) {
        if (std::equal(a.values.begin() + band * rows, a.values.begin() + (band + 1) * rows,
                       b.values.begin() + band * rows)) {
            return true;
        }
    }
    return false;
}

DedupResult lsh_dedup(const std::vector<DedupDocument>& docs, const LshParams& params) {
    if (params.bands == 0 || params.rows == 0) throw InvalidArgument("bands and rows must be positive");
    DedupResult result;
    if (docs.empty()) return result;

    const std::size_t len = docs.front().signature.values.size();
    for (const auto& d : docs) {
        if (d.signature.values.size() != len) {
            throw InvalidArgument("mixed signature lengths (" + std::to_string(len) + " vs " +
                                  std::to_string(d.signature.values.size()) + " for '" + d.id + "')");
        }
    }
    if (len < params.bands * params.rows) {
        throw InvalidArgument("signature length " + std::to_string(len) + " < bands * rows = " +
                              std::to_string(params.bands * params.rows));
    }

    std::set<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t band = 0; band < params.bands; ++band) {
        // Ordered map: candidate discovery order must not depend on hashing.
        std::map<std::uint64_t, std::vector<std::size_t>> buckets;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            buckets[band_key(docs[i].signature, band, params.rows)].push_back(i);
        }
        for (const auto& [key, members] : buckets) {
            for (std::size_t x = 0; x < members.size(); ++x) {
                for (std::size_t y = x + 1; y < members.size(); ++y) candidates.emplace(members[x], members[y]);
            }
        }
    }
    result.candidate_pairs = candidates.size();

    DisjointSets sets(docs.size());
    for (const auto& [a, b] : candidates) {
        if (jaccard(docs[a].shingles, docs[b].shingles) >= params.threshold) {
            sets.unite(a, b);
            ++result.verified_pairs;
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < docs.size(); ++i) groups[sets.find(i)].push_back(i);

    auto earlier = [&](std::size_t a, std::size_t b) {
        if (docs[a].timestamp != docs[b].timestamp) return docs[a].timestamp < docs[b].timestamp;
        return docs[a].id < docs[b].id;
    };
    std::unordered_set<std::size_t> keep;
    for (auto& [root, members] : groups) {
        std::sort(members.begin(), members.end(), earlier);
        keep.insert(members.front());
        if (members.size() > 1) {
            std::vector<std::string> ids;
            for (auto m : members) ids.push_back(docs[m].id);
            result.clusters.push_back(std::move(ids));
        }
    }
    std::sort(result.clusters.begin(), result.clusters.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (keep.contains(i)) result.survivors.push_back(docs[i].id);
    }
    return result;
}

CorpusStore dedup_store(const CorpusStore& store, const MinHashParams& mh, const LshParams& lsh, DedupResult* result) {
    std::vector<DedupDocument> docs;
    docs.reserve(store.size());
    for (const auto& c : store) docs.push_back(make_dedup_document(c, mh));
    DedupResult r = lsh_dedup(docs, lsh);
    CorpusStore out;
    for (const auto& id : r.survivors) out.add(store.at(id));
    if (result) *result = std::move(r);
    return out;
}

}  // namespace aqa::corpus
