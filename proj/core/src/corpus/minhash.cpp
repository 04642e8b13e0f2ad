#include "aqa/corpus/minhash.hpp"

#include <algorithm>
#include <limits>

#include "aqa/corpus/tokenizer.hpp"
#include "aqa/error.hpp"
#include "aqa/hash.hpp"
#include "aqa/random.hpp"
#include "aqa/text.hpp"

namespace aqa::corpus {

namespace {

constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

std::uint64_t mod_mersenne61(unsigned __int128 x) {
    auto lo = static_cast<std::uint64_t>(x & kMersenne61);
    auto hi = static_cast<std::uint64_t>(x >> 61);
    std::uint64_t r = lo + hi;
    while (r >= kMersenne61) r -= kMersenne61;
    return r;
}

struct Permutation {
    std::uint64_t a;
    std::uint64_t b;
};

std::vector<Permutation> permutations(const MinHashParams& p) {
    Rng rng(mix64(p.seed ^ 0x6d696e68617368ULL));
    std::vector<Permutation> perms(p.num_perm);
    for (auto& perm : perms) {
        perm.a = 1 + rng.below(kMersenne61 - 1);
        perm.b = rng.below(kMersenne61);
    }
    return perms;
}

}  // namespace

std::vector<std::uint64_t> shingle_set(std::string_view text, std::size_t k) {
    if (trim(text).empty()) throw InvalidArgument("cannot shingle empty text");
    if (k == 0) throw InvalidArgument("shingle size must be positive");
    auto words = word_tokens(text);
    std::vector<std::uint64_t> out;
    if (words.size() < k) {
        out.push_back(fnv1a64(words.empty() ? std::string(trim(text)) : join(words, " ")));
        return out;
    }
    out.reserve(words.size() - k + 1);
    for (std::size_t i = 0; i + k <= words.size(); ++i) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::size_t j = 0; j < k; ++j) {
            if (j) h = fnv1a64(" ", h);
            h = fnv1a64(words[i + j], h);
        }
        out.push_back(h);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double jaccard(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t i = 0, j = 0, inter = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++inter, ++i, ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

MinHashSignature minhash_from_shingles(std::span<const std::uint64_t> shingles, const MinHashParams& params) {
    if (params.num_perm == 0) throw InvalidArgument("num_perm must be >= 1");
    if (shingles.empty()) throw InvalidArgument("cannot sign an empty shingle set");
    MinHashSignature sig;
    sig.shingle_size = params.shingle_size;
    sig.num_perm = params.num_perm;
    sig.values.assign(params.num_perm, std::numeric_limits<std::uint64_t>::max());
    const auto perms = permutations(params);
    for (std::uint64_t s : shingles) {
        const std::uint64_t x = mod_mersenne61(s);
        for (std::size_t i = 0; i < perms.size(); ++i) {
            const auto v = mod_mersenne61(static_cast<unsigned __int128>(perms[i].a) * x + perms[i].b);
            sig.values[i] = std::min(sig.values[i], v);
        }
    }
    return sig;
}

MinHashSignature minhash_signature(std::string_view text, const MinHashParams& params) {
    if (params.num_perm == 0) throw InvalidArgument("num_perm must be >= 1");
    auto shingles = shingle_set(text, params.shingle_size);
    return minhash_from_shingles(shingles, params);
}

double signature_agreement(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.values.size() != b.values.size() || a.values.empty()) {
        throw InvalidArgument("signatures must have the same nonzero length");
    }
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) same += a.values[i] == b.values[i];
    return static_cast<double>(same) / static_cast<double>(a.values.size());
}

}  // namespace aqa::corpus
