#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace aqa::corpus {

struct MinHashParams {
    std::size_t shingle_size = 4;
    std::size_t num_perm = 21;  ///< bands * rows of the default LSH layout
    std::uint64_t seed = 1;
};

struct MinHashSignature {
    std::vector<std::uint64_t> values;
    std::size_t shingle_size = 4;
    std::size_t num_perm = 0;
};

/// Sorted, deduplicated 64-bit hashes of the word-level k-gram shingles of a
/// text. Texts with fewer than k words yield a single shingle of the whole
/// text. Throws InvalidArgument on empty text.
std::vector<std::uint64_t> shingle_set(std::string_view text, std::size_t k = 4);

/// Exact Jaccard of two sorted sets. Two empty sets have similarity 1.
double jaccard(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

MinHashSignature minhash_signature(std::string_view text, const MinHashParams& params = {});

/// Signature of a precomputed shingle set (must be nonempty).
MinHashSignature minhash_from_shingles(std::span<const std::uint64_t> shingles, const MinHashParams& params = {});

/// Fraction of positions where the two signatures agree: the Jaccard estimate.
double signature_agreement(const MinHashSignature& a, const MinHashSignature& b);

}  // namespace aqa::corpus
