#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "aqa/index/dense.hpp"

namespace aqa::clients {

class Embedder {
public:
    virtual ~Embedder() = default;

    /// Unit vectors in input order. Throws InvalidArgument on an empty batch
    /// or an empty text.
    virtual std::vector<index::EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
    virtual std::size_t dim() const = 0;

    index::EmbeddingVector embed_one(const std::string& text) { return embed({text}).front(); }
};

/// Shared precondition check for implementations.
void check_embed_batch(const std::vector<std::string>& texts);

}  // namespace aqa::clients
