#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "aqa/corpus/conversation.hpp"

namespace aqa::corpus {

struct Chunk {
    std::string parent_id;
    std::size_t index = 0;
    std::string text;
    /// Token span [first, second) in the parent's token sequence.
    std::pair<std::size_t, std::size_t> token_span{0, 0};

    /// "<parent>#<index>", the id chunks are indexed under.
    std::string id() const { return parent_id + "#" + std::to_string(index); }
};

struct ChunkParams {
    std::size_t max_tokens = 512;
    std::size_t overlap = 128;
};

/// Splits a conversation into chunks of at most max_tokens tokens. Chunks
/// are packed from whole sentences; a sentence is only cut when it alone
/// exceeds max_tokens. Consecutive chunks share at most `overlap` tokens,
/// always whole trailing sentences of the previous chunk.
std::vector<Chunk> chunk(const Conversation& conv, const ChunkParams& params = {});

/// Same, on raw text.
std::vector<Chunk> chunk_text(const std::string& parent_id, const std::string& text, const ChunkParams& params = {});

nlohmann::json to_json(const Chunk& c);
Chunk chunk_from_json(const nlohmann::json& j);

}  // namespace aqa::corpus
