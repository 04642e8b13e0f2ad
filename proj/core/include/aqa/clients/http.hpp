#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <cstddef>
#include <string>
#include <vector>

#include "aqa/clients/chat.hpp"
#include "aqa/clients/embedder.hpp"

namespace aqa::clients {

/// Where and how to reach an OpenAI-compatible endpoint.
struct HttpConfig {
    std::string endpoint;  ///< full URL, e.g. https://host/v1/chat/completions
    std::string model;
    std::string api_key;   ///< sent as a bearer token when nonempty
    std::size_t max_attempts = 3;
    std::chrono::milliseconds backoff{500};  ///< doubled after every failed attempt
    std::chrono::seconds timeout{120};
};

/// AQA_CHAT_ENDPOINT, AQA_CHAT_MODEL and AQA_API_KEY. Throws InvalidArgument
/// naming the first missing variable.
HttpConfig chat_config_from_env();
/// AQA_EMBED_ENDPOINT, AQA_EMBED_MODEL and AQA_API_KEY.
HttpConfig embed_config_from_env();

/// POSTs JSON with retries on connection errors, 429 and 5xx; other HTTP
/// errors fail at once. Throws TransportError carrying the attempt count.
std::string post_json(const HttpConfig& cfg, const std::string& body);

/// Chat-completions wire format: one user message, temperature 0; usage is
/// taken from the response when it reports one.
class HttpChatClient : public ChatClient {
public:
    HttpChatClient(PromptLibrary prompts, HttpConfig cfg);
    std::string complete(const std::string& prompt_id, const std::string& rendered,
                         const PromptVariables& vars) override;

protected:
    TokenUsage usage_of(const std::string& rendered, const std::string& response) const override;

private:
    HttpConfig cfg_;
    mutable std::mutex usage_mu_;
    mutable std::map<std::string, TokenUsage> reported_;  ///< response -> usage of the call that produced it
};

/// Embeddings wire format: {"model", "input": [...]} -> data[i].embedding.
class HttpEmbedder : public Embedder {
public:
    HttpEmbedder(HttpConfig cfg, std::size_t dim, std::size_t batch_size = 64);
    std::vector<index::EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::size_t dim() const override { return dim_; }

private:
    HttpConfig cfg_;
    std::size_t dim_;
    std::size_t batch_size_;
};

}  // namespace aqa::clients
