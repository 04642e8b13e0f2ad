#include "aqa/clients/http.hpp"

#include <cstdlib>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "aqa/error.hpp"

namespace aqa::clients {

using nlohmann::json;

namespace {

std::string env(const char* name, bool required) {
    const char* v = std::getenv(name);
    if ((!v || !*v) && required) throw InvalidArgument(std::string("environment variable ") + name + " is not set");
    return v ? v : "";
}

// "https://host:port/path" -> ("https://host:port", "/path")
std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw InvalidArgument("endpoint '" + url + "' lacks a scheme");
    const auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

bool retriable(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpConfig chat_config_from_env() {
    HttpConfig c;
    c.endpoint = env("AQA_CHAT_ENDPOINT", true);
    c.model = env("AQA_CHAT_MODEL", true);
    c.api_key = env("AQA_API_KEY", false);
    return c;
}

HttpConfig embed_config_from_env() {
    HttpConfig c;
    c.endpoint = env("AQA_EMBED_ENDPOINT", true);
    c.model = env("AQA_EMBED_MODEL", true);
    c.api_key = env("AQA_API_KEY", false);
    return c;
}

std::string post_json(const HttpConfig& cfg, const std::string& body) {
    if (cfg.max_attempts == 0) throw InvalidArgument("max_attempts must be positive");
    const auto [base, path] = split_url(cfg.endpoint);
    httplib::Client cli(base);
    cli.set_connection_timeout(cfg.timeout);
    cli.set_read_timeout(cfg.timeout);
    cli.set_write_timeout(cfg.timeout);
    httplib::Headers headers;
    if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);

    std::string last_error;
    auto delay = cfg.backoff;
    for (std::size_t attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        auto res = cli.Post(path, headers, body, "application/json");
        if (res && res->status >= 200 && res->status < 300) return res->body;
        if (res && !retriable(res->status)) {
            throw Error("HTTP " + std::to_string(res->status) + " from " + cfg.endpoint + ": " + res->body.substr(0, 200));
        }
        last_error = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
        if (attempt < cfg.max_attempts) {
            std::this_thread::sleep_for(delay);
            delay *= 2;
        }
    }
    throw TransportError("request to " + cfg.endpoint + " failed: " + last_error, cfg.max_attempts);
}

HttpChatClient::HttpChatClient(PromptLibrary prompts, HttpConfig cfg)
    : ChatClient(std::move(prompts)), cfg_(std::move(cfg)) {}

std::string HttpChatClient::complete(const std::string&, const std::string& rendered, const PromptVariables&) {
    const json req = {{"model", cfg_.model},
                      {"temperature", 0},
                      {"messages", json::array({{{"role", "user"}, {"content", rendered}}})}};
    const std::string raw = post_json(cfg_, req.dump());
    try {
        const json res = json::parse(raw);
        std::string content = res.at("choices").at(0).at("message").at("content").get<std::string>();
        if (res.contains("usage")) {
            std::lock_guard lock(usage_mu_);
            reported_[content] = {res["usage"].value("prompt_tokens", std::size_t{0}),
                                  res["usage"].value("completion_tokens", std::size_t{0})};
        }
        return content;
    } catch (const json::exception& e) {
        throw ParseError(std::string("unexpected chat response: ") + e.what());
    }
}

TokenUsage HttpChatClient::usage_of(const std::string& rendered, const std::string& response) const {
    {
        std::lock_guard lock(usage_mu_);
        auto it = reported_.find(response);
        if (it != reported_.end()) {
            TokenUsage u = it->second;
            reported_.erase(it);
            return u;
        }
    }
    return ChatClient::usage_of(rendered, response);
}

HttpEmbedder::HttpEmbedder(HttpConfig cfg, std::size_t dim, std::size_t batch_size)
    : cfg_(std::move(cfg)), dim_(dim), batch_size_(batch_size) {
    if (dim == 0 || batch_size == 0) throw InvalidArgument("embedding dim and batch size must be positive");
}

std::vector<index::EmbeddingVector> HttpEmbedder::embed(const std::vector<std::string>& texts) {
    check_embed_batch(texts);
    std::vector<index::EmbeddingVector> out(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += batch_size_) {
        const std::size_t stop = std::min(texts.size(), start + batch_size_);
        const json req = {{"model", cfg_.model},
                          {"input", std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                                             texts.begin() + static_cast<std::ptrdiff_t>(stop))}};
        try {
            const json res = json::parse(post_json(cfg_, req.dump()));
            for (const auto& row : res.at("data")) {
                const std::size_t i = start + row.value("index", std::size_t{0});
                if (i >= stop) throw ParseError("embedding response index out of range");
                auto v = row.at("embedding").get<index::EmbeddingVector>();
                if (v.size() != dim_) {
                    throw ParseError("embedding has dimension " + std::to_string(v.size()) + ", expected " +
                                     std::to_string(dim_));
                }
                out[i] = index::normalized(std::move(v));
            }
        } catch (const json::exception& e) {
            throw ParseError(std::string("unexpected embedding response: ") + e.what());
        }
        for (std::size_t i = start; i < stop; ++i) {
            if (out[i].empty()) throw ParseError("embedding response lacks input " + std::to_string(i));
        }
    }
    return out;
}

}  // namespace aqa::clients
