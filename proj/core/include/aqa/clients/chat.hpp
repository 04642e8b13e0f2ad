#pragma once

#include <cstddef>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "aqa/clients/prompts.hpp"

namespace aqa::clients {

struct TokenUsage {
    std::size_t input_tokens = 0;
    std::size_t output_tokens = 0;

    TokenUsage& operator+=(const TokenUsage& o) {
        input_tokens += o.input_tokens;
        output_tokens += o.output_tokens;
        return *this;
    }
    friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

struct ChatExchange {
    std::string prompt_id;
    std::string rendered_prompt;
    std::string response;
    TokenUsage usage;
};

nlohmann::json to_json(const ChatExchange& e);
ChatExchange exchange_from_json(const nlohmann::json& j);

/// Line-delimited ChatExchange records keyed by (prompt_id, sha256 of the
/// rendered prompt). Later records win on key collisions.
class ReplayLog {
public:
    ReplayLog() = default;
    /// Loads existing records (if the file exists) and appends new ones to it.
    explicit ReplayLog(const std::string& path);

    std::optional<ChatExchange> lookup(const std::string& prompt_id, const std::string& rendered) const;
    void record(const ChatExchange& e);
    std::size_t size() const;

    static std::string key(const std::string& prompt_id, const std::string& rendered);

private:
    mutable std::mutex mu_;
    std::map<std::string, ChatExchange> entries_;
    std::ofstream out_;
};

class ChatClient {
public:
    explicit ChatClient(PromptLibrary prompts) : prompts_(std::move(prompts)) {}
    virtual ~ChatClient() = default;
    ChatClient(const ChatClient&) = delete;
    ChatClient& operator=(const ChatClient&) = delete;

    /// Renders the prompt, obtains a completion and records the exchange in
    /// the attached log (if any).
    ChatExchange chat(const std::string& prompt_id, const PromptVariables& vars);

    /// Completion of an already rendered prompt. `vars` are the values the
    /// prompt was rendered from.
    virtual std::string complete(const std::string& prompt_id, const std::string& rendered,
                                 const PromptVariables& vars) = 0;

    const PromptLibrary& prompts() const noexcept { return prompts_; }
    void attach_log(std::shared_ptr<ReplayLog> log) { log_ = std::move(log); }

    TokenUsage total_usage() const;
    std::size_t calls() const;

protected:
    /// Usage of the last completion; defaults to tokenizer counts.
    virtual TokenUsage usage_of(const std::string& rendered, const std::string& response) const;

private:
    PromptLibrary prompts_;
    std::shared_ptr<ReplayLog> log_;
    mutable std::mutex mu_;
    TokenUsage total_;
    std::size_t calls_ = 0;
};

/// Serves completions from a replay log only; a prompt missing from the
/// log is a NotFound error.
class ReplayChatClient : public ChatClient {
public:
    ReplayChatClient(PromptLibrary prompts, std::shared_ptr<const ReplayLog> log);
    std::string complete(const std::string& prompt_id, const std::string& rendered,
                         const PromptVariables& vars) override;

private:
    std::shared_ptr<const ReplayLog> source_;
};

/// Parses a JSON object out of a model response, tolerating code fences and
/// prose around it. Throws ParseError.
nlohmann::json parse_json_response(const std::string& text);

}  // namespace aqa::clients
