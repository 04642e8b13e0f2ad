#include "aqa/clients/chat.hpp"

#include <filesystem>

#include "aqa/corpus/tokenizer.hpp"
#include "aqa/error.hpp"
#include "aqa/hash.hpp"

namespace aqa::clients {

using nlohmann::json;

json to_json(const ChatExchange& e) {
    return {{"prompt_id", e.prompt_id},
            {"input_hash", sha256_hex(e.rendered_prompt)},
            {"rendered_prompt", e.rendered_prompt},
            {"response", e.response},
            {"usage", {{"input_tokens", e.usage.input_tokens}, {"output_tokens", e.usage.output_tokens}}}};
}

ChatExchange exchange_from_json(const json& j) {
    try {
        ChatExchange e;
        e.prompt_id = j.at("prompt_id").get<std::string>();
        e.rendered_prompt = j.at("rendered_prompt").get<std::string>();
        e.response = j.at("response").get<std::string>();
        if (j.contains("usage")) {
            e.usage.input_tokens = j["usage"].value("input_tokens", std::size_t{0});
            e.usage.output_tokens = j["usage"].value("output_tokens", std::size_t{0});
        }
        return e;
    } catch (const json::exception& ex) {
        throw ParseError(std::string("bad replay record: ") + ex.what());
    }
}

ReplayLog::ReplayLog(const std::string& path) {
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        std::size_t lineno = 0;
        for (std::string line; std::getline(in, line);) {
            ++lineno;
            if (line.empty()) continue;
            try {
                auto e = exchange_from_json(json::parse(line));
                entries_[key(e.prompt_id, e.rendered_prompt)] = std::move(e);
            } catch (const std::exception& ex) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": " + ex.what());
            }
        }
    }
    out_.open(path, std::ios::app);
    if (!out_) throw Error("cannot append to replay log '" + path + "'");
}

std::string ReplayLog::key(const std::string& prompt_id, const std::string& rendered) {
    return prompt_id + '\n' + sha256_hex(rendered);
}

std::optional<ChatExchange> ReplayLog::lookup(const std::string& prompt_id, const std::string& rendered) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key(prompt_id, rendered));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ReplayLog::record(const ChatExchange& e) {
    std::lock_guard lock(mu_);
    entries_[key(e.prompt_id, e.rendered_prompt)] = e;
    if (out_.is_open()) out_ << to_json(e).dump() << '\n' << std::flush;
}

std::size_t ReplayLog::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

ChatExchange ChatClient::chat(const std::string& prompt_id, const PromptVariables& vars) {
    ChatExchange e;
    e.prompt_id = prompt_id;
    e.rendered_prompt = prompts_.render(prompt_id, vars);
    e.response = complete(prompt_id, e.rendered_prompt, vars);
    e.usage = usage_of(e.rendered_prompt, e.response);
    {
        std::lock_guard lock(mu_);
        total_ += e.usage;
        ++calls_;
    }
    if (log_) log_->record(e);
    return e;
}

TokenUsage ChatClient::total_usage() const {
    std::lock_guard lock(mu_);
    return total_;
}

std::size_t ChatClient::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

TokenUsage ChatClient::usage_of(const std::string& rendered, const std::string& response) const {
    return {corpus::count_tokens(rendered), corpus::count_tokens(response)};
}

ReplayChatClient::ReplayChatClient(PromptLibrary prompts, std::shared_ptr<const ReplayLog> log)
    : ChatClient(std::move(prompts)), source_(std::move(log)) {
    if (!source_) throw InvalidArgument("replay client needs a log");
}

std::string ReplayChatClient::complete(const std::string& prompt_id, const std::string& rendered,
                                       const PromptVariables&) {
    auto e = source_->lookup(prompt_id, rendered);
    if (!e) throw NotFound("replay log has no response for prompt '" + prompt_id + "' (input " +
                           sha256_hex(rendered).substr(0, 12) + ")");
    return e->response;
}

json parse_json_response(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception&) {
    }
    const auto b = text.find('{');
    const auto e = text.rfind('}');
    if (b != std::string::npos && e != std::string::npos && e > b) {
        try {
            return json::parse(text.substr(b, e - b + 1));
        } catch (const json::exception&) {
        }
    }
    std::string head = text.substr(0, 80);
    throw ParseError("response is not JSON: '" + head + (text.size() > 80 ? "...'" : "'"));
}

}  // namespace aqa::clients
