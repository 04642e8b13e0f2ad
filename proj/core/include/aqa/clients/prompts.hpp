#pragma once

#include <map>
#include <string>
#include <vector>

namespace aqa::clients {

using PromptVariables = std::map<std::string, std::string>;

/// Named prompt templates with {slot} placeholders. A slot is a brace pair
/// around a lowercase identifier; any other brace is literal text.
class PromptLibrary {
public:
    PromptLibrary() = default;

    /// Every "<id>.txt" file in dir becomes prompt <id>. Throws NotFound.
    static PromptLibrary load(const std::string& dir);

    void add(std::string id, std::string text);
    bool has(const std::string& id) const { return templates_.count(id) != 0; }
    const std::string& text(const std::string& id) const;
    std::vector<std::string> ids() const;
    /// Distinct slot names in order of first appearance.
    std::vector<std::string> slots(const std::string& id) const;

    /// Throws NotFound for an unknown prompt and InvalidArgument naming the
    /// first unfilled slot. Extra variables are ignored.
    std::string render(const std::string& id, const PromptVariables& vars) const;

private:
    std::map<std::string, std::string> templates_;
};

/// AQA_PROMPTS_DIR from the environment, else the directory shipped with the sources.
std::string default_prompts_dir();

}  // namespace aqa::clients
