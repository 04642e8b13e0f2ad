#include "aqa/clients/prompts.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aqa/error.hpp"

#ifndef AQA_PROMPTS_DIR
#define AQA_PROMPTS_DIR "prompts"
#endif

namespace aqa::clients {

namespace fs = std::filesystem;

namespace {

bool slot_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; }

// Calls fn(begin, end, name) for every {slot} occurrence.
template <typename Fn>
void scan_slots(const std::string& t, Fn&& fn) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] != '{') continue;
        std::size_t j = i + 1;
        while (j < t.size() && slot_char(t[j])) ++j;
        if (j < t.size() && t[j] == '}' && j > i + 1 && t[i + 1] >= 'a' && t[i + 1] <= 'z') {
            fn(i, j + 1, t.substr(i + 1, j - i - 1));
            i = j;
        }
    }
}

}  // namespace

PromptLibrary PromptLibrary::load(const std::string& dir) {
    if (!fs::is_directory(dir)) throw NotFound("prompts directory '" + dir + "' does not exist");
    PromptLibrary lib;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        std::ifstream in(p);
        std::ostringstream ss;
        ss << in.rdbuf();
        lib.add(p.stem().string(), ss.str());
    }
    return lib;
}

void PromptLibrary::add(std::string id, std::string text) { templates_[std::move(id)] = std::move(text); }

const std::string& PromptLibrary::text(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw NotFound("no prompt template '" + id + "'");
    return it->second;
}

std::vector<std::string> PromptLibrary::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : templates_) out.push_back(id);
    return out;
}

std::vector<std::string> PromptLibrary::slots(const std::string& id) const {
    std::vector<std::string> out;
    scan_slots(text(id), [&](std::size_t, std::size_t, const std::string& name) {
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    });
    return out;
}

std::string PromptLibrary::render(const std::string& id, const PromptVariables& vars) const {
    const std::string& t = text(id);
    std::string out;
    std::size_t last = 0;
    scan_slots(t, [&](std::size_t b, std::size_t e, const std::string& name) {
        auto it = vars.find(name);
        if (it == vars.end()) throw InvalidArgument("prompt '" + id + "': slot '" + name + "' is not filled");
        out.append(t, last, b - last);
        out += it->second;
        last = e;
    });
    out.append(t, last, std::string::npos);
    return out;
}

std::string default_prompts_dir() {
    if (const char* env = std::getenv("AQA_PROMPTS_DIR"); env && *env) return env;
    return AQA_PROMPTS_DIR;
}

}  // namespace aqa::clients
