#include "aqa/proposer/keywords.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "aqa/error.hpp"
#include "aqa/text.hpp"

namespace aqa::proposer {

using nlohmann::json;

namespace {

// Two-byte UTF-8 Latin letters and their ASCII folding.
const std::unordered_map<std::string, std::string>& accent_folds() {
    static const std::unordered_map<std::string, std::string> m = {
        {"à", "a"}, {"á", "a"}, {"â", "a"}, {"ã", "a"}, {"ä", "a"}, {"å", "a"}, {"ā", "a"}, {"ą", "a"},
        {"À", "a"}, {"Á", "a"}, {"Â", "a"}, {"Ã", "a"}, {"Ä", "a"}, {"Å", "a"}, {"æ", "ae"}, {"Æ", "ae"},
        {"ç", "c"}, {"Ç", "c"}, {"ć", "c"}, {"č", "c"}, {"Č", "c"}, {"ď", "d"}, {"đ", "d"}, {"è", "e"},
        {"é", "e"}, {"ê", "e"}, {"ë", "e"}, {"ē", "e"}, {"ę", "e"}, {"ě", "e"}, {"È", "e"}, {"É", "e"},
        {"Ê", "e"}, {"Ë", "e"}, {"ğ", "g"}, {"ì", "i"}, {"í", "i"}, {"î", "i"}, {"ï", "i"}, {"ı", "i"},
        {"Ì", "i"}, {"Í", "i"}, {"Î", "i"}, {"Ï", "i"}, {"İ", "i"}, {"ł", "l"}, {"Ł", "l"}, {"ñ", "n"},
        {"Ñ", "n"}, {"ń", "n"}, {"ň", "n"}, {"ò", "o"}, {"ó", "o"}, {"ô", "o"}, {"õ", "o"}, {"ö", "o"},
        {"ø", "o"}, {"ő", "o"}, {"Ò", "o"}, {"Ó", "o"}, {"Ô", "o"}, {"Õ", "o"}, {"Ö", "o"}, {"Ø", "o"},
        {"œ", "oe"}, {"Œ", "oe"}, {"ř", "r"}, {"ś", "s"}, {"š", "s"}, {"ş", "s"}, {"Š", "s"}, {"Ş", "s"},
        {"ß", "ss"}, {"ť", "t"}, {"ù", "u"}, {"ú", "u"}, {"û", "u"}, {"ü", "u"}, {"ů", "u"}, {"ű", "u"},
        {"Ù", "u"}, {"Ú", "u"}, {"Û", "u"}, {"Ü", "u"}, {"ý", "y"}, {"ÿ", "y"}, {"Ý", "y"}, {"ź", "z"},
        {"ż", "z"}, {"ž", "z"}, {"Ž", "z"},
    };
    return m;
}

bool keeps_symbols(std::string_view word) {
    static constexpr std::string_view kept[] = {"c++", "c#", "f#", "j#", "g++", "notepad++"};
    return std::find(std::begin(kept), std::end(kept), word) != std::end(kept);
}

std::string_view trim_edges(std::string_view w) {
    constexpr std::string_view edge = ".,;:!?()[]{}\"'`";
    while (!w.empty() && edge.find(w.front()) != std::string_view::npos) w.remove_prefix(1);
    while (!w.empty() && edge.find(w.back()) != std::string_view::npos) w.remove_suffix(1);
    return w;
}

std::vector<std::string> words_of(std::string_view normalized) { return split_whitespace(normalized); }

std::vector<std::string> without_stopwords(const std::vector<std::string>& words) {
    std::vector<std::string> out;
    for (const auto& w : words) {
        if (!is_stopword(w)) out.push_back(w);
    }
    return out;
}

// Rules with a as the (not longer) first argument, both normalized.
bool directed_equivalent(const std::string& a, const std::string& b, bool all_rules) {
    if (a == b) return true;
    const auto wa = words_of(a);
    const auto wb = words_of(b);
    const auto sa = without_stopwords(wa);
    if (!sa.empty() && sa == without_stopwords(wb)) return true;
    if (!all_rules) return false;
    if (wa.size() >= 3 && wa.size() < wb.size()) {
        if (std::equal(wa.begin(), wa.end(), wb.begin())) return true;
        if (std::equal(wa.rbegin(), wa.rend(), wb.rbegin())) return true;
    }
    if (wa.size() == 1 && wb.size() >= 2 && a.size() == wb.size()) {
        std::string initials;
        for (const auto& w : wb) initials += w.front();
        if (initials == a) return true;
    }
    return false;
}

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

std::string normalize_keyword(std::string_view raw) {
    std::string folded;
    folded.reserve(raw.size());
    const auto& folds = accent_folds();
    for (std::size_t i = 0; i < raw.size();) {
        const unsigned char c = static_cast<unsigned char>(raw[i]);
        if (c >= 0xC0 && c < 0xE0 && i + 1 < raw.size()) {
            auto it = folds.find(std::string(raw.substr(i, 2)));
            if (it != folds.end()) {
                folded += it->second;
                i += 2;
                continue;
            }
        }
        folded += (c < 0x80) ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
        ++i;
    }
    std::string out;
    for (const auto& word : split_whitespace(folded)) {
        const auto core = trim_edges(word);
        std::string cleaned;
        if (keeps_symbols(core)) {
            cleaned = std::string(core);
        } else {
            for (unsigned char c : word) {
                if (c >= 0x80 || std::isalnum(c)) {
                    cleaned += static_cast<char>(c);
                } else if (c == '-' || c == '/' || c == '_') {
                    cleaned += ' ';
                }
            }
        }
        for (const auto& piece : split_whitespace(cleaned)) {
            if (!out.empty()) out += ' ';
            out += piece;
        }
    }
    return out;
}

bool keywords_equivalent(std::string_view wa, std::string_view wb, std::string_view kind) {
    std::string a = normalize_keyword(wa);
    std::string b = normalize_keyword(wb);
    if (a.empty() || b.empty()) return a == b && !a.empty();
    const bool all_rules = kind != kPublicFigure;
    if (a.size() > b.size()) std::swap(a, b);
    if (directed_equivalent(a, b, all_rules)) return true;
    return a.size() == b.size() && directed_equivalent(b, a, all_rules);
}

std::vector<KeywordGroup> merge_keywords(const std::vector<RawKeyword>& keywords) {
    // Aggregate duplicates first so input order cannot matter.
    std::map<std::pair<std::string, std::string>, std::size_t> counts;  // (kind, text) -> count
    for (const auto& k : keywords) {
        if (trim(k.text).empty()) continue;
        counts[{k.kind, k.text}] += k.count;
    }
    std::vector<KeywordGroup> groups;
    auto it = counts.begin();
    while (it != counts.end()) {
        const std::string kind = it->first.first;
        std::vector<std::pair<std::string, std::size_t>> items;
        for (; it != counts.end() && it->first.first == kind; ++it) items.emplace_back(it->first.second, it->second);
        DisjointSets sets(items.size());
        for (std::size_t i = 0; i < items.size(); ++i) {
            for (std::size_t j = i + 1; j < items.size(); ++j) {
                if (sets.find(i) != sets.find(j) && keywords_equivalent(items[i].first, items[j].first, kind)) {
                    sets.unite(i, j);
                }
            }
        }
        std::map<std::size_t, std::vector<std::size_t>> members;
        for (std::size_t i = 0; i < items.size(); ++i) members[sets.find(i)].push_back(i);
        for (const auto& [_, idx] : members) {
            KeywordGroup g;
            g.kind = kind;
            std::size_t best = idx.front();
            for (auto i : idx) {
                g.members.insert(items[i].first);
                const auto& [t, n] = items[i];
                const auto& [bt, bn] = items[best];
                if (n > bn || (n == bn && (t.size() < bt.size() || (t.size() == bt.size() && t < bt)))) best = i;
            }
            g.canonical = items[best].first;
            groups.push_back(std::move(g));
        }
    }
    std::sort(groups.begin(), groups.end(), [](const KeywordGroup& a, const KeywordGroup& b) {
        return std::tie(a.kind, a.canonical) < std::tie(b.kind, b.canonical);
    });
    return groups;
}

json to_json(const std::vector<KeywordGroup>& groups) {
    json arr = json::array();
    for (const auto& g : groups) arr.push_back({{"canonical", g.canonical}, {"kind", g.kind}, {"members", g.members}});
    return arr;
}

std::vector<KeywordGroup> keyword_groups_from_json(const json& j) {
    std::vector<KeywordGroup> out;
    try {
        for (const auto& g : j) {
            out.push_back({g.at("canonical").get<std::string>(), g.at("members").get<std::set<std::string>>(),
                           g.at("kind").get<std::string>()});
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad keyword groups: ") + e.what());
    }
    return out;
}

std::vector<RawKeyword> collect_keywords(const corpus::CorpusStore& store,
                                         const std::map<std::string, std::string>& kinds) {
    std::map<std::string, std::size_t> counts;
    for (const auto& c : store) {
        for (const auto& k : c.keywords) ++counts[k];
    }
    std::vector<RawKeyword> out;
    for (const auto& [k, n] : counts) {
        auto it = kinds.find(k);
        out.push_back({k, it == kinds.end() ? std::string(kUnspecifiedKind) : it->second, n});
    }
    return out;
}

corpus::CorpusStore canonicalize_keywords(const corpus::CorpusStore& store, const std::vector<KeywordGroup>& groups) {
    std::map<std::string, std::string> canon;
    for (const auto& g : groups) {
        // A spelling listed under two kinds keeps the first canonical form.
        for (const auto& m : g.members) canon.emplace(m, g.canonical);
    }
    std::vector<corpus::Conversation> out;
    out.reserve(store.size());
    for (auto c : store) {
        std::vector<std::string> kws;
        for (const auto& k : c.keywords) {
            auto it = canon.find(k);
            const std::string& v = it == canon.end() ? k : it->second;
            if (std::find(kws.begin(), kws.end(), v) == kws.end()) kws.push_back(v);
        }
        c.keywords = std::move(kws);
        out.push_back(std::move(c));
    }
    return corpus::CorpusStore(std::move(out));
}

std::map<std::string, std::string> load_keyword_kinds(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open keyword kinds '" + path + "'");
    std::map<std::string, std::string> out;
    std::size_t lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(path + ":" + std::to_string(lineno) + ": expected keyword<TAB>kind");
        out[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return out;
}

}  // namespace aqa::proposer
