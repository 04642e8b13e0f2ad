#include "aqa/corpus/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <nlohmann/json.hpp>

#include "aqa/corpus/tokenizer.hpp"
#include "aqa/corpus/user_id.hpp"
#include "aqa/error.hpp"
#include "aqa/random.hpp"
#include "aqa/text.hpp"

namespace aqa::corpus {

namespace {

struct KeywordSpec {
    const char* name;
    const char* kind;
    std::vector<const char*> variants;
};

struct SubtopicSpec {
    const char* name;
    std::vector<const char*> words;
};

struct TopicSpec {
    const char* name;
    double weight;
    std::vector<SubtopicSpec> subtopics;
    std::vector<KeywordSpec> keywords;
};

const std::vector<TopicSpec>& topic_specs() {
    static const std::vector<TopicSpec> specs = {
        {"Software Development", 3.0,
         {{"Web Development", {"frontend", "css", "html", "browser", "server"}},
          {"Mobile Development", {"android", "ios", "app", "emulator", "gradle"}},
          {"Debugging", {"error", "stacktrace", "segfault", "breakpoint", "exception"}},
          {"Databases", {"query", "schema", "index", "table", "transaction"}}},
         {{"Python", "Programming Language", {"python"}},
          {"JavaScript", "Programming Language", {"Javascript"}},
          {"C++", "Programming Language", {"c++"}},
          {"Java", "Programming Language", {}},
          {"Rust", "Programming Language", {}},
          {"SQL", "Programming Language", {"sql"}},
          {"TypeScript", "Programming Language", {}},
          {"Kotlin", "Programming Language", {}}}},
        {"Creative Writing", 2.5,
         {{"Fan Fiction", {"crossover", "canon", "chapter", "character", "plot"}},
          {"Poetry", {"poem", "rhyme", "stanza", "verse", "haiku"}},
          {"Screenwriting", {"screenplay", "scene", "dialogue", "script", "act"}},
          {"Worldbuilding", {"kingdom", "magic", "map", "lore", "empire"}}},
         {{"The Lord of the Rings", "Book", {"Lord of the Rings", "LOTR"}},
          {"Harry Potter", "Book", {"harry potter"}},
          {"Pokémon", "Manga/Anime", {"Pokemon", "pokemon"}},
          {"Naruto", "Manga/Anime", {}},
          {"Attack on Titan", "Manga/Anime", {"AOT"}},
          {"One Piece", "Manga/Anime", {}}}},
        {"Education", 2.0,
         {{"Math Homework", {"equation", "algebra", "fraction", "geometry", "integral"}},
          {"Language Learning", {"grammar", "vocabulary", "pronunciation", "tense", "idiom"}},
          {"Exam Preparation", {"exam", "revision", "flashcards", "syllabus", "quiz"}},
          {"History Essays", {"essay", "revolution", "treaty", "century", "empire"}}},
         {{"To Kill a Mockingbird", "Book", {"Kill a Mockingbird"}},
          {"Isaac Newton", "Public Figure", {}},
          {"Pride and Prejudice", "Book", {"pride and prejudice"}}}},
        {"Business and Finance", 1.8,
         {{"Marketing", {"campaign", "brand", "audience", "seo", "advertising"}},
          {"Investing", {"stocks", "portfolio", "dividend", "etf", "bonds"}},
          {"Startups", {"founder", "pitch", "funding", "investor", "mvp"}},
          {"Accounting", {"ledger", "invoice", "tax", "balance", "audit"}}},
         {{"Elon Musk", "Public Figure", {}}, {"Warren Buffett", "Public Figure", {}}}},
        {"Health and Wellness", 1.2,
         {{"Fitness", {"workout", "muscle", "cardio", "squat", "stretching"}},
          {"Nutrition", {"protein", "calories", "vitamin", "diet", "fiber"}},
          {"Mental Health", {"anxiety", "stress", "therapy", "mood", "mindfulness"}},
          {"Sleep", {"insomnia", "nap", "melatonin", "bedtime", "dream"}}},
         {}},
        {"Gaming", 2.0,
         {{"Game Strategy", {"build", "boss", "level", "loadout", "speedrun"}},
          {"Game Modding", {"mod", "texture", "shader", "plugin", "patch"}},
          {"Esports", {"tournament", "team", "ranked", "match", "league"}},
          {"Tabletop Roleplay", {"campaign", "dice", "dungeon", "quest", "paladin"}}},
         {{"Minecraft", "Video Games", {"minecraft"}},
          {"The Legend of Zelda", "Video Games", {"Legend of Zelda"}},
          {"Grand Theft Auto", "Video Games", {"GTA"}},
          {"Elden Ring", "Video Games", {}},
          {"Dungeons and Dragons", "Tabletop Games", {"Dungeons & Dragons"}},
          {"Warhammer", "Tabletop Games", {}}}},
        {"Science", 1.4,
         {{"Physics", {"quantum", "gravity", "energy", "particle", "relativity"}},
          {"Biology", {"cell", "dna", "evolution", "protein", "enzyme"}},
          {"Chemistry", {"molecule", "reaction", "acid", "bond", "element"}},
          {"Astronomy", {"planet", "galaxy", "telescope", "orbit", "nebula"}}},
         {{"Albert Einstein", "Public Figure", {}},
          {"Marie Curie", "Public Figure", {}},
          {"Stephen Hawking", "Public Figure", {}}}},
        {"Travel", 1.0,
         {{"Trip Planning", {"itinerary", "flight", "hotel", "booking", "route"}},
          {"Visa Questions", {"visa", "passport", "embassy", "application", "permit"}},
          {"Local Culture", {"festival", "customs", "etiquette", "tradition", "cuisine"}},
          {"Budget Travel", {"hostel", "backpacking", "cheap", "savings", "train"}}},
         {}},
        {"Cooking and Food", 1.0,
         {{"Recipes", {"ingredients", "sauce", "simmer", "spices", "dish"}},
          {"Baking", {"dough", "oven", "flour", "yeast", "pastry"}},
          {"Meal Planning", {"groceries", "prep", "weekly", "portions", "leftovers"}},
          {"Restaurant Reviews", {"menu", "waiter", "review", "tasting", "chef"}}},
         {}},
        {"Entertainment Media", 1.6,
         {{"Movie Recommendations", {"movie", "director", "sequel", "trailer", "genre"}},
          {"TV Series Discussion", {"episode", "season", "finale", "showrunner", "spoiler"}},
          {"Music", {"album", "song", "lyrics", "band", "concert"}},
          {"Celebrity News", {"celebrity", "interview", "rumor", "red", "carpet"}}},
         {{"Star Wars", "Film", {"star wars"}},
          {"The Godfather", "Film", {"Godfather"}},
          {"Game of Thrones", "TV Show", {"GOT"}},
          {"Breaking Bad", "TV Show", {}},
          {"Hamilton", "Musical", {}},
          {"Spider-Man", "Western Cartoon/Comic", {"spider-man"}},
          {"The Simpsons", "Western Cartoon/Comic", {"Simpsons"}},
          {"Taylor Swift", "Public Figure", {}}}},
        {"Legal Advice", 0.8,
         {{"Contracts", {"clause", "agreement", "signature", "breach", "termination"}},
          {"Tenant Rights", {"landlord", "lease", "deposit", "eviction", "rent"}},
          {"Immigration Law", {"residency", "citizenship", "asylum", "sponsor", "green"}},
          {"Intellectual Property", {"copyright", "trademark", "patent", "license", "infringement"}}},
         {}},
        {"Relationships", 1.0,
         {{"Dating Advice", {"date", "crush", "texting", "profile", "match"}},
          {"Family Issues", {"parents", "sibling", "argument", "holiday", "inheritance"}},
          {"Friendship", {"friend", "trust", "group", "loneliness", "support"}},
          {"Breakups", {"breakup", "ex", "closure", "heartbreak", "moving"}}},
         {}},
    };
    return specs;
}

struct LocationSpec {
    const char* name;
    const char* language;
    double weight;
};

const std::vector<LocationSpec>& location_specs() {
    static const std::vector<LocationSpec> specs = {
        {"United States", "English", 5.0}, {"China", "Chinese", 2.0},      {"Russia", "Russian", 2.5},
        {"United Kingdom", "English", 1.5}, {"Germany", "German", 1.2},   {"France", "French", 1.2},
        {"India", "Hindi", 1.2},          {"Brazil", "Portuguese", 1.0},  {"Canada", "English", 1.0},
        {"Japan", "Japanese", 0.8},       {"Spain", "Spanish", 0.8},      {"Italy", "Italian", 0.6},
        {"South Korea", "Korean", 0.6},   {"Turkey", "Turkish", 0.6},
    };
    return specs;
}

const std::vector<std::string>& other_languages() {
    static const std::vector<std::string> langs = {"English", "Spanish", "French", "German",  "Russian",
                                                   "Chinese", "Italian", "Korean", "Turkish", "Japanese"};
    return langs;
}

struct UserProfile {
    ConversationOrigin origin;
    std::string name;
    std::size_t location;
    std::string language;
    std::vector<double> topic_pref;
    std::size_t favorite_keyword;  // index into a topic's keyword list, mod size
};

std::string capitalized(std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

std::string lowered(const char* s) { return ascii_lower(s); }

class TextBuilder {
public:
    TextBuilder(Rng& rng, const TopicSpec& topic, const SubtopicSpec& sub, std::vector<std::string> keywords,
                bool name_topic)
        : rng_(rng), topic_(topic), sub_(sub), keywords_(std::move(keywords)), name_topic_(name_topic) {}

    std::string word() { return sub_.words[rng_.below(sub_.words.size())]; }

    std::string keyword_or_word() { return keywords_.empty() || rng_.bernoulli(0.5) ? word() : rng_.pick(keywords_); }

    std::string turn() {
        const std::string sub = lowered(sub_.name);
        const std::string topic = name_topic_ ? lowered(topic_.name) : sub;
        switch (rng_.below(10)) {
            case 0: return "User: I have a question about " + sub + " and " + word() + ".";
            case 1: return "Assistant: Sure, here is an overview of " + word() + " in " + topic + ".";
            case 2: return "User: How does " + word() + " relate to " + keyword_or_word() + "?";
            case 3:
                return "Assistant: " + capitalized(word()) + " is often discussed together with " + word() +
                       ", especially for " + sub + ".";
            case 4: return "User: Can you give me an example with " + keyword_or_word() + "?";
            case 5:
                return "Assistant: Here is an example that uses " + word() + " and " + word() + " step by step.";
            case 6: return "User: Thanks, that helps. What about " + word() + "?";
            case 7:
                return "Assistant: A common mistake with " + word() + " is forgetting the " + word() +
                       ". Check it first.";
            case 8: return "User: My friend said " + keyword_or_word() + " is better. Is that true?";
            default:
                return "Assistant: It depends on your goals, but " + word() + " usually matters more than " +
                       word() + ".";
        }
    }

private:
    Rng& rng_;
    const TopicSpec& topic_;
    const SubtopicSpec& sub_;
    std::vector<std::string> keywords_;
    bool name_topic_;
};

std::size_t weighted_pick(Rng& rng, const std::vector<double>& w) { return rng.weighted(w); }

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticParams& p) {
    if (p.active_users == 0) throw InvalidArgument("need at least one active user");
    if (p.months == 0) throw InvalidArgument("months must be positive");
    if (p.min_turns == 0 || p.max_turns < p.min_turns) throw InvalidArgument("need 0 < min_turns <= max_turns");
    const auto& topics = topic_specs();
    const auto& locations = location_specs();
    Rng rng(p.seed);

    SyntheticCorpus out;
    for (const auto& t : topics) {
        auto& subs = out.subtopics_of[t.name];
        for (const auto& s : t.subtopics) subs.emplace_back(s.name);
        auto& kws = out.keywords_of[t.name];
        for (const auto& k : t.keywords) {
            kws.emplace_back(k.name);
            out.keyword_kinds[k.name] = k.kind;
            for (const char* v : k.variants) out.keyword_kinds[v] = k.kind;
        }
    }

    // Users.
    std::vector<double> location_weights;
    for (const auto& l : locations) location_weights.push_back(l.weight);
    std::vector<double> topic_weights;
    for (const auto& t : topics) topic_weights.push_back(t.weight);

    const std::size_t total_users = p.active_users + p.inactive_users;
    std::vector<UserProfile> users;
    for (std::size_t u = 0; u < total_users; ++u) {
        UserProfile up;
        up.origin.ip = "10." + std::to_string(rng.below(256)) + "." + std::to_string(rng.below(256)) + "." +
                       std::to_string(rng.below(256));
        up.origin.headers = "Mozilla/5.0 (synthetic; client " + std::to_string(u) + ") Accept-Language: " +
                            std::to_string(rng.below(1000));
        up.name = derive_user_id(up.origin.ip, up.origin.headers);
        up.location = weighted_pick(rng, location_weights);
        const auto& loc = locations[up.location];
        up.language = rng.bernoulli(0.75) ? loc.language : rng.pick(other_languages());
        up.topic_pref.assign(topics.size(), 0.0);
        for (std::size_t t = 0; t < topics.size(); ++t) up.topic_pref[t] = 0.15 * topic_weights[t];
        const std::size_t fav1 = weighted_pick(rng, topic_weights);
        std::size_t fav2 = weighted_pick(rng, topic_weights);
        if (fav2 == fav1) fav2 = (fav1 + 1 + rng.below(topics.size() - 1)) % topics.size();
        up.topic_pref[fav1] += 6.0;
        up.topic_pref[fav2] += 2.5;
        up.favorite_keyword = rng.below(8);
        users.push_back(std::move(up));
    }

    // Session counts: active users share the budget with a skewed activity
    // profile, inactive ones get fewer than 10 sessions each.
    std::vector<std::size_t> sessions(total_users, 0);
    std::size_t inactive_total = 0;
    for (std::size_t u = p.active_users; u < total_users; ++u) {
        sessions[u] = 2 + rng.below(7);
        inactive_total += sessions[u];
    }
    const std::size_t active_budget = p.conversations > inactive_total ? p.conversations - inactive_total : 0;
    if (active_budget < 10 * p.active_users) {
        throw InvalidArgument("too few conversations for the requested number of active users");
    }
    std::vector<double> activity(p.active_users);
    for (std::size_t u = 0; u < p.active_users; ++u) activity[u] = 1.0 / std::pow(1.0 + u, 0.6);
    double activity_sum = 0.0;
    for (double a : activity) activity_sum += a;
    std::size_t assigned = 0;
    for (std::size_t u = 0; u < p.active_users; ++u) {
        sessions[u] = 10 + static_cast<std::size_t>(
                               std::floor((active_budget - 10 * p.active_users) * activity[u] / activity_sum));
        assigned += sessions[u];
    }
    for (std::size_t u = 0; assigned < active_budget; u = (u + 1) % p.active_users) {
        ++sessions[u];
        ++assigned;
    }

    const TimeRange period = parse_period(p.start_month);
    int start_year = 0;
    unsigned start_mon = 0;
    {
        std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(period.begin)};
        start_year = static_cast<int>(ymd.year());
        start_mon = static_cast<unsigned>(ymd.month());
    }

    struct Draft {
        Conversation conv;
        ConversationOrigin origin;
    };
    std::vector<Draft> drafts;
    drafts.reserve(p.conversations);

    for (std::size_t u = 0; u < total_users; ++u) {
        const auto& up = users[u];
        for (std::size_t s = 0; s < sessions[u]; ++s) {
            Draft d;
            d.origin = up.origin;
            Conversation& c = d.conv;
            c.user = up.name;
            c.location = locations[up.location].name;
            c.language = up.language;

            const unsigned month_offset = static_cast<unsigned>(rng.below(p.months));
            unsigned m0 = start_mon - 1 + month_offset;
            const TimeRange month = month_range(start_year + static_cast<int>(m0 / 12), m0 % 12 + 1);
            const auto span = (month.end - month.begin).count();
            c.timestamp = month.begin + std::chrono::seconds(static_cast<std::int64_t>(rng.below(span)));

            // Topic: user preference modulated by a per-topic seasonal cycle.
            std::vector<double> tw(topics.size());
            for (std::size_t t = 0; t < topics.size(); ++t) {
                const double phase = 2.0 * std::numbers::pi * (month_offset + 3.0 * t) / 12.0;
                tw[t] = up.topic_pref[t] * (1.0 + 0.6 * std::sin(phase));
            }
            std::vector<std::size_t> topic_ids = {weighted_pick(rng, tw)};
            if (rng.bernoulli(p.second_topic_rate)) {
                tw[topic_ids[0]] = 0.0;
                topic_ids.push_back(weighted_pick(rng, tw));
            }

            std::vector<std::string> raw_keywords;
            std::vector<std::size_t> sub_ids;
            for (std::size_t t : topic_ids) {
                const auto& topic = topics[t];
                // Location shifts which subtopic dominates.
                std::vector<double> sw = {0.45, 0.27, 0.18, 0.10};
                std::rotate(sw.begin(), sw.begin() + static_cast<long>((up.location + t) % sw.size()), sw.end());
                const std::size_t st = weighted_pick(rng, sw);
                sub_ids.push_back(st);
                c.topics.emplace_back(topic.name);
                c.subtopics.emplace_back(topic.subtopics[st].name);
                if (!topic.keywords.empty()) {
                    std::vector<double> kw(topic.keywords.size());
                    for (std::size_t k = 0; k < kw.size(); ++k) kw[k] = 1.0 / (1.0 + k);
                    kw[up.favorite_keyword % kw.size()] *= 4.0;
                    const std::size_t nk = 1 + rng.below(2);
                    for (std::size_t i = 0; i < nk; ++i) {
                        const std::size_t k = weighted_pick(rng, kw);
                        const auto& entry = topic.keywords[k];
                        std::string raw = entry.name;
                        if (!entry.variants.empty() && rng.bernoulli(p.keyword_variant_rate)) {
                            raw = entry.variants[rng.below(entry.variants.size())];
                        }
                        if (std::find(raw_keywords.begin(), raw_keywords.end(), raw) == raw_keywords.end()) {
                            raw_keywords.push_back(raw);
                        }
                    }
                }
            }
            c.keywords = raw_keywords;

            // Label names appear only in some conversations; the rest talk
            // about the subtopic without naming the topic.
            std::vector<bool> named;
            for (std::size_t t = 0; t < topic_ids.size(); ++t) named.push_back(rng.bernoulli(p.topic_mention_rate));
            auto opener = [&](std::size_t t) {
                return ascii_lower(named[t] ? c.topics[t] : c.subtopics[t]);
            };
            TextBuilder builder(rng, topics[topic_ids[0]], topics[topic_ids[0]].subtopics[sub_ids[0]],
                                raw_keywords, named[0]);
            std::string text = "User: I need help with " + opener(0) + ".";
            const std::size_t turns = p.min_turns + rng.below(p.max_turns - p.min_turns + 1);
            for (std::size_t i = 0; i < turns; ++i) text += "\n" + builder.turn();
            if (topic_ids.size() > 1) {
                TextBuilder second(rng, topics[topic_ids[1]], topics[topic_ids[1]].subtopics[sub_ids[1]],
                                   raw_keywords, named[1]);
                text += "\nUser: Also, a question about " + opener(1) + ".";
                for (std::size_t i = 0; i < std::max<std::size_t>(3, turns / 3); ++i) text += "\n" + second.turn();
            }
            if (rng.bernoulli(p.long_rate)) {
                while (count_tokens(text) <= 4200) text += "\n" + builder.turn();
            }
            c.text = std::move(text);
            c.token_count = count_tokens(c.text);

            auto described = [&](std::size_t t) {
                return named[t] ? c.subtopics[t] + " (" + c.topics[t] + ")" : c.subtopics[t];
            };
            std::string summary = "The user asks about " + described(0);
            if (c.topics.size() > 1) summary += " and " + described(1);
            if (!raw_keywords.empty()) summary += ", mentioning " + join(raw_keywords, " and ");
            summary += ".";
            c.summary = std::move(summary);
            drafts.push_back(std::move(d));
        }
    }

    // Near-duplicates: re-sent conversations a little later with a trailing turn.
    const std::size_t originals = drafts.size();
    const std::size_t dup_count = static_cast<std::size_t>(std::floor(p.duplicate_rate * originals));
    for (std::size_t i = 0; i < dup_count; ++i) {
        Draft d = drafts[rng.below(originals)];
        d.conv.text += "\nUser: Thanks again!";
        d.conv.token_count = count_tokens(d.conv.text);
        d.conv.timestamp += std::chrono::seconds(60 + static_cast<std::int64_t>(rng.below(3600)));
        drafts.push_back(std::move(d));
    }

    std::stable_sort(drafts.begin(), drafts.end(),
                     [](const Draft& a, const Draft& b) { return a.conv.timestamp < b.conv.timestamp; });
    for (std::size_t i = 0; i < drafts.size(); ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "conv-%06zu", i + 1);
        drafts[i].conv.id = id;
        out.conversations.push_back(std::move(drafts[i].conv));
        out.origins.push_back(std::move(drafts[i].origin));
    }
    return out;
}

void write_synthetic_jsonl(const SyntheticCorpus& corpus, std::ostream& out) {
    for (std::size_t i = 0; i < corpus.conversations.size(); ++i) {
        auto j = to_json(corpus.conversations[i]);
        j.erase("user");
        j.erase("token_count");
        j["ip"] = corpus.origins[i].ip;
        j["headers"] = corpus.origins[i].headers;
        out << j.dump() << '\n';
    }
}

void write_keyword_kinds(const SyntheticCorpus& corpus, std::ostream& out) {
    for (const auto& [kw, kind] : corpus.keyword_kinds) out << kw << '\t' << kind << '\n';
}

}  // namespace aqa::corpus
