#include "aqa/corpus/user_id.hpp"

#include <array>
#include <cstdint>

#include "aqa/hash.hpp"

namespace aqa::corpus {

namespace {

constexpr std::array<std::string_view, 256> kAdjectives = {
    "able", "acid", "aged", "airy", "alert", "alive", "amber", "ample", "apt", "arid", "ashen",
    "avid", "awake", "bald", "balmy", "bare", "basic", "beefy", "bent", "big", "bland", "bleak",
    "blind", "blond", "blue", "blunt", "bold", "bony", "bossy", "brave", "brief", "brisk", "broad",
    "brown", "bumpy", "busy", "calm", "candid", "chief", "chilly", "civic", "clean", "clear",
    "close", "cloudy", "coarse", "cold", "cool", "cosmic", "coy", "crafty", "crisp", "cross",
    "cubic", "curly", "cute", "daily", "damp", "dapper", "dark", "dear", "deep", "dense", "dim",
    "dire", "dizzy", "dry", "dual", "dull", "dusty", "eager", "early", "easy", "edgy", "elder",
    "empty", "epic", "equal", "even", "exact", "extra", "faint", "fair", "fancy", "far", "fast",
    "fiery", "fine", "firm", "first", "flat", "fluffy", "fond", "foxy", "frank", "free", "fresh",
    "frosty", "full", "funny", "fuzzy", "gentle", "giant", "giddy", "glad", "glossy", "golden",
    "good", "grand", "gray", "great", "green", "grim", "gusty", "hairy", "handy", "happy", "hardy",
    "hasty", "hazy", "hearty", "heavy", "hefty", "hidden", "high", "hollow", "honest", "hot",
    "huge", "humble", "icy", "idle", "inner", "iron", "ivory", "jade", "jolly", "jumpy", "just",
    "keen", "kind", "lanky", "large", "late", "lazy", "lean", "left", "light", "limp", "little",
    "live", "lively", "lofty", "lone", "long", "lost", "loud", "lucky", "lunar", "lush", "mad",
    "magic", "major", "mellow", "merry", "mighty", "mild", "minor", "misty", "modern", "moody",
    "mossy", "muddy", "murky", "mute", "narrow", "naval", "near", "neat", "new", "nimble", "noble",
    "noisy", "north", "odd", "oily", "old", "olive", "open", "oval", "pale", "petite", "plain",
    "plump", "polar", "polite", "posh", "prime", "proud", "pure", "quick", "quiet", "quirky",
    "rapid", "rare", "raw", "ready", "real", "red", "regal", "rich", "rigid", "ripe", "rosy",
    "rough", "round", "royal", "ruby", "rural", "rusty", "sad", "safe", "salty", "sandy", "scarce",
    "sharp", "shiny", "short", "shy", "silent", "silky", "silver", "simple", "sleek", "slim",
    "slow", "small", "smart", "smoky", "smooth", "snowy", "snug", "soft", "solar", "solid",
    "sonic", "sour", "spare", "spicy", "stark", "steady", "steep", "stiff", "still", "stout",
    "sunny",
};

constexpr std::array<std::string_view, 256> kNouns = {
    "acorn", "adder", "alder", "anchor", "ant", "apple", "arch", "arrow", "ash", "aspen", "atlas",
    "badge", "bagel", "bane", "bard", "barn", "basil", "bass", "bay", "beach", "beam", "bean",
    "bear", "bee", "bell", "berry", "birch", "bird", "bison", "blade", "bloom", "boat", "bolt",
    "bone", "book", "boot", "bough", "bow", "brick", "bridge", "brook", "broom", "bud", "bugle",
    "bull", "bunny", "cabin", "cactus", "cake", "camel", "canal", "candle", "canoe", "cape",
    "card", "carp", "cart", "castle", "cat", "cave", "cedar", "chalk", "charm", "cheek", "cherry",
    "chess", "chip", "cider", "clam", "clasp", "cliff", "cloud", "clove", "coal", "coast", "cobra",
    "comet", "coral", "cork", "crane", "crater", "creek", "crest", "crow", "crown", "cub", "cue",
    "cup", "dawn", "deer", "delta", "desk", "dew", "dingo", "dock", "dove", "dragon", "drum",
    "dune", "eagle", "echo", "eel", "elk", "elm", "ember", "fable", "falcon", "fern", "ferry",
    "fig", "finch", "fjord", "flame", "flask", "flint", "flute", "fog", "forest", "fossil", "fox",
    "frog", "frost", "garnet", "gate", "gecko", "gem", "ghost", "glade", "glen", "goat", "gong",
    "goose", "grape", "grove", "gull", "hare", "harp", "hawk", "hazel", "heron", "hill", "hive",
    "holly", "horn", "hound", "ibis", "igloo", "inlet", "iris", "islet", "ivy", "jackal", "jay",
    "jewel", "kayak", "kelp", "kettle", "kite", "koala", "lake", "lamb", "lamp", "lark", "lava",
    "leaf", "lemon", "lily", "lime", "linen", "lion", "llama", "lotus", "lynx", "maple", "marsh",
    "mesa", "mint", "mole", "moon", "moose", "moth", "mule", "newt", "nook", "oak", "oasis",
    "ocean", "olive", "onyx", "orca", "otter", "owl", "oyster", "palm", "panda", "pearl", "pebble",
    "pepper", "pier", "pike", "pine", "plum", "pond", "poppy", "quail", "quartz", "quill",
    "rabbit", "raven", "reed", "reef", "ridge", "river", "robin", "rock", "rose", "sage", "sail",
    "salmon", "seal", "shell", "shore", "shrew", "skunk", "slate", "sloth", "snail", "sparrow",
    "spruce", "squid", "star", "stork", "storm", "swan", "thorn", "tiger", "toad", "torch",
    "trout", "tulip", "tundra", "vale", "viper", "wasp", "whale", "willow", "wolf", "wren", "yak",
    "yew", "zebra", "acre", "aloe", "amigo", "axle", "dahlia",
};

constexpr std::uint64_t kNumberSpace = 10'000'000;

}  // namespace

std::string derive_user_id(std::string_view ip, std::string_view headers, std::string_view key) {
    std::string message;
    message.reserve(ip.size() + headers.size() + 1);
    message.append(ip);
    message.push_back('\0');
    message.append(headers);
    const Digest d = hmac_sha256(key, message);

    std::uint64_t number = 0;
    for (int i = 2; i < 10; ++i) number = (number << 8) | d[i];

    std::string name;
    name.append(kAdjectives[d[0]]);
    name.append(kNouns[d[1]]);
    name.append(std::to_string(number % kNumberSpace));
    return name;
}

}  // namespace aqa::corpus
