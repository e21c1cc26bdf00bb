#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "folqa/logic.hpp"

// Name pools and the hand-coded real ontology chains. The repo ships them as
// plain-text data files (one symbol per line; chain files as `child -> parent`
// lines plus `node: property` lines); identical defaults are compiled in so
// the binaries run without a data directory.

namespace folqa {

struct TrueChain {
    struct Node {
        std::string concept_name;
        std::optional<PredicateLiteral> property;
        bool operator==(const Node&) const = default;
    };
    std::string name;
    std::vector<Node> chain;  // root first

    bool operator==(const TrueChain&) const = default;
};

struct NamePools {
    std::vector<std::string> entities;
    std::vector<std::string> false_concepts;
    std::vector<std::string> properties;
    std::vector<std::string> blocklist;
    std::vector<TrueChain> true_chains;

    bool operator==(const NamePools&) const = default;

    bool knows_word(const std::string& w) const {
        auto has = [&](const std::vector<std::string>& v) {
            return std::find(v.begin(), v.end(), w) != v.end();
        };
        if (has(entities) || has(false_concepts) || has(properties) || has(blocklist)) return true;
        for (const auto& t : true_chains)
            for (const auto& n : t.chain)
                if (n.concept_name == w || (n.property && n.property->predicate == w)) return true;
        return false;
    }
};

namespace detail {

inline std::string trimmed(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

// `child -> parent` edges plus `node: property` lines; rebuilds the chain
// root first and insists on linearity.
inline TrueChain parse_chain_file(std::string name, const std::string& text) {
    std::map<std::string, std::string> parent_of;
    std::map<std::string, PredicateLiteral> property_of;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = detail::trimmed(line);
        if (t.empty() || t[0] == '#') continue;
        if (auto arrow = t.find(" -> "); arrow != std::string::npos) {
            std::string child = detail::trimmed(t.substr(0, arrow));
            std::string parent = detail::trimmed(t.substr(arrow + 4));
            if (parent_of.count(child)) throw std::invalid_argument(name + ": node " + child + " has two parents");
            parent_of[child] = parent;
        } else if (auto colon = t.find(": "); colon != std::string::npos) {
            std::string node = detail::trimmed(t.substr(0, colon));
            std::string prop = detail::trimmed(t.substr(colon + 2));
            bool neg = !prop.empty() && prop[0] == '~';
            if (neg) prop = prop.substr(1);
            property_of.insert({node, PredicateLiteral(prop, neg)});
        } else {
            throw std::invalid_argument(name + ": unrecognized line '" + t + "'");
        }
    }
    if (parent_of.empty()) throw std::invalid_argument(name + ": no edges");

    std::map<std::string, std::string> child_of;
    for (const auto& [child, parent] : parent_of) {
        if (child_of.count(parent)) throw std::invalid_argument(name + ": node " + parent + " has two children");
        child_of[parent] = child;
    }
    std::string root;
    for (const auto& [parent, child] : child_of)
        if (!parent_of.count(parent)) root = parent;
    if (root.empty()) throw std::invalid_argument(name + ": chain has a cycle");

    TrueChain out{std::move(name), {}};
    for (std::string node = root;;) {
        TrueChain::Node n{node, std::nullopt};
        if (auto it = property_of.find(node); it != property_of.end()) n.property = it->second;
        out.chain.push_back(std::move(n));
        auto it = child_of.find(node);
        if (it == child_of.end()) break;
        node = it->second;
    }
    if (out.chain.size() != parent_of.size() + 1)
        throw std::invalid_argument(out.name + ": edges do not form a single path");
    return out;
}

inline std::vector<std::string> load_word_list(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = detail::trimmed(line);
        if (!t.empty() && t[0] != '#') out.push_back(t);
    }
    return out;
}

inline NamePools load_pools(const std::filesystem::path& dir) {
    NamePools pools;
    pools.entities = load_word_list(dir / "entities.txt");
    pools.false_concepts = load_word_list(dir / "false_concepts.txt");
    pools.properties = load_word_list(dir / "properties.txt");
    pools.blocklist = load_word_list(dir / "word_blocklist.txt");
    std::vector<std::filesystem::path> chain_files;
    for (const auto& entry : std::filesystem::directory_iterator(dir / "true_ontologies"))
        if (entry.path().extension() == ".txt") chain_files.push_back(entry.path());
    std::sort(chain_files.begin(), chain_files.end());
    for (const auto& file : chain_files) {
        std::ifstream in(file);
        std::ostringstream text;
        text << in.rdbuf();
        pools.true_chains.push_back(parse_chain_file(file.stem().string(), text.str()));
    }
    if (pools.true_chains.empty()) throw std::runtime_error("no true ontology chains in " + dir.string());
    return pools;
}

// Compiled-in copy of data/; pools_roundtrip test keeps the two in sync.
inline const NamePools& builtin_pools() {
    static const NamePools pools = [] {
        NamePools p;
        p.entities = {"fae", "sally", "max", "rex", "polly", "sam", "wren", "stella", "alex",
                      "fern", "milo", "nina", "otis", "ruby", "theo", "una", "vera", "zara"};
        p.false_concepts = {"animal", "vertebrate", "mammal",     "carnivore", "cat",     "dog",
                            "insect", "reptile",    "bird",       "snake",     "whale",   "spider",
                            "lion",   "tiger",      "shark",      "eagle",     "horse",   "rabbit",
                            "turtle", "frog",       "beetle",     "crow",      "lizard",  "salamander",
                            "dolphin", "plant",     "tree",       "conifer",   "pine",    "organism",
                            "number", "integer"};
        p.properties = {"feisty",  "opaque", "translucent", "nervous", "dull",   "bright", "sweet",
                        "bitter",  "spicy",  "gentle",      "fierce",  "luminous", "transparent",
                        "angry",   "happy",  "slow",        "fast",    "brown",  "blue",   "red",
                        "orange",  "small",  "large",       "hot",     "cold",   "loud",   "quiet",
                        "smooth",  "rough",  "shy",         "bold",    "earthy", "fruity", "melodic",
                        "windy"};
        p.blocklist = {"banana", "camera", "data",   "sofa",   "pasta",  "mama",   "papa",  "baby",
                       "lady",   "music",  "paper",  "water",  "fire",   "table",  "radio", "video",
                       "photo",  "piano",  "potato", "tomato", "solo",   "zero",   "hero",  "echo",
                       "auto",   "memo",   "demo",   "logo",   "yoga",   "cocoa",  "lava",  "saga",
                       "visa",   "diva",   "drama",  "salsa",  "pizza",  "koala",  "panda", "zebra",
                       "llama",  "puma",   "gorilla", "hyena", "iguana", "tuna",   "cobra", "gecko",
                       "dingo",  "bonobo", "dodo",   "kiwi",   "mango",  "papaya", "guava", "lemon",
                       "melon",  "cabana", "canoe",  "kayak",  "igloo",  "tipi",   "wigwam"};
        auto chain = [](std::string name, std::vector<TrueChain::Node> nodes) {
            return TrueChain{std::move(name), std::move(nodes)};
        };
        auto prop = [](std::string_view sym, bool neg = false) {
            return std::optional<PredicateLiteral>(PredicateLiteral(sym, neg));
        };
        p.true_chains = {
            chain("animals", {{"animal", prop("multicellular")},
                              {"vertebrate", std::nullopt},
                              {"mammal", prop("warm_blooded")},
                              {"carnivore", prop("herbivorous", true)},
                              {"cat", std::nullopt}}),
            chain("numbers", {{"number", prop("real")},
                              {"integer", prop("fractional", true)},
                              {"natural_number", prop("negative", true)},
                              {"prime_number", prop("composite", true)},
                              {"mersenne_prime", std::nullopt}}),
            chain("plants", {{"organism", prop("alive")},
                             {"plant", prop("multicellular")},
                             {"tree", prop("woody")},
                             {"conifer", prop("evergreen")},
                             {"pine", std::nullopt}}),
        };
        return p;
    }();
    return pools;
}

}  // namespace folqa
