#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "folqa/grammar.hpp"
#include "folqa/logic.hpp"
#include "folqa/pools.hpp"

// Sampling of ontologies, gold proofs, queries and distractors.

namespace folqa {

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Flavor { Fictional, True, False };
enum class Ordering { TopDown, BottomUp };

inline std::string to_string(Flavor f) {
    switch (f) {
        case Flavor::Fictional: return "fictional";
        case Flavor::True: return "true";
        case Flavor::False: return "false";
    }
    throw std::logic_error("bad flavor");
}

inline Flavor flavor_from(const std::string& s) {
    if (s == "fictional") return Flavor::Fictional;
    if (s == "true") return Flavor::True;
    if (s == "false") return Flavor::False;
    throw ConfigError("unknown flavor '" + s + "' (expected fictional|true|false)");
}

inline std::string to_string(Ordering o) {
    return o == Ordering::TopDown ? "top_down" : "bottom_up";
}

inline Ordering ordering_from(const std::string& s) {
    if (s == "top_down") return Ordering::TopDown;
    if (s == "bottom_up") return Ordering::BottomUp;
    throw ConfigError("unknown ordering '" + s + "' (expected top_down|bottom_up)");
}

struct ConceptNode {
    std::string name;
    std::optional<PredicateLiteral> property;
    bool operator==(const ConceptNode&) const = default;
};

// Linear concept chain, root first. Each consecutive pair yields one subtype
// axiom all x (child(x) -> parent(x)); nodes may carry one property axiom.
struct Ontology {
    std::vector<ConceptNode> chain;
    std::vector<UniversalImplication> distractors;
    Flavor flavor = Flavor::Fictional;

    bool operator==(const Ontology&) const = default;

    UniversalImplication subtype_rule(std::size_t child_index) const {
        return UniversalImplication(PredicateLiteral(chain[child_index].name),
                                    PredicateLiteral(chain[child_index - 1].name));
    }
    std::optional<UniversalImplication> property_rule(std::size_t index) const {
        if (!chain[index].property) return std::nullopt;
        return UniversalImplication(PredicateLiteral(chain[index].name), *chain[index].property);
    }

    // Preorder: each node's property sentence, then the edge into it from its
    // child. Postorder is the exact reverse, which matches gold-proof order.
    std::vector<LogicalForm> axioms_in_order(Ordering ordering) const {
        std::vector<LogicalForm> out;
        for (std::size_t i = 0; i < chain.size(); ++i) {
            if (auto prop = property_rule(i)) out.push_back(LogicalForm(*prop));
            if (i + 1 < chain.size()) out.push_back(LogicalForm(subtype_rule(i + 1)));
        }
        if (ordering == Ordering::BottomUp) std::reverse(out.begin(), out.end());
        return out;
    }

    std::vector<LogicalForm> all_axioms() const {
        auto out = axioms_in_order(Ordering::TopDown);
        for (const auto& d : distractors) out.push_back(LogicalForm(d));
        return out;
    }

    bool has_concept(const std::string& name) const {
        for (const auto& n : chain)
            if (n.name == name) return true;
        return false;
    }
    bool uses_symbol(const std::string& name) const {
        if (has_concept(name)) return true;
        for (const auto& n : chain)
            if (n.property && n.property->predicate == name) return true;
        for (const auto& d : distractors)
            if (d.antecedent.predicate == name || d.consequent.predicate == name) return true;
        return false;
    }
};

namespace detail {

inline const std::vector<std::string>& pseudo_onsets() {
    static const std::vector<std::string> v = {"b",  "d",  "f",  "g",  "h",  "j",  "k",  "l",  "m",
                                               "n",  "p",  "r",  "s",  "t",  "v",  "w",  "y",  "z",
                                               "bl", "br", "cl", "dr", "fl", "gr", "pl", "st", "tr"};
    return v;
}

inline const std::vector<std::string>& pseudo_codas() {
    static const std::vector<std::string> v = {"", "", "m", "n", "p", "s", "t", "x", "mp", "nt", "rp"};
    return v;
}

}  // namespace detail

// "wumpus"-style made-up word: 2-3 consonant+vowel syllables plus an optional
// final coda, rejected while it collides with real words or taken surfaces.
template <typename Rng, typename TakenFn>
std::string pseudoword(Rng& rng, const NamePools& pools, TakenFn&& taken) {
    static const std::vector<std::string> vowels = {"a", "e", "i", "o", "u"};
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::size_t syllables = 2 + rng.index(2);
        std::string word;
        for (std::size_t s = 0; s < syllables; ++s) {
            word += rng.pick(detail::pseudo_onsets());
            word += rng.pick(vowels);
        }
        word += rng.pick(detail::pseudo_codas());
        if (pools.knows_word(word) || taken(word)) continue;
        return word;
    }
    throw GenerationError("pseudoword pool exhausted");
}

// Step 1: sample the ontology.
//   fictional -> pseudoword concepts, real adjectives with random polarity
//   true      -> one of the hand-coded real chains, verbatim
//   false     -> real concept names in a random chain, rejecting chains that
//                reproduce a subtype edge of any bundled true ontology
template <typename Rng>
Ontology generate_ontology(Rng& rng, const NamePools& pools, Flavor flavor, int chain_length,
                           double property_rate) {
    if (flavor == Flavor::True) {
        const TrueChain& pick = pools.true_chains[rng.index(pools.true_chains.size())];
        Ontology out{{}, {}, flavor};
        for (const auto& node : pick.chain) out.chain.push_back({node.concept_name, node.property});
        return out;
    }

    if (chain_length < 2) throw ConfigError("chain_length must be at least 2");

    std::vector<std::string> names;
    if (flavor == Flavor::Fictional) {
        std::vector<std::string> surfaces;
        auto taken = [&](const std::string& w) {
            std::string plural = pluralize(w);
            for (const auto& used : surfaces)
                if (used == w || used == plural) return true;
            return false;
        };
        for (int i = 0; i < chain_length; ++i) {
            std::string w = pseudoword(rng, pools, taken);
            surfaces.push_back(w);
            surfaces.push_back(pluralize(w));
            names.push_back(std::move(w));
        }
    } else {
        if (static_cast<std::size_t>(chain_length) > pools.false_concepts.size())
            throw GenerationError("real-concept name pool exhausted");
        auto is_true_edge = [&](const std::string& child, const std::string& parent) {
            for (const auto& t : pools.true_chains)
                for (std::size_t i = 0; i + 1 < t.chain.size(); ++i)
                    if (t.chain[i + 1].concept_name == child && t.chain[i].concept_name == parent) return true;
            return false;
        };
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 64) throw GenerationError("could not sample a counterfactual chain");
            std::vector<std::string> pool = pools.false_concepts;
            rng.shuffle(pool);
            names.assign(pool.begin(), pool.begin() + chain_length);
            bool reproduces_truth = false;
            for (int i = 0; i + 1 < chain_length; ++i)
                reproduces_truth |= is_true_edge(names[i + 1], names[i]);
            if (!reproduces_truth) break;
        }
    }

    Ontology out{{}, {}, flavor};
    std::vector<std::string> adjectives = pools.properties;
    for (const auto& name : names) {
        ConceptNode node{name, std::nullopt};
        if (rng.chance(property_rate)) {
            if (adjectives.empty()) throw GenerationError("property pool exhausted");
            std::size_t at = rng.index(adjectives.size());
            std::string symbol = adjectives[at];
            adjectives.erase(adjectives.begin() + static_cast<std::ptrdiff_t>(at));
            node.property = PredicateLiteral(symbol, rng.chance(0.5));
        }
        out.chain.push_back(std::move(node));
    }
    return out;
}

// Start nodes from which exactly num_hops upward steps reach a node
// (property_goal=false) or a node property (property_goal=true, the final
// hop being the property edge).
inline std::vector<std::size_t> admissible_starts(const Ontology& ontology, int num_hops, bool property_goal) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ontology.chain.size(); ++i) {
        if (property_goal) {
            if (static_cast<int>(i) >= num_hops - 1 && ontology.chain[i - (num_hops - 1)].property)
                out.push_back(i);
        } else {
            if (static_cast<int>(i) >= num_hops) out.push_back(i);
        }
    }
    return out;
}

struct GoldStart {
    GroundLiteral start_axiom;
    Proof proof;
};

// Step 2: walk up the chain from a uniformly chosen admissible start node,
// emitting an Ax step for the start axiom and, per traversed edge, an Ax step
// for the rule followed by the Hop conclusion.
template <typename Rng>
GoldStart generate_proof(const Ontology& ontology, Rng& rng, int num_hops, const NamePools& pools,
                         double property_goal_rate = 0.5) {
    if (num_hops < 1) throw ConfigError("num_hops must be at least 1");

    bool want_property = rng.chance(property_goal_rate);
    auto starts = admissible_starts(ontology, num_hops, want_property);
    if (starts.empty()) {
        want_property = !want_property;
        starts = admissible_starts(ontology, num_hops, want_property);
    }
    if (starts.empty())
        throw GenerationError("no start node admits a " + std::to_string(num_hops) + "-hop walk");

    std::size_t start = starts[rng.index(starts.size())];
    const std::string& entity = pools.entities[rng.index(pools.entities.size())];

    GroundLiteral fact(PredicateLiteral(ontology.chain[start].name), entity);
    Proof proof;
    proof.steps.push_back(ProofStep::ax(LogicalForm(fact)));

    std::size_t node_hops = static_cast<std::size_t>(want_property ? num_hops - 1 : num_hops);
    for (std::size_t j = start; j > start - node_hops; --j) {
        UniversalImplication rule = ontology.subtype_rule(j);
        proof.steps.push_back(ProofStep::ax(LogicalForm(rule)));
        proof.steps.push_back(ProofStep::hop(fact, rule));
        fact = proof.steps.back().conclusion.as_ground();
    }
    if (want_property) {
        UniversalImplication rule = *ontology.property_rule(start - node_hops);
        proof.steps.push_back(ProofStep::ax(LogicalForm(rule)));
        proof.steps.push_back(ProofStep::hop(fact, rule));
    }
    return {GroundLiteral(PredicateLiteral(ontology.chain[start].name), entity), std::move(proof)};
}

struct QueryChoice {
    GroundLiteral query_form;
    bool label;
};

// Step 4a: with probability 0.5 ask about the conclusion itself (label True),
// otherwise about its negation (label False).
template <typename Rng>
QueryChoice make_query(const GroundLiteral& gold_conclusion, Rng& rng) {
    if (rng.chance(0.5)) return {gold_conclusion, true};
    return {gold_conclusion.negated(), false};
}

// Shortcut avoidance: a rule on a novel concept, disconnected from the chain,
// carrying the flipped polarity of the queried predicate. Appended to the
// ontology's distractors.
template <typename Rng>
UniversalImplication generate_distractor(Ontology& ontology, const PredicateLiteral& queried, Rng& rng,
                                         const NamePools& pools) {
    std::string novel;
    if (ontology.flavor == Flavor::Fictional) {
        auto taken = [&](const std::string& w) { return ontology.uses_symbol(w); };
        novel = pseudoword(rng, pools, taken);
    } else {
        std::vector<std::string> eligible;
        for (const auto& name : pools.false_concepts)
            if (!ontology.uses_symbol(name)) eligible.push_back(name);
        if (eligible.empty()) throw GenerationError("no novel concept available for the distractor");
        novel = eligible[rng.index(eligible.size())];
    }
    UniversalImplication distractor(PredicateLiteral(novel), queried.flipped());
    ontology.distractors.push_back(distractor);
    return distractor;
}

// Lexicon entries for every symbol the ontology can mention; pseudoword
// morphology is fixed here, at generation time.
inline Lexicon lexicon_for(const Ontology& ontology) {
    Lexicon lex;
    for (const auto& node : ontology.chain) {
        lex.add_noun(node.name, noun_surface(node.name), plural_noun_surface(node.name));
        if (node.property) lex.add_adjective(node.property->predicate, adjective_surface(node.property->predicate));
    }
    for (const auto& d : ontology.distractors) {
        lex.add_noun(d.antecedent.predicate, noun_surface(d.antecedent.predicate),
                     plural_noun_surface(d.antecedent.predicate));
        if (!lex.has(d.consequent.predicate))
            lex.add_adjective(d.consequent.predicate, adjective_surface(d.consequent.predicate));
    }
    return lex;
}

struct GeneratedQuestion {
    std::vector<LogicalForm> axioms;  // ontology axioms + distractor
    GroundLiteral start_axiom;
    Proof gold_proof;
    GroundLiteral query_form;
    bool label = false;
    int num_hops = 0;

    bool operator==(const GeneratedQuestion&) const = default;
};

// Full symbolic pipeline for one question; rendering happens downstream.
template <typename Rng>
GeneratedQuestion generate_question(Ontology& ontology, Rng& rng, int num_hops, const NamePools& pools,
                                    double property_goal_rate = 0.5) {
    GoldStart gold = generate_proof(ontology, rng, num_hops, pools, property_goal_rate);
    const GroundLiteral& conclusion = gold.proof.goal().as_ground();
    QueryChoice query = make_query(conclusion, rng);
    generate_distractor(ontology, conclusion.literal, rng, pools);

    GeneratedQuestion q;
    q.axioms = ontology.all_axioms();
    q.start_axiom = gold.start_axiom;
    q.gold_proof = std::move(gold.proof);
    q.query_form = query.query_form;
    q.label = query.label;
    q.num_hops = num_hops;
    return q;
}

}  // namespace folqa
