#pragma once

#include <deque>
#include <stdexcept>
#include <vector>

#include "folqa/example.hpp"
#include "folqa/grammar.hpp"
#include "folqa/logic.hpp"

namespace folqa::test {

// Scripted random source: every draw comes from a queue, so fixtures can
// force specific template/branch choices.
class ForcedRng {
public:
    ForcedRng& will_index(std::initializer_list<std::uint64_t> values) {
        indices_.insert(indices_.end(), values.begin(), values.end());
        return *this;
    }
    ForcedRng& will_chance(std::initializer_list<bool> values) {
        chances_.insert(chances_.end(), values.begin(), values.end());
        return *this;
    }

    std::uint64_t below(std::uint64_t n) {
        if (indices_.empty()) throw std::logic_error("ForcedRng: index queue exhausted");
        std::uint64_t v = indices_.front();
        indices_.pop_front();
        if (v >= n) throw std::logic_error("ForcedRng: scripted index out of range");
        return v;
    }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    bool chance(double) {
        if (chances_.empty()) throw std::logic_error("ForcedRng: chance queue exhausted");
        bool v = chances_.front();
        chances_.pop_front();
        return v;
    }
    double unit() { return chance(0.5) ? 0.0 : 1.0; }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[index(items.size())];
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[index(i)]);
    }

    bool exhausted() const { return indices_.empty() && chances_.empty(); }

private:
    std::deque<std::uint64_t> indices_;
    std::deque<bool> chances_;
};

// Lexicon for the worked animal-taxonomy example.
inline Lexicon figure_lexicon() {
    Lexicon lex;
    for (const char* noun : {"cat", "carnivore", "mammal", "vertebrate", "animal", "insect"})
        lex.add_noun(noun, noun_surface(noun), plural_noun_surface(noun));
    lex.add_adjective("multicellular", "multicellular");
    lex.add_adjective("warm_blooded", "warm-blooded");
    lex.add_adjective("herbivorous", "herbivorous");
    return lex;
}

// The worked two-hop question in full, distractor-free as in the figure.
inline Example figure_example() {
    Example ex;
    ex.context = {
        "Each cat is a carnivore.",      "Every carnivore is not herbivorous.",
        "Carnivores are mammals.",       "All mammals are warm-blooded.",
        "Mammals are vertebrates.",      "Every vertebrate is an animal.",
        "Animals are multicellular.",
    };
    ex.query = "Fae is a cat. True or false: Fae is not herbivorous.";
    ex.gold_cot = {
        "Fae is a cat.", "Cats are carnivores.", "Fae is a carnivore.",
        "Every carnivore is not herbivorous.", "Fae is not herbivorous.",
    };
    ex.label = "True";

    auto cat_fae = GroundLiteral(PredicateLiteral("cat"), "fae");
    auto cat_carn = UniversalImplication(PredicateLiteral("cat"), PredicateLiteral("carnivore"));
    auto carn_herb = UniversalImplication(PredicateLiteral("carnivore"), PredicateLiteral("herbivorous", true));
    ex.gold_proof.steps.push_back(ProofStep::ax(LogicalForm(cat_fae)));
    ex.gold_proof.steps.push_back(ProofStep::ax(LogicalForm(cat_carn)));
    ex.gold_proof.steps.push_back(ProofStep::hop(cat_fae, cat_carn));
    ex.gold_proof.steps.push_back(
        ProofStep::hop(GroundLiteral(PredicateLiteral("carnivore"), "fae"), carn_herb));
    ex.gold_proof.steps.insert(ex.gold_proof.steps.end() - 1, ProofStep::ax(LogicalForm(carn_herb)));

    ex.axioms = {
        LogicalForm::implies("cat", "carnivore"),
        LogicalForm::implies("carnivore", "herbivorous", true),
        LogicalForm::implies("carnivore", "mammal"),
        LogicalForm::implies("mammal", "warm_blooded"),
        LogicalForm::implies("mammal", "vertebrate"),
        LogicalForm::implies("vertebrate", "animal"),
        LogicalForm::implies("animal", "multicellular"),
        LogicalForm::ground("cat", "fae"),
    };
    ex.lexicon = figure_lexicon();
    ex.meta = {Flavor::True, 2, Ordering::BottomUp, 0};
    return ex;
}

}  // namespace folqa::test
