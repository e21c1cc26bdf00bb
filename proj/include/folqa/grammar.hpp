#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "folqa/logic.hpp"

// Bidirectional template grammar. Rendering picks one of a fixed template
// inventory per logical-form shape; parsing is exact template matching over
// the lexicon's known surface forms, so parse(render(form)) == form for
// every in-lexicon form and every template choice.

namespace folqa {

struct RenderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Lexicon {
public:
    enum class Kind { Noun, Adjective };

    struct Entry {
        Kind kind;
        std::string singular;  // nouns
        std::string plural;    // nouns
        std::string phrase;    // adjectives
        bool operator==(const Entry&) const = default;
    };

    void add_noun(const std::string& symbol, std::string singular, std::string plural) {
        insert(symbol, Entry{Kind::Noun, std::move(singular), std::move(plural), {}});
    }
    void add_adjective(const std::string& symbol, std::string phrase) {
        insert(symbol, Entry{Kind::Adjective, {}, {}, std::move(phrase)});
    }

    bool has(const std::string& symbol) const { return entries_.count(symbol) != 0; }
    const Entry* find(const std::string& symbol) const {
        auto it = entries_.find(symbol);
        return it == entries_.end() ? nullptr : &it->second;
    }
    const Entry& at(const std::string& symbol) const {
        auto it = entries_.find(symbol);
        if (it == entries_.end()) throw RenderError("no lexicon entry for symbol '" + symbol + "'");
        return it->second;
    }

    const std::string* symbol_for_singular(const std::string& surface) const { return lookup(by_singular_, surface); }
    const std::string* symbol_for_plural(const std::string& surface) const { return lookup(by_plural_, surface); }
    const std::string* symbol_for_adjective(const std::string& surface) const { return lookup(by_phrase_, surface); }

    const std::map<std::string, Entry>& entries() const { return entries_; }

    bool operator==(const Lexicon& other) const { return entries_ == other.entries_; }

private:
    static const std::string* lookup(const std::map<std::string, std::string>& m, const std::string& k) {
        auto it = m.find(k);
        return it == m.end() ? nullptr : &it->second;
    }

    void insert(const std::string& symbol, Entry entry) {
        if (auto it = entries_.find(symbol); it != entries_.end()) {
            if (it->second == entry) return;
            throw std::invalid_argument("conflicting lexicon entries for symbol '" + symbol + "'");
        }
        auto claim = [&](std::map<std::string, std::string>& m, const std::string& surface) {
            if (surface.empty()) return;
            if (by_singular_.count(surface) || by_plural_.count(surface) || by_phrase_.count(surface))
                throw std::invalid_argument("surface form '" + surface + "' already in use");
            m[surface] = symbol;
        };
        if (entry.kind == Kind::Noun) {
            claim(by_singular_, entry.singular);
            claim(by_plural_, entry.plural);
        } else {
            claim(by_phrase_, entry.phrase);
        }
        entries_.emplace(symbol, std::move(entry));
    }

    std::map<std::string, Entry> entries_;
    std::map<std::string, std::string> by_singular_;
    std::map<std::string, std::string> by_plural_;
    std::map<std::string, std::string> by_phrase_;
};

// Rule-based morphology, fixed at lexicon-build time so parsing never guesses.
inline std::string pluralize(std::string_view singular) {
    std::string s(singular);
    auto ends_with = [&](std::string_view suffix) {
        return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    auto is_vowel = [](char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; };
    if (s.size() >= 2 && s.back() == 'y' && !is_vowel(s[s.size() - 2])) return s.substr(0, s.size() - 1) + "ies";
    if (ends_with("s") || ends_with("x") || ends_with("z") || ends_with("ch") || ends_with("sh")) return s + "es";
    return s + "s";
}

inline std::string noun_surface(std::string_view symbol) {
    std::string s(symbol);
    for (char& c : s)
        if (c == '_') c = ' ';
    return s;
}

inline std::string adjective_surface(std::string_view symbol) {
    std::string s(symbol);
    for (char& c : s)
        if (c == '_') c = '-';
    return s;
}

inline std::string plural_noun_surface(std::string_view symbol) {
    std::string s = noun_surface(symbol);
    auto last_space = s.rfind(' ');
    if (last_space == std::string::npos) return pluralize(s);
    return s.substr(0, last_space + 1) + pluralize(s.substr(last_space + 1));
}

enum class TemplateId { Each, Every, All, Bare, Ground };

inline std::vector<TemplateId> applicable_templates(const LogicalForm& form) {
    if (form.is_ground()) return {TemplateId::Ground};
    return {TemplateId::Each, TemplateId::Every, TemplateId::All, TemplateId::Bare};
}

namespace detail {

inline std::string capitalized(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

inline const char* article_for(std::string_view noun) {
    if (noun.empty()) return "a";
    switch (noun.front()) {
        case 'a': case 'e': case 'i': case 'o': case 'u': return "an";
        default: return "a";
    }
}

// "is a cat" / "is not an animal" / "is warm-blooded" / "is not herbivorous"
inline std::string singular_complement(const PredicateLiteral& lit, const Lexicon& lexicon) {
    const auto& entry = lexicon.at(lit.predicate);
    std::string out = lit.negated ? "not " : "";
    if (entry.kind == Lexicon::Kind::Noun)
        out += std::string(article_for(entry.singular)) + " " + entry.singular;
    else
        out += entry.phrase;
    return out;
}

// "are carnivores" / "are not vertebrates" / "are multicellular"
inline std::string plural_complement(const PredicateLiteral& lit, const Lexicon& lexicon) {
    const auto& entry = lexicon.at(lit.predicate);
    std::string out = lit.negated ? "not " : "";
    out += entry.kind == Lexicon::Kind::Noun ? entry.plural : entry.phrase;
    return out;
}

inline const Lexicon::Entry& noun_entry(const PredicateLiteral& lit, const Lexicon& lexicon) {
    const auto& entry = lexicon.at(lit.predicate);
    if (entry.kind != Lexicon::Kind::Noun)
        throw RenderError("no noun form for symbol '" + lit.predicate + "'");
    return entry;
}

}  // namespace detail

inline std::string render_with(const LogicalForm& form, TemplateId id, const Lexicon& lexicon) {
    if (form.is_ground()) {
        if (id != TemplateId::Ground) throw RenderError("template not applicable to a ground literal");
        const auto& g = form.as_ground();
        return detail::capitalized(g.subject) + " is " + detail::singular_complement(g.literal, lexicon) + ".";
    }
    const auto& u = form.as_implication();
    const auto& ant = detail::noun_entry(u.antecedent, lexicon);
    switch (id) {
        case TemplateId::Each:
            return "Each " + ant.singular + " is " + detail::singular_complement(u.consequent, lexicon) + ".";
        case TemplateId::Every:
            return "Every " + ant.singular + " is " + detail::singular_complement(u.consequent, lexicon) + ".";
        case TemplateId::All:
            return "All " + ant.plural + " are " + detail::plural_complement(u.consequent, lexicon) + ".";
        case TemplateId::Bare:
            return detail::capitalized(ant.plural) + " are " + detail::plural_complement(u.consequent, lexicon) + ".";
        case TemplateId::Ground:
            throw RenderError("ground template not applicable to an implication");
    }
    throw RenderError("unknown template");
}

template <typename Rng>
std::string render_form(const LogicalForm& form, Rng& rng, const Lexicon& lexicon) {
    auto templates = applicable_templates(form);
    return render_with(form, templates[rng.index(templates.size())], lexicon);
}

namespace detail {

inline std::string normalized_sentence(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char raw : text) {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c);
    }
    while (!out.empty() && (out.back() == '.' || out.back() == '!')) out.pop_back();
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

// Complement of a singular frame: optional "not", optional article, then a
// singular noun or an adjective phrase from the lexicon.
inline std::optional<PredicateLiteral> parse_singular_complement(std::string_view phrase, const Lexicon& lexicon) {
    bool negated = false;
    if (phrase.starts_with("not ")) {
        negated = true;
        phrase.remove_prefix(4);
    }
    if (phrase.starts_with("a ")) {
        if (const auto* sym = lexicon.symbol_for_singular(std::string(phrase.substr(2))))
            return PredicateLiteral(*sym, negated);
        return std::nullopt;
    }
    if (phrase.starts_with("an ")) {
        if (const auto* sym = lexicon.symbol_for_singular(std::string(phrase.substr(3))))
            return PredicateLiteral(*sym, negated);
        return std::nullopt;
    }
    if (const auto* sym = lexicon.symbol_for_adjective(std::string(phrase)))
        return PredicateLiteral(*sym, negated);
    return std::nullopt;
}

inline std::optional<PredicateLiteral> parse_plural_complement(std::string_view phrase, const Lexicon& lexicon) {
    bool negated = false;
    if (phrase.starts_with("not ")) {
        negated = true;
        phrase.remove_prefix(4);
    }
    if (const auto* sym = lexicon.symbol_for_plural(std::string(phrase)))
        return PredicateLiteral(*sym, negated);
    if (const auto* sym = lexicon.symbol_for_adjective(std::string(phrase)))
        return PredicateLiteral(*sym, negated);
    return std::nullopt;
}

inline std::optional<LogicalForm> make_implication(const std::string* antecedent,
                                                   std::optional<PredicateLiteral> consequent) {
    if (!antecedent || !consequent) return std::nullopt;
    return LogicalForm(UniversalImplication(PredicateLiteral(*antecedent), std::move(*consequent)));
}

}  // namespace detail

// Total inverse of render_with over the lexicon; anything the grammar cannot
// have produced comes back as nullopt ("unparseable").
inline std::optional<LogicalForm> parse_sentence(std::string_view text, const Lexicon& lexicon) {
    std::string s = detail::normalized_sentence(text);
    if (s.empty()) return std::nullopt;

    auto split_on = [&](std::string_view verb) -> std::optional<std::pair<std::string, std::string>> {
        auto pos = s.find(verb);
        if (pos == std::string::npos || pos == 0) return std::nullopt;
        return std::make_pair(s.substr(0, pos), s.substr(pos + verb.size()));
    };

    if (s.starts_with("each ") || s.starts_with("every ")) {
        std::string rest = s.substr(s.find(' ') + 1);
        auto pos = rest.find(" is ");
        if (pos == std::string::npos || pos == 0) return std::nullopt;
        return detail::make_implication(
            lexicon.symbol_for_singular(rest.substr(0, pos)),
            detail::parse_singular_complement(std::string_view(rest).substr(pos + 4), lexicon));
    }
    if (s.starts_with("all ")) {
        std::string rest = s.substr(4);
        auto pos = rest.find(" are ");
        if (pos == std::string::npos || pos == 0) return std::nullopt;
        return detail::make_implication(
            lexicon.symbol_for_plural(rest.substr(0, pos)),
            detail::parse_plural_complement(std::string_view(rest).substr(pos + 5), lexicon));
    }
    if (auto parts = split_on(" are ")) {
        return detail::make_implication(lexicon.symbol_for_plural(parts->first),
                                        detail::parse_plural_complement(parts->second, lexicon));
    }
    if (auto parts = split_on(" is ")) {
        const std::string& subject = parts->first;
        if (subject.find(' ') != std::string::npos) return std::nullopt;
        for (char c : subject)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return std::nullopt;
        auto literal = detail::parse_singular_complement(parts->second, lexicon);
        if (!literal) return std::nullopt;
        return LogicalForm(GroundLiteral(std::move(*literal), subject));
    }
    return std::nullopt;
}

// One sentence per axiom in the given traversal order, with the distractor
// spliced in at a uniformly random position.
template <typename Rng>
std::vector<std::string> render_context(const std::vector<LogicalForm>& ordered_axioms,
                                        const std::optional<UniversalImplication>& distractor, Rng& rng,
                                        const Lexicon& lexicon) {
    std::vector<std::string> sentences;
    sentences.reserve(ordered_axioms.size() + 1);
    for (const auto& axiom : ordered_axioms) sentences.push_back(render_form(axiom, rng, lexicon));
    if (distractor) {
        std::string sentence = render_form(LogicalForm(*distractor), rng, lexicon);
        auto at = sentences.begin() + static_cast<std::ptrdiff_t>(rng.index(sentences.size() + 1));
        sentences.insert(at, std::move(sentence));
    }
    return sentences;
}

// One sentence per proof-step conclusion, in proof order.
template <typename Rng>
std::vector<std::string> render_cot(const Proof& proof, Rng& rng, const Lexicon& lexicon) {
    std::vector<std::string> sentences;
    sentences.reserve(proof.steps.size());
    for (const auto& step : proof.steps) sentences.push_back(render_form(step.conclusion, rng, lexicon));
    return sentences;
}

inline std::string render_true_or_false(const std::string& query_sentence) {
    return "True or false: " + query_sentence;
}

}  // namespace folqa
