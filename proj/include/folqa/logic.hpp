#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Restricted first-order-logic fragment: ground unary literals and
// universally quantified single-premise implications, plus the two
// deduction rules (Ax, Hop) and a brute-force forward-chaining oracle.

namespace folqa {

namespace detail {

inline std::string normalize_symbol(std::string_view raw, const char* what) {
    if (raw.empty()) throw std::invalid_argument(std::string(what) + " must be nonempty");
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c)))
            throw std::invalid_argument(std::string(what) + " contains whitespace: '" + std::string(raw) + "'");
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace detail

struct PredicateLiteral {
    std::string predicate;
    bool negated = false;

    PredicateLiteral() = default;
    PredicateLiteral(std::string_view pred, bool neg = false)
        : predicate(detail::normalize_symbol(pred, "predicate")), negated(neg) {}

    PredicateLiteral flipped() const { return PredicateLiteral(predicate, !negated); }

    auto operator<=>(const PredicateLiteral&) const = default;
};

struct GroundLiteral {
    PredicateLiteral literal;
    std::string subject;

    GroundLiteral() = default;
    GroundLiteral(PredicateLiteral lit, std::string_view subj)
        : literal(std::move(lit)), subject(detail::normalize_symbol(subj, "subject")) {}

    GroundLiteral negated() const { return GroundLiteral(literal.flipped(), subject); }

    auto operator<=>(const GroundLiteral&) const = default;
};

struct UniversalImplication {
    PredicateLiteral antecedent;
    PredicateLiteral consequent;

    UniversalImplication() = default;
    UniversalImplication(PredicateLiteral ant, PredicateLiteral cons)
        : antecedent(std::move(ant)), consequent(std::move(cons)) {
        if (antecedent.negated)
            throw std::invalid_argument("implication antecedent must be positive: ~" + antecedent.predicate);
    }

    auto operator<=>(const UniversalImplication&) const = default;
};

class LogicalForm {
public:
    LogicalForm() : node_(GroundLiteral(PredicateLiteral("true"), "it")) {}
    LogicalForm(GroundLiteral g) : node_(std::move(g)) {}
    LogicalForm(UniversalImplication u) : node_(std::move(u)) {}

    static LogicalForm ground(std::string_view predicate, std::string_view subject, bool negated = false) {
        return LogicalForm(GroundLiteral(PredicateLiteral(predicate, negated), subject));
    }
    static LogicalForm implies(std::string_view antecedent, std::string_view consequent, bool neg_consequent = false) {
        return LogicalForm(UniversalImplication(PredicateLiteral(antecedent), PredicateLiteral(consequent, neg_consequent)));
    }

    bool is_ground() const { return std::holds_alternative<GroundLiteral>(node_); }
    bool is_implication() const { return std::holds_alternative<UniversalImplication>(node_); }

    const GroundLiteral& as_ground() const { return std::get<GroundLiteral>(node_); }
    const UniversalImplication& as_implication() const { return std::get<UniversalImplication>(node_); }

    auto operator<=>(const LogicalForm&) const = default;

private:
    std::variant<GroundLiteral, UniversalImplication> node_;
};

// substitution: apply a predicate literal to a constant, preserving polarity.
inline GroundLiteral substitute(const PredicateLiteral& literal, std::string_view subject) {
    return GroundLiteral(literal, subject);
}

// Hop (modus ponens): from all x (f(x) -> g(x)) and f(a), conclude g(a).
inline GroundLiteral apply_hop(const UniversalImplication& rule, const GroundLiteral& fact) {
    if (fact.literal != rule.antecedent) {
        throw std::invalid_argument("inapplicable rule: antecedent " + rule.antecedent.predicate +
                                    " does not match fact " + (fact.literal.negated ? "~" : "") +
                                    fact.literal.predicate);
    }
    return substitute(rule.consequent, fact.subject);
}

enum class Rule { Ax, Hop };

struct ProofStep {
    Rule rule;
    std::vector<LogicalForm> premises;
    LogicalForm conclusion;

    static ProofStep ax(LogicalForm conclusion) { return {Rule::Ax, {}, std::move(conclusion)}; }
    static ProofStep hop(GroundLiteral fact, UniversalImplication rule) {
        GroundLiteral conclusion = apply_hop(rule, fact);
        return {Rule::Hop, {LogicalForm(std::move(fact)), LogicalForm(std::move(rule))}, LogicalForm(std::move(conclusion))};
    }

    bool operator==(const ProofStep&) const = default;
};

struct Proof {
    std::vector<ProofStep> steps;

    const LogicalForm& goal() const {
        if (steps.empty()) throw std::logic_error("empty proof has no goal");
        return steps.back().conclusion;
    }

    std::vector<LogicalForm> axioms() const {
        std::vector<LogicalForm> out;
        for (const auto& s : steps)
            if (s.rule == Rule::Ax) out.push_back(s.conclusion);
        return out;
    }

    std::vector<LogicalForm> conclusions() const {
        std::vector<LogicalForm> out;
        for (const auto& s : steps) out.push_back(s.conclusion);
        return out;
    }

    int hop_count() const {
        int n = 0;
        for (const auto& s : steps) n += s.rule == Rule::Hop ? 1 : 0;
        return n;
    }

    bool operator==(const Proof&) const = default;
};

// First violated structural invariant, or nullopt for a well-formed proof.
inline std::optional<std::string> proof_violation(const Proof& proof) {
    std::set<LogicalForm> seen;
    for (std::size_t i = 0; i < proof.steps.size(); ++i) {
        const ProofStep& s = proof.steps[i];
        if (s.rule == Rule::Ax) {
            if (!s.premises.empty()) return "Ax step " + std::to_string(i) + " has premises";
        } else {
            if (s.premises.size() != 2) return "Hop step " + std::to_string(i) + " needs exactly two premises";
            if (!s.premises[0].is_ground() || !s.premises[1].is_implication())
                return "Hop step " + std::to_string(i) + " premises must be (ground, implication)";
            const auto& fact = s.premises[0].as_ground();
            const auto& rule = s.premises[1].as_implication();
            if (fact.literal != rule.antecedent)
                return "Hop step " + std::to_string(i) + " antecedent mismatch";
            if (!s.conclusion.is_ground() || s.conclusion.as_ground() != apply_hop(rule, fact))
                return "Hop step " + std::to_string(i) + " conclusion does not follow";
            for (const auto& p : s.premises)
                if (!seen.count(p)) return "Hop step " + std::to_string(i) + " premise not previously concluded";
        }
        seen.insert(s.conclusion);
    }
    return std::nullopt;
}

// Least fixed point of Hop over the given axioms; terminates because the
// literal universe (predicates x polarity x subjects) is finite.
inline std::set<GroundLiteral> forward_closure(const std::vector<LogicalForm>& axioms) {
    std::set<GroundLiteral> facts;
    std::vector<UniversalImplication> rules;
    for (const auto& a : axioms) {
        if (a.is_ground())
            facts.insert(a.as_ground());
        else
            rules.push_back(a.as_implication());
    }
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& rule : rules) {
            for (const auto& fact : std::vector<GroundLiteral>(facts.begin(), facts.end())) {
                if (fact.literal == rule.antecedent && facts.insert(apply_hop(rule, fact)).second) grew = true;
            }
        }
    }
    return facts;
}

// Canonical text form, bit-exact round trip:
//   cat(fae)    ~herbivorous(fae)    all x (cat(x) -> carnivore(x))
inline std::string to_text(const PredicateLiteral& lit) {
    return (lit.negated ? "~" : "") + lit.predicate;
}

inline std::string to_text(const LogicalForm& form) {
    if (form.is_ground()) {
        const auto& g = form.as_ground();
        return to_text(g.literal) + "(" + g.subject + ")";
    }
    const auto& u = form.as_implication();
    return "all x (" + to_text(u.antecedent) + "(x) -> " + to_text(u.consequent) + "(x))";
}

namespace detail {

inline PredicateLiteral parse_applied(std::string_view text, std::string_view var) {
    bool neg = !text.empty() && text.front() == '~';
    if (neg) text.remove_prefix(1);
    std::string suffix = "(" + std::string(var) + ")";
    if (text.size() <= suffix.size() || text.substr(text.size() - suffix.size()) != suffix)
        throw std::invalid_argument("expected <predicate>" + suffix);
    return PredicateLiteral(text.substr(0, text.size() - suffix.size()), neg);
}

}  // namespace detail

inline LogicalForm parse_text(std::string_view text) {
    constexpr std::string_view kAll = "all x (";
    if (text.starts_with(kAll)) {
        if (!text.ends_with(")")) throw std::invalid_argument("unterminated implication: " + std::string(text));
        std::string_view body = text.substr(kAll.size(), text.size() - kAll.size() - 1);
        auto arrow = body.find(" -> ");
        if (arrow == std::string_view::npos) throw std::invalid_argument("missing '->' in: " + std::string(text));
        return LogicalForm(UniversalImplication(detail::parse_applied(body.substr(0, arrow), "x"),
                                                detail::parse_applied(body.substr(arrow + 4), "x")));
    }
    auto open = text.find('(');
    if (open == std::string_view::npos || !text.ends_with(")"))
        throw std::invalid_argument("malformed ground literal: " + std::string(text));
    std::string_view head = text.substr(0, open);
    std::string_view subject = text.substr(open + 1, text.size() - open - 2);
    bool neg = !head.empty() && head.front() == '~';
    if (neg) head.remove_prefix(1);
    return LogicalForm(GroundLiteral(PredicateLiteral(head, neg), subject));
}

}  // namespace folqa
