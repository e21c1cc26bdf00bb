#pragma once

#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "folqa/example.hpp"
#include "folqa/grammar.hpp"
#include "folqa/logic.hpp"

// Reconstructs the predicted proof from a completion, prices every step in
// deduction-rule applications, classifies it against the gold proof, and
// scores the four proof-accuracy metrics plus label accuracy.

namespace folqa {

// k: -1 not provable; 0 already concluded earlier; >=1 minimal number of
// rule applications (Ax introductions + Hops) needed beyond what the chain
// of thought has already established.
struct ProvabilityResult {
    std::set<LogicalForm> premises;
    int k = -1;
    bool via_graph = false;

    bool ok() const { return k >= 0; }
};

// One vertex per predicate literal, one directed edge per quantified axiom.
class ImplicationGraph {
public:
    explicit ImplicationGraph(const std::vector<LogicalForm>& axioms) {
        for (const auto& a : axioms) {
            if (!a.is_implication()) continue;
            const auto& u = a.as_implication();
            edges_[u.antecedent].push_back(u);
        }
        for (auto& [from, outs] : edges_) std::sort(outs.begin(), outs.end());
    }

    // Shortest path by edge count (BFS, deterministic tie-break); the empty
    // path is a valid answer when from == to.
    std::optional<std::vector<UniversalImplication>> shortest_path(const PredicateLiteral& from,
                                                                   const PredicateLiteral& to) const {
        if (from == to) return std::vector<UniversalImplication>{};
        std::map<PredicateLiteral, UniversalImplication> reached_by;
        std::deque<PredicateLiteral> frontier{from};
        while (!frontier.empty()) {
            PredicateLiteral at = frontier.front();
            frontier.pop_front();
            auto it = edges_.find(at);
            if (it == edges_.end()) continue;
            for (const auto& edge : it->second) {
                if (edge.consequent == from || reached_by.count(edge.consequent)) continue;
                reached_by.emplace(edge.consequent, edge);
                if (edge.consequent == to) {
                    std::vector<UniversalImplication> path;
                    for (PredicateLiteral v = to; v != from;) {
                        const auto& e = reached_by.at(v);
                        path.push_back(e);
                        v = e.antecedent;
                    }
                    std::reverse(path.begin(), path.end());
                    return path;
                }
                frontier.push_back(edge.consequent);
            }
        }
        return std::nullopt;
    }

private:
    std::map<PredicateLiteral, std::vector<UniversalImplication>> edges_;
};

namespace detail {

struct GroundDerivation {
    int k = 0;
    std::set<LogicalForm> premises;
};

// Minimal-cost derivation of a ground literal. Premises already concluded
// cost nothing; an axiom not yet restated costs its implicit Ax step; every
// Hop costs one application.
inline std::optional<GroundDerivation> derive_ground(const GroundLiteral& goal,
                                                     const std::set<LogicalForm>& axioms,
                                                     const std::set<LogicalForm>& previous,
                                                     std::set<GroundLiteral>& on_path) {
    LogicalForm form{goal};
    if (previous.count(form)) return GroundDerivation{0, {form}};
    if (axioms.count(form)) return GroundDerivation{1, {form}};
    if (on_path.count(goal)) return std::nullopt;
    on_path.insert(goal);

    std::set<LogicalForm> candidates;
    for (const auto& pool : {&axioms, &previous})
        for (const auto& a : *pool)
            if (a.is_implication() && a.as_implication().consequent == goal.literal) candidates.insert(a);

    std::optional<GroundDerivation> best;
    for (const auto& rule_form : candidates) {
        const auto& rule = rule_form.as_implication();
        auto sub = derive_ground(substitute(rule.antecedent, goal.subject), axioms, previous, on_path);
        if (!sub) continue;
        int cost = sub->k + 1 + (previous.count(rule_form) ? 0 : 1);
        if (!best || cost < best->k) {
            best = GroundDerivation{cost, sub->premises};
            best->premises.insert(rule_form);
        }
    }
    on_path.erase(goal);
    return best;
}

}  // namespace detail

inline ProvabilityResult is_provable(const LogicalForm& form, const std::set<LogicalForm>& axioms,
                                     const std::set<LogicalForm>& previous, const ImplicationGraph& graph) {
    if (axioms.count(form)) return {{form}, 1, false};
    if (previous.count(form)) return {{form}, 0, false};
    if (form.is_ground()) {
        std::set<GroundLiteral> on_path;
        auto derivation = detail::derive_ground(form.as_ground(), axioms, previous, on_path);
        if (derivation) return {std::move(derivation->premises), derivation->k, false};
        return {};
    }
    const auto& u = form.as_implication();
    if (auto path = graph.shortest_path(u.antecedent, u.consequent)) {
        ProvabilityResult result;
        result.k = static_cast<int>(path->size());
        result.via_graph = true;
        for (const auto& edge : *path) result.premises.insert(LogicalForm(edge));
        return result;
    }
    return {};
}

inline ProvabilityResult is_provable(const LogicalForm& form, const std::vector<LogicalForm>& axioms,
                                     const std::set<LogicalForm>& previous) {
    return is_provable(form, std::set<LogicalForm>(axioms.begin(), axioms.end()), previous,
                       ImplicationGraph(axioms));
}

enum class StepType {
    Canonical,
    StrictAtomicMisleading,
    StrictNonatomicCorrect,
    StrictNonatomicMisleading,
    BroadCorrect,
    BroadMisleading,
    Invalid,
    Unparseable,
};

constexpr const char* to_string(StepType t) {
    switch (t) {
        case StepType::Canonical: return "canonical";
        case StepType::StrictAtomicMisleading: return "strict_atomic_misleading";
        case StepType::StrictNonatomicCorrect: return "strict_nonatomic_correct";
        case StepType::StrictNonatomicMisleading: return "strict_nonatomic_misleading";
        case StepType::BroadCorrect: return "broad_correct";
        case StepType::BroadMisleading: return "broad_misleading";
        case StepType::Invalid: return "invalid";
        case StepType::Unparseable: return "unparseable";
    }
    return "?";
}

inline StepType step_type_from(const std::string& s) {
    for (StepType t : {StepType::Canonical, StepType::StrictAtomicMisleading, StepType::StrictNonatomicCorrect,
                       StepType::StrictNonatomicMisleading, StepType::BroadCorrect, StepType::BroadMisleading,
                       StepType::Invalid, StepType::Unparseable})
        if (s == to_string(t)) return t;
    throw std::invalid_argument("unknown step type '" + s + "'");
}

// Gold-proof context an evaluation runs against.
struct GoldContext {
    std::set<LogicalForm> axioms;
    std::set<LogicalForm> gold_forms;  // every gold step conclusion
    std::set<LogicalForm> gold_plus;   // + implications composable from gold rule edges
    ImplicationGraph graph;
    Proof gold_proof;
    Lexicon lexicon;
    std::string label;

    const LogicalForm& goal() const { return gold_proof.goal(); }
};

inline GoldContext make_gold_context(const Example& example) {
    GoldContext ctx{{}, {}, {}, ImplicationGraph(example.axioms), example.gold_proof, example.lexicon,
                    example.label};
    ctx.axioms.insert(example.axioms.begin(), example.axioms.end());
    for (const auto& step : example.gold_proof.steps) ctx.gold_forms.insert(step.conclusion);
    ctx.gold_plus = ctx.gold_forms;

    // close the gold rule edges under composition (and identity) so that an
    // implication entailed along the gold path counts as on-path
    std::vector<LogicalForm> gold_rules;
    std::set<PredicateLiteral> vertices;
    for (const auto& f : ctx.gold_forms) {
        if (!f.is_implication()) continue;
        gold_rules.push_back(f);
        vertices.insert(f.as_implication().antecedent);
        vertices.insert(f.as_implication().consequent);
    }
    ImplicationGraph gold_graph(gold_rules);
    for (const auto& from : vertices) {
        if (from.negated) continue;
        for (const auto& to : vertices)
            if (gold_graph.shortest_path(from, to))
                ctx.gold_plus.insert(LogicalForm(UniversalImplication(from, to)));
    }
    return ctx;
}

// Premises drawn from the gold proof (or the context axioms) but a conclusion
// off the gold path.
inline bool is_misleading(const ProvabilityResult& result, const LogicalForm& conclusion, const GoldContext& ctx) {
    if (ctx.gold_plus.count(conclusion)) return false;
    for (const auto& p : result.premises)
        if (!ctx.axioms.count(p) && !ctx.gold_plus.count(p)) return false;
    return true;
}

inline StepType classify_step(const ProvabilityResult& result, const LogicalForm& conclusion,
                              const GoldContext& ctx) {
    if (!result.ok()) return StepType::Invalid;
    bool misleading = is_misleading(result, conclusion, ctx);
    if (result.via_graph) return misleading ? StepType::BroadMisleading : StepType::BroadCorrect;
    if (result.k == 1) return misleading ? StepType::StrictAtomicMisleading : StepType::Canonical;
    return misleading ? StepType::StrictNonatomicMisleading : StepType::StrictNonatomicCorrect;
}

struct StepRecord {
    std::string raw;
    std::optional<LogicalForm> form;
    ProvabilityResult provability;
    StepType type = StepType::Unparseable;
    bool misleading = false;
    bool in_gold = false;
};

struct Verdicts {
    bool strict = false;
    bool skip = false;
    bool broad = false;
    bool valid = false;

    bool operator==(const Verdicts&) const = default;
};

struct EvaluationResult {
    std::vector<StepRecord> steps;
    std::string predicted_label;
    bool label_present = false;
    bool label_correct = false;
    Verdicts verdicts;
    bool ordering_ok = true;
    bool gold_subset = false;  // every gold conclusion literally appears in the prediction
};

struct SplitCompletion {
    std::vector<std::string> sentences;
    std::string label_token;
    bool label_present = false;
};

// Peel the trailing True/False token, then split on periods.
inline SplitCompletion split_completion(std::string_view completion) {
    SplitCompletion out;
    std::string text(completion);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
    std::size_t start = 0;
    while (start < text.size() && std::isspace(static_cast<unsigned char>(text[start]))) ++start;
    text = text.substr(start);

    auto last_break = text.find_last_of(" \t\n");
    std::string tail = last_break == std::string::npos ? text : text.substr(last_break + 1);
    while (!tail.empty() && (tail.back() == '.' || tail.back() == '!' || tail.back() == ',')) tail.pop_back();
    std::string lowered;
    for (char c : tail) lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lowered == "true" || lowered == "false") {
        out.label_present = true;
        out.label_token = lowered == "true" ? "True" : "False";
        text = last_break == std::string::npos ? std::string() : text.substr(0, last_break);
    }

    std::string piece;
    for (char c : text) {
        piece.push_back(c);
        if (c == '.') {
            std::string sentence = detail::trimmed(piece);
            if (sentence != ".") out.sentences.push_back(std::move(sentence));
            piece.clear();
        }
    }
    if (!detail::trimmed(piece).empty()) out.sentences.push_back(detail::trimmed(piece));
    return out;
}

namespace detail {

enum class Admission { Strict, Skip, Broad, Valid };

inline bool admits(Admission a, const ProvabilityResult& r) {
    if (!r.ok()) return false;
    switch (a) {
        case Admission::Strict: return !r.via_graph && r.k <= 1;
        case Admission::Skip: return !r.via_graph;
        case Admission::Broad: return r.via_graph || r.k <= 1;
        case Admission::Valid: return true;
    }
    return false;
}

}  // namespace detail

// evaluate_cot: parse each predicted sentence, price it against the growing
// set of previous conclusions, classify it, and score the four metrics. A
// metric's verdict is true iff the gold conclusion enters its admitted set
// and no gold conclusion was stated before one of its stated premises.
inline EvaluationResult evaluate_cot(const GoldContext& ctx, std::string_view completion) {
    EvaluationResult result;
    SplitCompletion split = split_completion(completion);
    result.predicted_label = split.label_token;
    result.label_present = split.label_present;
    result.label_correct = split.label_present && split.label_token == ctx.label;

    std::vector<std::optional<LogicalForm>> forms;
    for (const auto& sentence : split.sentences) forms.push_back(parse_sentence(sentence, ctx.lexicon));

    // gold-structure ordering check over first statement positions
    std::map<LogicalForm, std::size_t> first_pos;
    for (std::size_t i = 0; i < forms.size(); ++i)
        if (forms[i] && !first_pos.count(*forms[i])) first_pos[*forms[i]] = i;
    for (const auto& step : ctx.gold_proof.steps) {
        auto concl = first_pos.find(step.conclusion);
        if (concl == first_pos.end()) continue;
        for (const auto& premise : step.premises) {
            auto prem = first_pos.find(premise);
            if (prem != first_pos.end() && prem->second >= concl->second) result.ordering_ok = false;
        }
    }

    result.gold_subset = true;
    for (const auto& step : ctx.gold_proof.steps) result.gold_subset &= first_pos.count(step.conclusion) != 0;

    using detail::Admission;
    for (Admission admission : {Admission::Strict, Admission::Skip, Admission::Broad, Admission::Valid}) {
        std::set<LogicalForm> previous;
        for (std::size_t i = 0; i < forms.size(); ++i) {
            ProvabilityResult prov;
            if (forms[i]) {
                prov = is_provable(*forms[i], ctx.axioms, previous, ctx.graph);
                if (detail::admits(admission, prov)) previous.insert(*forms[i]);
            }
            if (admission == Admission::Valid) {
                StepRecord record;
                record.raw = split.sentences[i];
                record.form = forms[i];
                record.provability = prov;
                if (forms[i]) {
                    record.type = classify_step(prov, *forms[i], ctx);
                    record.misleading = prov.ok() ? is_misleading(prov, *forms[i], ctx) : false;
                    record.in_gold = ctx.gold_forms.count(*forms[i]) != 0;
                }
                result.steps.push_back(std::move(record));
            }
        }
        bool verdict = previous.count(ctx.goal()) != 0 && result.ordering_ok;
        switch (admission) {
            case Admission::Strict: result.verdicts.strict = verdict; break;
            case Admission::Skip: result.verdicts.skip = verdict; break;
            case Admission::Broad: result.verdicts.broad = verdict; break;
            case Admission::Valid: result.verdicts.valid = verdict; break;
        }
    }
    return result;
}

inline EvaluationResult evaluate_cot(const Example& example, std::string_view completion) {
    return evaluate_cot(make_gold_context(example), completion);
}

// --- Wilson score interval ---------------------------------------------------

namespace detail {

// Acklam's rational approximation with one Halley refinement.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile requires 0 < p < 1");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,  -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01, -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        double q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p <= 1 - p_low) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        double q = std::sqrt(-2 * std::log(1 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
    return x - u / (1 + x * u / 2);
}

}  // namespace detail

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95) {
    if (trials == 0) throw std::invalid_argument("wilson_interval requires at least one trial");
    if (successes > trials) throw std::invalid_argument("successes exceed trials");
    double z = detail::normal_quantile(0.5 + confidence / 2);
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = (z / denom) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace folqa
