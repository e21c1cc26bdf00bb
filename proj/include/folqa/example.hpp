#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "folqa/generator.hpp"
#include "folqa/grammar.hpp"
#include "folqa/logic.hpp"
#include "folqa/pools.hpp"

// Assembles generated questions into complete examples and few-shot prompts,
// and owns the JSON Lines dataset format.

namespace folqa {

using json = nlohmann::json;

struct DatasetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExampleMeta {
    Flavor flavor = Flavor::Fictional;
    int num_hops = 1;
    Ordering ordering = Ordering::BottomUp;
    std::uint64_t seed = 0;
    bool operator==(const ExampleMeta&) const = default;
};

struct Example {
    std::vector<std::string> context;
    std::string query;  // start-axiom sentence + "True or false: ..." question
    std::vector<std::string> gold_cot;
    std::string label;  // "True" or "False"
    Proof gold_proof;
    std::vector<LogicalForm> axioms;  // ontology axioms + distractor + start axiom
    Lexicon lexicon;
    ExampleMeta meta;

    bool operator==(const Example&) const = default;

    const LogicalForm& gold_conclusion() const { return gold_proof.goal(); }
};

struct ExampleConfig {
    Flavor flavor = Flavor::Fictional;
    int num_hops = 1;
    Ordering ordering = Ordering::BottomUp;
    int chain_length = 0;  // 0 -> num_hops + 2
    double property_rate = 0.5;
    double property_goal_rate = 0.5;
    int retry_budget = 10;
    std::uint64_t seed = 0;

    int effective_chain_length() const { return chain_length > 0 ? chain_length : num_hops + 2; }
};

template <typename Rng>
Example build_example(const ExampleConfig& config, Rng& rng, const NamePools& pools) {
    if (config.num_hops < 1) throw ConfigError("num_hops must be at least 1");
    std::string last_error;
    for (int attempt = 0; attempt < config.retry_budget; ++attempt) {
        try {
            Ontology ontology =
                generate_ontology(rng, pools, config.flavor, config.effective_chain_length(), config.property_rate);
            GeneratedQuestion q = generate_question(ontology, rng, config.num_hops, pools, config.property_goal_rate);
            Lexicon lexicon = lexicon_for(ontology);

            Example ex;
            ex.context = render_context(ontology.axioms_in_order(config.ordering),
                                        std::optional<UniversalImplication>(ontology.distractors.at(0)), rng, lexicon);
            std::string start_sentence = render_form(LogicalForm(q.start_axiom), rng, lexicon);
            std::string query_sentence = render_form(LogicalForm(q.query_form), rng, lexicon);
            ex.query = start_sentence + " " + render_true_or_false(query_sentence);
            ex.gold_cot = render_cot(q.gold_proof, rng, lexicon);
            ex.label = q.label ? "True" : "False";
            ex.gold_proof = std::move(q.gold_proof);
            ex.axioms = std::move(q.axioms);
            ex.axioms.push_back(LogicalForm(q.start_axiom));
            ex.lexicon = std::move(lexicon);
            ex.meta = {config.flavor, config.num_hops, config.ordering, config.seed};
            return ex;
        } catch (const GenerationError& e) {
            last_error = e.what();
        } catch (const std::invalid_argument& e) {
            last_error = e.what();  // e.g. lexicon surface collision; resample
        }
    }
    throw GenerationError("retry budget exhausted after " + std::to_string(config.retry_budget) +
                          " attempts: " + last_error);
}

// Crude length proxy for flagging prompts near a provider's token limit.
inline std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

struct PromptConfig {
    int num_shots = 8;
    std::string question_prefix = "Q:";
    std::string answer_prefix = "A:";
};

struct Prompt {
    std::string text;
    std::size_t token_estimate = 0;
};

namespace detail {

inline std::string joined(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += " ";
        out += p;
    }
    return out;
}

}  // namespace detail

inline std::string question_block(const Example& ex, const PromptConfig& config) {
    return config.question_prefix + " " + detail::joined(ex.context) + " " + ex.query + "\n" + config.answer_prefix;
}

inline std::string answered_block(const Example& ex, const PromptConfig& config) {
    return question_block(ex, config) + " " + detail::joined(ex.gold_cot) + " " + ex.label;
}

// 8 fully answered questions followed by the unanswered test question.
inline Prompt build_prompt(const std::vector<Example>& shots, const Example& test,
                           const PromptConfig& config = {}) {
    std::string text;
    for (const auto& shot : shots) text += answered_block(shot, config) + "\n";
    text += question_block(test, config);
    return {std::move(text), 0};
}

inline Prompt build_prompt_counted(const std::vector<Example>& shots, const Example& test,
                                   const PromptConfig& config = {}) {
    Prompt p = build_prompt(shots, test, config);
    p.token_estimate = estimate_tokens(p.text);
    return p;
}

// --- JSON serialization -----------------------------------------------------

inline json lexicon_to_json(const Lexicon& lexicon) {
    json out = json::object();
    for (const auto& [symbol, entry] : lexicon.entries()) {
        if (entry.kind == Lexicon::Kind::Noun)
            out[symbol] = {{"kind", "noun"}, {"singular", entry.singular}, {"plural", entry.plural}};
        else
            out[symbol] = {{"kind", "adjective"}, {"phrase", entry.phrase}};
    }
    return out;
}

inline Lexicon lexicon_from_json(const json& j) {
    Lexicon lexicon;
    for (const auto& [symbol, entry] : j.items()) {
        if (entry.at("kind") == "noun")
            lexicon.add_noun(symbol, entry.at("singular"), entry.at("plural"));
        else
            lexicon.add_adjective(symbol, entry.at("phrase"));
    }
    return lexicon;
}

inline json proof_to_json(const Proof& proof) {
    json steps = json::array();
    for (const auto& s : proof.steps) {
        json premises = json::array();
        for (const auto& p : s.premises) premises.push_back(to_text(p));
        steps.push_back({{"rule", s.rule == Rule::Ax ? "Ax" : "Hop"},
                         {"premises", premises},
                         {"conclusion", to_text(s.conclusion)}});
    }
    return {{"steps", steps}};
}

inline Proof proof_from_json(const json& j) {
    Proof proof;
    for (const auto& s : j.at("steps")) {
        ProofStep step;
        step.rule = s.at("rule") == "Ax" ? Rule::Ax : Rule::Hop;
        for (const auto& p : s.at("premises")) step.premises.push_back(parse_text(p.get<std::string>()));
        step.conclusion = parse_text(s.at("conclusion").get<std::string>());
        proof.steps.push_back(std::move(step));
    }
    return proof;
}

inline json example_to_json(const Example& ex) {
    json axioms = json::array();
    for (const auto& a : ex.axioms) axioms.push_back(to_text(a));
    return {{"context", ex.context},
            {"query", ex.query},
            {"chain_of_thought", ex.gold_cot},
            {"label", ex.label},
            {"gold_proof", proof_to_json(ex.gold_proof)},
            {"axioms", axioms},
            {"lexicon", lexicon_to_json(ex.lexicon)},
            {"meta",
             {{"flavor", to_string(ex.meta.flavor)},
              {"num_hops", ex.meta.num_hops},
              {"ordering", to_string(ex.meta.ordering)},
              {"seed", ex.meta.seed}}}};
}

inline Example example_from_json(const json& j) {
    Example ex;
    ex.context = j.at("context").get<std::vector<std::string>>();
    ex.query = j.at("query").get<std::string>();
    ex.gold_cot = j.at("chain_of_thought").get<std::vector<std::string>>();
    ex.label = j.at("label").get<std::string>();
    ex.gold_proof = proof_from_json(j.at("gold_proof"));
    for (const auto& a : j.at("axioms")) ex.axioms.push_back(parse_text(a.get<std::string>()));
    ex.lexicon = lexicon_from_json(j.at("lexicon"));
    const json& meta = j.at("meta");
    ex.meta.flavor = flavor_from(meta.at("flavor").get<std::string>());
    ex.meta.num_hops = meta.at("num_hops").get<int>();
    ex.meta.ordering = ordering_from(meta.at("ordering").get<std::string>());
    ex.meta.seed = meta.at("seed").get<std::uint64_t>();
    return ex;
}

struct Dataset {
    json meta;
    std::vector<Example> examples;
};

// JSON Lines: a sidecar metadata record first, then one example per line.
inline void write_dataset(const std::filesystem::path& path, const json& config_meta,
                          const std::vector<Example>& examples) {
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot open " + path.string() + " for writing");
    json meta = {{"schema", "folqa.dataset"}, {"version", 1}};
    meta.update(config_meta);
    out << meta.dump() << "\n";
    for (const auto& ex : examples) out << example_to_json(ex).dump() << "\n";
    if (!out) throw DatasetError("short write to " + path.string());
}

inline Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open " + path.string());
    Dataset ds;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            if (line_no == 1) {
                if (j.value("schema", "") != "folqa.dataset")
                    throw DatasetError("not a folqa.dataset metadata record");
                ds.meta = std::move(j);
            } else {
                ds.examples.push_back(example_from_json(j));
            }
        } catch (const DatasetError&) {
            throw;
        } catch (const std::exception& e) {
            throw DatasetError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (ds.meta.is_null()) throw DatasetError(path.string() + ": missing metadata record");
    return ds;
}

}  // namespace folqa
