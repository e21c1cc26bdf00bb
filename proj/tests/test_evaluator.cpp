#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "folqa/evaluator.hpp"
#include "folqa/rng.hpp"
#include "support.hpp"

using namespace folqa;
using folqa::test::figure_example;

namespace {

std::set<LogicalForm> forms(std::initializer_list<LogicalForm> fs) { return {fs.begin(), fs.end()}; }

}  // namespace

TEST_CASE("is_provable prices steps in rule applications") {
    auto cat_fae = LogicalForm::ground("cat", "fae");
    auto rule1 = LogicalForm::implies("cat", "carnivore");
    auto rule2 = LogicalForm::implies("carnivore", "mammal");

    SECTION("axiom membership is one Ax application") {
        auto r = is_provable(cat_fae, {cat_fae, rule1}, {});
        CHECK(r.k == 1);
        CHECK(!r.via_graph);
        CHECK(r.premises == forms({cat_fae}));
        // restating it a second time still prices as an Ax step
        auto again = is_provable(cat_fae, {cat_fae, rule1}, forms({cat_fae}));
        CHECK(again.k == 1);
    }

    SECTION("previously concluded forms cost nothing") {
        auto r = is_provable(cat_fae, {rule1}, forms({cat_fae}));
        CHECK(r.k == 0);
    }

    SECTION("a hop through a restated rule is atomic") {
        auto r = is_provable(LogicalForm::ground("carnivore", "fae"), {cat_fae, rule1},
                             forms({cat_fae, rule1}));
        CHECK(r.k == 1);
        CHECK(r.premises == forms({cat_fae, rule1}));
    }

    SECTION("a hop through an unstated rule also pays the implicit Ax") {
        auto r = is_provable(LogicalForm::ground("carnivore", "fae"), {cat_fae, rule1}, forms({cat_fae}));
        CHECK(r.k == 2);
        CHECK(r.premises == forms({cat_fae, rule1}));
    }

    SECTION("two skipped hops with unstated rules cost four applications") {
        auto r = is_provable(LogicalForm::ground("mammal", "fae"), {cat_fae, rule1, rule2}, forms({cat_fae}));
        CHECK(r.k == 4);
        CHECK(!r.via_graph);
        CHECK(r.premises == forms({cat_fae, rule1, rule2}));
    }

    SECTION("with both rules restated the skip costs two hops") {
        auto r = is_provable(LogicalForm::ground("mammal", "fae"), {cat_fae, rule1, rule2},
                             forms({cat_fae, rule1, rule2}));
        CHECK(r.k == 2);
    }

    SECTION("quantified goals go through the implication graph") {
        auto r = is_provable(LogicalForm::implies("cat", "mammal"), {cat_fae, rule1, rule2}, {});
        CHECK(r.via_graph);
        CHECK(r.k == 2);
        CHECK(r.premises == forms({rule1, rule2}));

        auto self = is_provable(LogicalForm::implies("cat", "cat"), {cat_fae, rule1}, {});
        CHECK(self.via_graph);
        CHECK(self.k == 0);
        CHECK(self.premises.empty());
    }

    SECTION("failures return k = -1 with empty premises") {
        auto r = is_provable(LogicalForm::ground("mammal", "sally"), {cat_fae, rule1, rule2}, {});
        CHECK(r.k == -1);
        CHECK(!r.via_graph);
        CHECK(r.premises.empty());
        auto reversed = is_provable(LogicalForm::implies("mammal", "cat"), {cat_fae, rule1, rule2}, {});
        CHECK(reversed.k == -1);
    }
}

TEST_CASE("is_provable can hop through implications concluded by the prediction") {
    auto cat_fae = LogicalForm::ground("cat", "fae");
    auto rule1 = LogicalForm::implies("cat", "carnivore");
    auto rule2 = LogicalForm::implies("carnivore", "herbivorous", true);
    // "Every cat is not herbivorous" was admitted broadly; using it is one hop
    auto composite = LogicalForm::implies("cat", "herbivorous", true);
    auto r = is_provable(LogicalForm::ground("herbivorous", "fae", true), {cat_fae, rule1, rule2},
                         forms({cat_fae, composite}));
    CHECK(r.k == 1);
    CHECK(r.premises == forms({cat_fae, composite}));
}

TEST_CASE("the seven step-type fixtures classify exactly") {
    std::ifstream in(FOLQA_TEST_DATA_DIR "/table1.json");
    REQUIRE(in.good());
    json fixtures = json::parse(in);
    Example figure = figure_example();
    GoldContext ctx = make_gold_context(figure);

    for (const auto& row : fixtures.at("rows")) {
        INFO("row " << row.at("name").get<std::string>());
        EvaluationResult result = evaluate_cot(ctx, row.at("completion").get<std::string>());

        auto expected = row.at("steps").get<std::vector<std::string>>();
        REQUIRE(result.steps.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) {
            INFO("step " << i << ": " << result.steps[i].raw);
            CHECK(to_string(result.steps[i].type) == expected[i]);
        }
        std::size_t highlight = row.at("highlight").get<std::size_t>();
        CHECK(to_string(result.steps.at(highlight).type) == row.at("highlight_type").get<std::string>());
        CHECK(result.label_correct == row.at("label_correct").get<bool>());
        CHECK(result.verdicts.strict == row.at("verdicts").at("strict").get<bool>());
        CHECK(result.verdicts.skip == row.at("verdicts").at("skip").get<bool>());
        CHECK(result.verdicts.broad == row.at("verdicts").at("broad").get<bool>());
        CHECK(result.verdicts.valid == row.at("verdicts").at("valid").get<bool>());
    }
}

TEST_CASE("gold chains of thought evaluate as fully canonical") {
    Example figure = figure_example();
    std::string completion = detail::joined(figure.gold_cot) + " " + figure.label;
    EvaluationResult result = evaluate_cot(figure, completion);
    REQUIRE(result.steps.size() == figure.gold_cot.size());
    for (const auto& step : result.steps) {
        CHECK(step.type == StepType::Canonical);
        CHECK(step.in_gold);
        CHECK(!step.misleading);
    }
    CHECK(result.verdicts == Verdicts{true, true, true, true});
    CHECK(result.label_correct);
    CHECK(result.gold_subset);

    SeededRng master(31415);
    const NamePools& pools = builtin_pools();
    for (int i = 0; i < 120; ++i) {
        SeededRng rng = master.derive(static_cast<std::uint64_t>(i));
        ExampleConfig config;
        config.flavor = i % 3 == 0 ? Flavor::Fictional : (i % 3 == 1 ? Flavor::True : Flavor::False);
        config.num_hops = 1 + 2 * static_cast<int>(i % 3);
        config.ordering = i % 2 == 0 ? Ordering::BottomUp : Ordering::TopDown;
        Example ex = build_example(config, rng, pools);
        EvaluationResult r = evaluate_cot(ex, detail::joined(ex.gold_cot) + " " + ex.label);
        for (const auto& step : r.steps) CHECK(step.type == StepType::Canonical);
        CHECK(r.verdicts == Verdicts{true, true, true, true});
        CHECK(r.label_correct);
    }
}

TEST_CASE("empty and degenerate completions") {
    Example figure = figure_example();
    EvaluationResult empty = evaluate_cot(figure, "");
    CHECK(empty.steps.empty());
    CHECK(!empty.label_present);
    CHECK(!empty.label_correct);
    CHECK(empty.verdicts == Verdicts{false, false, false, false});

    EvaluationResult just_label = evaluate_cot(figure, "True");
    CHECK(just_label.steps.empty());
    CHECK(just_label.label_present);
    CHECK(just_label.label_correct);
    CHECK(just_label.verdicts == Verdicts{false, false, false, false});

    EvaluationResult garbled = evaluate_cot(figure, "Fae is a cat. Maybe");
    CHECK(!garbled.label_present);
    CHECK(!garbled.label_correct);
    REQUIRE(garbled.steps.size() == 2);
    CHECK(garbled.steps[0].type == StepType::Canonical);
    CHECK(garbled.steps[1].type == StepType::Unparseable);
    CHECK(!garbled.steps[1].form.has_value());
}

TEST_CASE("split_completion peels the trailing label") {
    auto s = split_completion(" Fae is a cat. Fae is a carnivore. True");
    CHECK(s.label_present);
    CHECK(s.label_token == "True");
    REQUIRE(s.sentences.size() == 2);
    CHECK(s.sentences[0] == "Fae is a cat.");
    CHECK(s.sentences[1] == "Fae is a carnivore.");

    auto dotted = split_completion("Fae is a cat. false.");
    CHECK(dotted.label_present);
    CHECK(dotted.label_token == "False");
    CHECK(dotted.sentences.size() == 1);

    auto none = split_completion("Fae is a cat.");
    CHECK(!none.label_present);
    CHECK(none.sentences.size() == 1);

    CHECK(split_completion("").sentences.empty());
}

TEST_CASE("stating a conclusion before its premises fails every metric") {
    Example figure = figure_example();
    std::vector<std::string> reversed(figure.gold_cot.rbegin(), figure.gold_cot.rend());
    EvaluationResult result = evaluate_cot(figure, detail::joined(reversed) + " True");
    CHECK(!result.ordering_ok);
    CHECK(result.verdicts == Verdicts{false, false, false, false});
    // label accuracy is independent of proof accuracy
    CHECK(result.label_correct);
}

TEST_CASE("misleading steps never land on a gold conclusion") {
    Example figure = figure_example();
    GoldContext ctx = make_gold_context(figure);
    std::vector<std::string> probes = {
        "Every carnivore is a mammal.", "Fae is a mammal.", "Every cat is a mammal.",
        "Mammals are vertebrates.",     "Fae is a cat.",    "Every cat is not herbivorous.",
    };
    for (const auto& probe : probes) {
        EvaluationResult r = evaluate_cot(ctx, "Fae is a cat. Cats are carnivores. Fae is a carnivore. " + probe);
        for (const auto& step : r.steps)
            if (step.misleading) CHECK(ctx.gold_forms.count(*step.form) == 0);
    }
}

TEST_CASE("provability from axioms alone agrees with the forward-closure oracle") {
    SeededRng master(8080);
    const NamePools& pools = builtin_pools();
    for (int i = 0; i < 200; ++i) {
        SeededRng rng = master.derive(static_cast<std::uint64_t>(i));
        ExampleConfig config;
        config.flavor = i % 3 == 0 ? Flavor::Fictional : (i % 3 == 1 ? Flavor::True : Flavor::False);
        config.num_hops = 1 + 2 * static_cast<int>(i % 3);
        Example ex = build_example(config, rng, pools);

        auto closure = forward_closure(ex.axioms);
        std::set<LogicalForm> axiom_set(ex.axioms.begin(), ex.axioms.end());
        ImplicationGraph graph(ex.axioms);
        std::string subject = ex.axioms.back().as_ground().subject;

        std::set<std::string> predicates;
        for (const auto& a : ex.axioms) {
            if (a.is_ground()) predicates.insert(a.as_ground().literal.predicate);
            if (a.is_implication()) {
                predicates.insert(a.as_implication().antecedent.predicate);
                predicates.insert(a.as_implication().consequent.predicate);
            }
        }
        for (const auto& predicate : predicates) {
            for (bool negated : {false, true}) {
                GroundLiteral g(PredicateLiteral(predicate, negated), subject);
                bool provable = is_provable(LogicalForm(g), axiom_set, {}, graph).ok();
                CHECK(provable == (closure.count(g) == 1));
            }
        }
    }
}

TEST_CASE("metric monotonicity over perturbed chains of thought") {
    SeededRng master(616);
    const NamePools& pools = builtin_pools();
    for (int i = 0; i < 400; ++i) {
        SeededRng rng = master.derive(static_cast<std::uint64_t>(i));
        ExampleConfig config;
        config.flavor = i % 3 == 0 ? Flavor::Fictional : (i % 3 == 1 ? Flavor::True : Flavor::False);
        config.num_hops = 1 + 2 * static_cast<int>(i % 3);
        Example ex = build_example(config, rng, pools);

        std::vector<std::string> sentences = ex.gold_cot;
        int edits = 1 + static_cast<int>(rng.index(3));
        for (int e = 0; e < edits && !sentences.empty(); ++e) {
            switch (rng.index(6)) {
                case 0: sentences.erase(sentences.begin() + static_cast<std::ptrdiff_t>(rng.index(sentences.size()))); break;
                case 1: std::swap(sentences[rng.index(sentences.size())], sentences[rng.index(sentences.size())]); break;
                case 2: sentences.insert(sentences.begin() + static_cast<std::ptrdiff_t>(rng.index(sentences.size() + 1)),
                                         ex.context[rng.index(ex.context.size())]); break;
                case 3: sentences[rng.index(sentences.size())] = ex.context[rng.index(ex.context.size())]; break;
                case 4: sentences.push_back(sentences[rng.index(sentences.size())]); break;
                case 5: sentences.resize(1 + rng.index(sentences.size())); break;
            }
        }
        std::string completion = detail::joined(sentences);
        switch (rng.index(3)) {
            case 0: completion += " True"; break;
            case 1: completion += " False"; break;
            default: break;
        }

        EvaluationResult r = evaluate_cot(ex, completion);
        if (r.verdicts.strict) {
            CHECK(r.verdicts.skip);
            CHECK(r.verdicts.broad);
        }
        if (r.verdicts.skip) CHECK(r.verdicts.valid);
        if (r.verdicts.broad) CHECK(r.verdicts.valid);
    }
}

TEST_CASE("wilson interval matches the frozen oracle to 1e-9") {
    std::ifstream in(FOLQA_TEST_DATA_DIR "/wilson_cases.csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);  // header
    int cases = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::uint64_t s, t;
        double conf, low, high;
        REQUIRE(std::sscanf(line.c_str(), "%zu,%zu,%lf,%lf,%lf", &s, &t, &conf, &low, &high) == 5);
        Interval iv = wilson_interval(s, t, conf);
        INFO("case " << s << "/" << t << " @ " << conf);
        CHECK(std::abs(iv.low - low) <= 1e-9);
        CHECK(std::abs(iv.high - high) <= 1e-9);
        CHECK(iv.low >= 0.0);
        CHECK(iv.high <= 1.0);
        CHECK(iv.low <= iv.high);
        ++cases;
    }
    CHECK(cases == 100);

    CHECK(wilson_interval(0, 7).low == 0.0);
    CHECK(wilson_interval(7, 7).high == 1.0);
    CHECK_THROWS_AS(wilson_interval(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(wilson_interval(5, 3), std::invalid_argument);
}
