#include <catch2/catch_amalgamated.hpp>

#include "folqa/logic.hpp"
#include "folqa/rng.hpp"

using namespace folqa;

TEST_CASE("symbols are case-normalized and whitespace-free") {
    CHECK(PredicateLiteral("Cat").predicate == "cat");
    CHECK(GroundLiteral(PredicateLiteral("cat"), "Fae").subject == "fae");
    CHECK_THROWS_AS(PredicateLiteral(""), std::invalid_argument);
    CHECK_THROWS_AS(PredicateLiteral("two words"), std::invalid_argument);
    CHECK_THROWS_AS(GroundLiteral(PredicateLiteral("cat"), ""), std::invalid_argument);
}

TEST_CASE("implications reject negated antecedents") {
    CHECK_NOTHROW(UniversalImplication(PredicateLiteral("cat"), PredicateLiteral("herbivorous", true)));
    CHECK_THROWS_AS(UniversalImplication(PredicateLiteral("cat", true), PredicateLiteral("carnivore")),
                    std::invalid_argument);
}

TEST_CASE("apply_hop") {
    auto cat_fae = GroundLiteral(PredicateLiteral("cat"), "fae");
    auto rule = UniversalImplication(PredicateLiteral("cat"), PredicateLiteral("carnivore"));
    CHECK(apply_hop(rule, cat_fae) == GroundLiteral(PredicateLiteral("carnivore"), "fae"));

    auto carn_fae = GroundLiteral(PredicateLiteral("carnivore"), "fae");
    auto neg_rule = UniversalImplication(PredicateLiteral("carnivore"), PredicateLiteral("herbivorous", true));
    CHECK(apply_hop(neg_rule, carn_fae) == GroundLiteral(PredicateLiteral("herbivorous", true), "fae"));

    auto ident = UniversalImplication(PredicateLiteral("p"), PredicateLiteral("p"));
    auto p_a = GroundLiteral(PredicateLiteral("p"), "a");
    CHECK(apply_hop(ident, p_a) == p_a);

    CHECK_THROWS_WITH(apply_hop(rule, carn_fae), Catch::Matchers::ContainsSubstring("inapplicable rule"));
    // subject constant never changes
    CHECK(apply_hop(rule, GroundLiteral(PredicateLiteral("cat"), "sally")).subject == "sally");
}

TEST_CASE("substitute preserves negation") {
    CHECK(substitute(PredicateLiteral("carnivore"), "fae") == GroundLiteral(PredicateLiteral("carnivore"), "fae"));
    CHECK(substitute(PredicateLiteral("herbivorous", true), "fae") ==
          GroundLiteral(PredicateLiteral("herbivorous", true), "fae"));
    CHECK(substitute(PredicateLiteral("p"), "a") == GroundLiteral(PredicateLiteral("p"), "a"));
}

TEST_CASE("forward_closure on the worked animal chain") {
    std::vector<LogicalForm> axioms = {
        LogicalForm::ground("cat", "fae"),
        LogicalForm::implies("cat", "carnivore"),
        LogicalForm::implies("carnivore", "herbivorous", true),
    };
    auto closure = forward_closure(axioms);
    std::set<GroundLiteral> expected = {
        GroundLiteral(PredicateLiteral("cat"), "fae"),
        GroundLiteral(PredicateLiteral("carnivore"), "fae"),
        GroundLiteral(PredicateLiteral("herbivorous", true), "fae"),
    };
    CHECK(closure == expected);
}

TEST_CASE("forward_closure with no rules is the ground axioms") {
    std::vector<LogicalForm> axioms = {LogicalForm::ground("cat", "fae")};
    auto closure = forward_closure(axioms);
    CHECK(closure == std::set<GroundLiteral>{GroundLiteral(PredicateLiteral("cat"), "fae")});
}

TEST_CASE("forward_closure over a depth-8 chain derives one literal per ancestor") {
    // Independent enumeration: build c0 <- c1 <- ... <- c7 with a property on
    // every even node, start the chain at the leaf, and list what must follow.
    std::vector<LogicalForm> axioms;
    for (int i = 7; i > 0; --i)
        axioms.push_back(LogicalForm::implies("c" + std::to_string(i), "c" + std::to_string(i - 1)));
    for (int i = 0; i < 8; i += 2)
        axioms.push_back(LogicalForm::implies("c" + std::to_string(i), "p" + std::to_string(i), i % 4 == 0));
    axioms.push_back(LogicalForm::ground("c7", "rex"));

    std::set<GroundLiteral> expected;
    for (int i = 0; i < 8; ++i) expected.insert(GroundLiteral(PredicateLiteral("c" + std::to_string(i)), "rex"));
    for (int i = 0; i < 8; i += 2)
        expected.insert(GroundLiteral(PredicateLiteral("p" + std::to_string(i), i % 4 == 0), "rex"));
    CHECK(forward_closure(axioms) == expected);
}

TEST_CASE("closure monotonicity over random axiom sets") {
    SeededRng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        auto symbol = [&](const char* stem) { return std::string(stem) + std::to_string(rng.index(6)); };
        auto random_axioms = [&](int n) {
            std::vector<LogicalForm> out;
            for (int i = 0; i < n; ++i) {
                if (rng.chance(0.4))
                    out.push_back(LogicalForm::ground(symbol("s"), rng.chance(0.5) ? "a" : "b", rng.chance(0.3)));
                else
                    out.push_back(LogicalForm::implies(symbol("s"), symbol("s"), rng.chance(0.3)));
            }
            return out;
        };
        auto a = random_axioms(1 + static_cast<int>(rng.index(5)));
        auto b = random_axioms(static_cast<int>(rng.index(4)));
        auto closure_a = forward_closure(a);
        auto both = a;
        both.insert(both.end(), b.begin(), b.end());
        auto closure_ab = forward_closure(both);
        for (const auto& fact : closure_a) CHECK(closure_ab.count(fact) == 1);
    }
}

TEST_CASE("proof structure validation") {
    auto cat_fae = GroundLiteral(PredicateLiteral("cat"), "fae");
    auto rule = UniversalImplication(PredicateLiteral("cat"), PredicateLiteral("carnivore"));

    Proof good;
    good.steps.push_back(ProofStep::ax(LogicalForm(cat_fae)));
    good.steps.push_back(ProofStep::ax(LogicalForm(rule)));
    good.steps.push_back(ProofStep::hop(cat_fae, rule));
    CHECK(proof_violation(good) == std::nullopt);
    CHECK(good.hop_count() == 1);
    CHECK(good.goal() == LogicalForm::ground("carnivore", "fae"));

    Proof missing_premise;
    missing_premise.steps.push_back(ProofStep::ax(LogicalForm(rule)));
    missing_premise.steps.push_back(ProofStep::hop(cat_fae, rule));
    auto violation = proof_violation(missing_premise);
    REQUIRE(violation.has_value());
    CHECK(violation->find("not previously concluded") != std::string::npos);

    // every ground conclusion lies in the closure of the proof's own axioms
    auto closure = forward_closure(good.axioms());
    for (const auto& step : good.steps)
        if (step.conclusion.is_ground()) CHECK(closure.count(step.conclusion.as_ground()) == 1);
}

TEST_CASE("canonical text round trip is bit-exact") {
    CHECK(to_text(LogicalForm::ground("cat", "fae")) == "cat(fae)");
    CHECK(to_text(LogicalForm::ground("herbivorous", "fae", true)) == "~herbivorous(fae)");
    CHECK(to_text(LogicalForm::implies("cat", "carnivore")) == "all x (cat(x) -> carnivore(x))");
    CHECK(to_text(LogicalForm::implies("carnivore", "herbivorous", true)) ==
          "all x (carnivore(x) -> ~herbivorous(x))");

    SeededRng rng(99);
    for (int i = 0; i < 500; ++i) {
        LogicalForm form;
        auto name = [&] { return "sym" + std::to_string(rng.index(20)); };
        if (rng.chance(0.5))
            form = LogicalForm::ground(name(), "e" + std::to_string(rng.index(5)), rng.chance(0.5));
        else
            form = LogicalForm::implies(name(), name(), rng.chance(0.5));
        std::string text = to_text(form);
        CHECK(parse_text(text) == form);
        CHECK(to_text(parse_text(text)) == text);
    }

    CHECK_THROWS_AS(parse_text("all x (cat(x) carnivore(x))"), std::invalid_argument);
    CHECK_THROWS_AS(parse_text("cat fae"), std::invalid_argument);
}
