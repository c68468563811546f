#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "folearn/hardness.hpp"
#include "folearn/parser.hpp"
#include "support/gen.hpp"
#include "support/reference.hpp"

using namespace folearn;

TEST_CASE("model checking worked examples") {
    Vocabulary voc{{"P"}};
    ColoredGraph g = build_graph(3, {{0, 1}}, voc, {{1}});
    LearnOracle oracle = oracle_from_const_l();

    CHECK(mc_via_learn_oracle(g, parse_formula("exists z1. P(z1)"), oracle));
    CHECK_FALSE(mc_via_learn_oracle(g, parse_formula("forall z1. P(z1)"), oracle));
    CHECK(mc_via_learn_oracle(g, parse_formula("exists z1. !P(z1)"), oracle));
    CHECK(mc_via_learn_oracle(g, parse_formula("exists z1. exists z2. E(z1, z2)"), oracle));
    CHECK(mc_via_learn_oracle(g, parse_formula("forall z1. P(z1) -> (exists z2. E(z1, z2))"), oracle));

    ColoredGraph unlabelled = build_graph(3, {{0, 1}}, voc, {{}});
    CHECK_FALSE(mc_via_learn_oracle(unlabelled, parse_formula("exists z1. P(z1)"), oracle));

    ColoredGraph empty = build_graph(0, {}, voc, {{}});
    CHECK_FALSE(mc_via_learn_oracle(empty, parse_formula("exists z1. P(z1)"), oracle));
    CHECK(mc_via_learn_oracle(empty, parse_formula("forall z1. P(z1)"), oracle));
}

TEST_CASE("model checking call accounting on an edge") {
    ColoredGraph k2 = build_graph(2, {{0, 1}}, Vocabulary{}, {});
    LearnOracle oracle = oracle_from_const_l();
    McStats stats;
    bool verdict = mc_via_learn_oracle(k2, parse_formula("exists z1. exists z2. E(z1, z2)"), oracle, &stats);

    CHECK(verdict);
    // Outer level: one pair call, rejected, so both endpoints share one
    // representative. Inner level: one more expansion under the pin, and the
    // leaf evaluation below it sits two pins deep.
    CHECK(stats.expansions == 2);
    CHECK(stats.oracle_calls == 2);
    CHECK(stats.max_calls_per_expansion == 1);
    CHECK(stats.max_depth == 2);
}

TEST_CASE("model checking partitions by color classes") {
    Vocabulary voc{{"P"}};
    ColoredGraph g = build_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, voc, {{1}});
    LearnOracle oracle = oracle_from_erm();
    McStats stats;
    bool verdict = mc_via_learn_oracle(g, parse_formula("exists z1. P(z1)"), oracle, &stats);

    CHECK(verdict);
    CHECK(stats.expansions == 1);
    CHECK(stats.oracle_calls == 10);  // every unordered pair of the 5 vertices
    CHECK(stats.max_calls_per_expansion == 10);
}

TEST_CASE("vacuous quantifiers pass through without expansion") {
    Vocabulary voc{{"P"}};
    ColoredGraph g = build_graph(3, {}, voc, {{2}});
    LearnOracle oracle = oracle_from_const_l();
    McStats stats;
    bool verdict = mc_via_learn_oracle(g, parse_formula("exists z1. (exists z2. P(z2))"), oracle, &stats);
    CHECK(verdict);
    CHECK(stats.expansions == 1);  // only the inner quantifier binds anything
}

TEST_CASE("model checking agrees with direct evaluation") {
    Rng rng(7001);
    LearnOracle oracles[2] = {oracle_from_const_l(), oracle_from_erm()};
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        int n = 2 + rng.below_int(7);
        Vocabulary voc = gen::numbered_vocab(1 + rng.below_int(2));
        ColoredGraph g = rng.chance(1, 2) ? gen::random_graph(rng, n, voc.size()) : gen::random_forest(rng, n, voc.size());
        FormulaPtr f = gen::random_sentence(rng, voc.colors, 1 + rng.below_int(2));
        if (f->qr > 2) continue;

        bool expected = ref::eval(g, f);
        const LearnOracle& oracle = oracles[trial % 2];
        McStats stats;
        bool got = mc_via_learn_oracle(g, f, oracle, &stats);
        INFO("oracle " << oracle.name << " formula " << format_formula(f));
        REQUIRE(got == expected);
        long long pair_bound = static_cast<long long>(g.n) * (g.n - 1) / 2;
        REQUIRE(stats.max_calls_per_expansion <= pair_bound);
        if (stats.expansions > 0) REQUIRE(stats.max_calls_per_expansion == pair_bound);
        ++checked;
    }
    REQUIRE(checked >= 30);
}

TEST_CASE("inflated parameter bounds add graph copies but keep verdicts") {
    Rng rng(7002);
    LearnOracle oracle = oracle_from_const_l();
    oracle.L = [](int, int, int) { return 1; };  // forces two labelled copies per call
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2 + rng.below_int(5);
        Vocabulary voc = gen::numbered_vocab(1);
        ColoredGraph g = gen::random_graph(rng, n, voc.size());
        FormulaPtr f = gen::random_sentence(rng, voc.colors, 1);
        bool expected = ref::eval(g, f);
        REQUIRE(mc_via_learn_oracle(g, f, oracle) == expected);
    }
}

TEST_CASE("an oracle that accepts everything is caught") {
    Vocabulary voc{{"P"}};
    ColoredGraph g = build_graph(3, {{0, 1}}, voc, {{1}});

    LearnOracle broken;
    broken.name = "always-accept";
    broken.L = [](int, int, int) { return 0; };
    broken.learn = [](const ColoredGraph&, const std::vector<VertexTuple>&, const std::vector<VertexTuple>&,
                      int k, int, int q) -> std::optional<Hypothesis> {
        Hypothesis h;
        h.k = k;
        h.ctx = TypeContext{q, gaifman_radius(q)};
        return h;  // classifies every tuple negative, so positives are misread
    };
    CHECK_THROWS_AS(mc_via_learn_oracle(g, parse_formula("exists z1. P(z1)"), broken), InvariantViolation);
}

TEST_CASE("model checking validates its inputs") {
    Vocabulary voc{{"P"}};
    ColoredGraph g = build_graph(2, {}, voc, {{0}});
    LearnOracle oracle = oracle_from_const_l();

    CHECK_THROWS_AS(mc_via_learn_oracle(g, nullptr, oracle), std::invalid_argument);
    CHECK_THROWS_AS(mc_via_learn_oracle(g, parse_formula("P(x1)"), oracle), std::invalid_argument);

    LearnOracle hollow;
    CHECK_THROWS_AS(mc_via_learn_oracle(g, parse_formula("exists z1. P(z1)"), hollow), std::invalid_argument);
}
