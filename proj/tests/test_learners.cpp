#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <vector>

#include "folearn/learners.hpp"
#include "folearn/parser.hpp"
#include "support/gen.hpp"
#include "support/reference.hpp"

using namespace folearn;

namespace {

// Labels every k-tuple by a target formula over x1..xk (and y1..yell bound to
// target_params), producing a full-enumeration sample.
Sample labeled_by_formula(const ColoredGraph& g, int k, const FormulaPtr& target,
                          const VertexTuple& target_params) {
    std::vector<VertexTuple> pos, neg;
    Evaluator evaluator(g, target);
    internal::for_each_tuple(g.n, k, [&](const VertexTuple& t) {
        Assignment alpha;
        for (int i = 0; i < k; ++i) alpha.set(var_x(i + 1), t[i]);
        for (std::size_t j = 0; j < target_params.size(); ++j)
            alpha.set(var_y(static_cast<int>(j) + 1), target_params[j]);
        (evaluator(alpha) ? pos : neg).push_back(t);
        return true;
    });
    return make_sample(g, k, std::move(pos), std::move(neg));
}

Hypothesis reject_all(int k) {
    Hypothesis h;
    h.k = k;
    h.ctx = TypeContext{0, 0};
    h.formula = mk_false();
    return h;
}

}  // namespace

TEST_CASE("make_sample validates, sorts, and deduplicates") {
    ColoredGraph g = gen::path_graph(4);
    Sample s = make_sample(g, 1, {{3}, {1}, {3}}, {{0}});
    REQUIRE(s.positives == std::vector<VertexTuple>{{1}, {3}});
    REQUIRE(s.negatives == std::vector<VertexTuple>{{0}});
    REQUIRE(s.m() == 3);

    REQUIRE_THROWS_AS(make_sample(g, 0, {}, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_sample(g, 1, {{0, 1}}, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_sample(g, 1, {{7}}, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_sample(g, 1, {{2}}, {{2}}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_sample(g, 2, {{0, 1}}, {{-1, 0}}), std::invalid_argument);
}

TEST_CASE("training error counts mistakes over the sample size exactly") {
    ColoredGraph g = gen::path_graph(4);
    Hypothesis h = reject_all(1);
    REQUIRE(training_error(g, h, make_sample(g, 1, {{0}, {1}}, {{2}, {3}})) == Rational{1, 2});
    REQUIRE(training_error(g, h, make_sample(g, 1, {}, {{1}, {2}, {3}})) == Rational{0, 1});
    REQUIRE(training_error(g, h, make_sample(g, 1, {{0}}, {{1}, {2}, {3}})) == Rational{1, 4});
    REQUIRE(training_error(g, h, make_sample(g, 1, {}, {})) == Rational{0, 1});
    REQUIRE_THROWS_AS(training_error(g, h, make_sample(g, 2, {{0, 0}}, {})), std::invalid_argument);
}

TEST_CASE("erm on an automorphic conflict settles at one half") {
    ColoredGraph k2 = build_graph(2, {{0, 1}}, {}, {});
    Sample s = make_sample(k2, 1, {{0}}, {{1}});
    ErmResult res = erm_typeset(k2, s, 0, 1);
    REQUIRE(res.error == Rational{1, 2});
    REQUIRE(res.error == training_error(k2, res.hypothesis, s));
    // Ties classify negative, so the positive example is the one sacrificed.
    REQUIRE_FALSE(classify(k2, res.hypothesis, {0}));
    REQUIRE_FALSE(classify(k2, res.hypothesis, {1}));
}

TEST_CASE("a parameter separates what no parameterless rule can") {
    ColoredGraph iso2 = build_graph(2, {}, {}, {});
    Sample s = make_sample(iso2, 1, {{0}}, {{1}});
    REQUIRE(erm_typeset(iso2, s, 0, 1).error == Rational{1, 2});
    ErmResult with_param = erm_typeset(iso2, s, 1, 1);
    REQUIRE(with_param.error == Rational{0, 1});
    REQUIRE(training_error(iso2, with_param.hypothesis, s) == Rational{0, 1});
}

TEST_CASE("erm matches brute-force enumeration on random instances") {
    Rng rng(5001);
    for (int trial = 0; trial < 40; ++trial) {
        ColoredGraph g = gen::random_graph(rng, 2 + rng.below_int(6), 1, 1, 3);
        int q = rng.below_int(2);
        int ell = rng.below_int(2);
        std::vector<VertexTuple> pos, neg;
        for (int v = 0; v < g.n; ++v) {
            if (rng.chance(1, 4)) continue;  // leave some vertices unlabeled
            (rng.chance(1, 2) ? pos : neg).push_back({v});
        }
        if (pos.empty() && neg.empty()) continue;
        Sample s = make_sample(g, 1, pos, neg);
        ErmResult res = erm_typeset(g, s, ell, q);
        long long best = ref::erm_best_mistakes(g, s.positives, s.negatives, ell, q, gaifman_radius(q));
        REQUIRE(res.error == Rational{best, s.m()});
        REQUIRE(training_error(g, res.hypothesis, s) == res.error);
    }
}

TEST_CASE("erm hypotheses classify identically through rule and formula") {
    Rng rng(5002);
    for (int trial = 0; trial < 20; ++trial) {
        ColoredGraph g = gen::random_graph(rng, 2 + rng.below_int(5), 1, 1, 3);
        std::vector<VertexTuple> pos, neg;
        for (int v = 0; v < g.n; ++v) (rng.chance(1, 2) ? pos : neg).push_back({v});
        Sample s = make_sample(g, 1, pos, neg);
        int ell = rng.below_int(2);
        ErmResult res = erm_typeset(g, s, ell, 1);
        REQUIRE(quantifier_rank(res.hypothesis.formula) <= 1 + dist_rank(res.hypothesis.ctx.r) + 2);
        for (int v = 0; v < g.n; ++v)
            REQUIRE(classify(g, res.hypothesis, {v}) == classify_by_formula(g, res.hypothesis, {v}));
    }
}

TEST_CASE("the exact learner accepts precisely the consistent instances") {
    ColoredGraph k2 = build_graph(2, {{0, 1}}, {}, {});
    Sample conflicted = make_sample(k2, 1, {{0}}, {{1}});
    REQUIRE_FALSE(learn_const_l(k2, conflicted, 0, 1).has_value());

    ColoredGraph iso2 = build_graph(2, {}, {}, {});
    Sample s = make_sample(iso2, 1, {{0}}, {{1}});
    REQUIRE_FALSE(learn_const_l(iso2, s, 0, 1).has_value());
    std::optional<Hypothesis> h = learn_const_l(iso2, s, 1, 1);
    REQUIRE(h.has_value());
    REQUIRE(training_error(iso2, *h, s) == Rational{0, 1});
}

TEST_CASE("exact learner verdict equals erm reaching zero error") {
    Rng rng(5003);
    for (int trial = 0; trial < 60; ++trial) {
        ColoredGraph g = trial % 2 == 0 ? gen::random_graph(rng, 2 + rng.below_int(7), 1)
                                        : gen::random_forest(rng, 2 + rng.below_int(7), 1);
        int k = 1 + rng.below_int(2);
        int ell = rng.below_int(2);
        int q = rng.below_int(2);
        std::vector<VertexTuple> pos, neg;
        internal::for_each_tuple(g.n, k, [&](const VertexTuple& t) {
            if (!rng.chance(1, 3)) return true;
            (rng.chance(1, 2) ? pos : neg).push_back(t);
            return true;
        });
        Sample s = make_sample(g, k, pos, neg);
        std::optional<Hypothesis> h = learn_const_l(g, s, ell, q);
        ErmResult res = erm_typeset(g, s, ell, q);
        REQUIRE(h.has_value() == (res.error == Rational{0, 1}));
        if (h) {
            REQUIRE(training_error(g, *h, s) == Rational{0, 1});
            // Re-evaluating the returned hypothesis reproduces the labels.
            for (const VertexTuple& t : s.positives) REQUIRE(classify(g, *h, t));
            for (const VertexTuple& t : s.negatives) REQUIRE_FALSE(classify(g, *h, t));
        }
    }
}

TEST_CASE("learners reject bad hyperparameters and reserved names") {
    ColoredGraph g = gen::path_graph(3);
    Sample s = make_sample(g, 1, {{0}}, {{1}});
    REQUIRE_THROWS_AS(erm_typeset(g, s, -1, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(erm_typeset(g, s, 0, -1), std::invalid_argument);
    REQUIRE_THROWS_AS(learn_const_l(g, s, -1, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(learn_k1(g, s, 0, -1), std::invalid_argument);

    Sample pair_sample = make_sample(g, 2, {{0, 1}}, {});
    REQUIRE_THROWS_AS(learn_k1(g, pair_sample, 0, 0), std::invalid_argument);

    Vocabulary voc;
    voc.colors = {"P_pos"};
    ColoredGraph reserved = build_graph(2, {}, voc, {{0}});
    Sample rs = make_sample(reserved, 1, {{0}}, {{1}});
    REQUIRE_THROWS_AS(learn_k1(reserved, rs, 0, 0), std::invalid_argument);

    Vocabulary voc2;
    voc2.colors = {"S_1"};
    ColoredGraph reserved2 = build_graph(2, {}, voc2, {{0}});
    Sample rs2 = make_sample(reserved2, 1, {{0}}, {{1}});
    REQUIRE_THROWS_AS(learn_k1(reserved2, rs2, 1, 0), std::invalid_argument);

    // An oversized parameter space trips the work budget, not a hang.
    ColoredGraph big = gen::path_graph(40);
    Sample bs = make_sample(big, 1, {{0}}, {{1}});
    REQUIRE_THROWS_AS(erm_typeset(big, bs, 4, 0, 1000), BudgetExceeded);
    REQUIRE_THROWS_AS(learn_const_l(big, bs, 4, 0, 1000), BudgetExceeded);
}

TEST_CASE("prefix-search learner separates the star center from a leaf") {
    ColoredGraph star = build_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, {}, {});
    Sample s = make_sample(star, 1, {{0}}, {{1}});
    std::optional<Hypothesis> h = learn_k1(star, s, 0, 1);
    REQUIRE(h.has_value());
    REQUIRE(training_error(star, *h, s) == Rational{0, 1});
    REQUIRE(classify(star, *h, {0}));
    REQUIRE_FALSE(classify(star, *h, {3}));  // other leaves type-match the negative
}

TEST_CASE("prefix-search learner finds a separating parameter on the star") {
    // Leaves adjacent to the center are positive, the center itself negative;
    // with one parameter (the center) rank-0 types already separate them.
    ColoredGraph star = build_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, {}, {});
    Sample s = make_sample(star, 1, {{1}, {2}, {3}, {4}}, {{0}});
    std::optional<Hypothesis> h = learn_k1(star, s, 1, 0);
    REQUIRE(h.has_value());
    REQUIRE(h->params.size() == 1);
    REQUIRE(training_error(star, *h, s) == Rational{0, 1});
}

TEST_CASE("prefix-search learner agrees with the exact learner") {
    Rng rng(5004);
    for (int trial = 0; trial < 30; ++trial) {
        ColoredGraph g = trial % 2 == 0 ? gen::random_graph(rng, 2 + rng.below_int(7), 1)
                                        : gen::random_forest(rng, 2 + rng.below_int(7), 1);
        int ell = rng.below_int(2);
        int q = rng.below_int(2);
        std::vector<VertexTuple> pos, neg;
        for (int v = 0; v < g.n; ++v) {
            if (rng.chance(1, 4)) continue;
            (rng.chance(1, 2) ? pos : neg).push_back({v});
        }
        Sample s = make_sample(g, 1, pos, neg);
        std::optional<Hypothesis> via_k1 = learn_k1(g, s, ell, q);
        std::optional<Hypothesis> via_const = learn_const_l(g, s, ell, q);
        REQUIRE(via_k1.has_value() == via_const.has_value());
        if (via_k1) {
            REQUIRE(training_error(g, *via_k1, s) == Rational{0, 1});
            for (int v = 0; v < g.n; ++v)
                REQUIRE(classify(g, *via_k1, {v}) == classify_by_formula(g, *via_k1, {v}));
        }
    }
}

TEST_CASE("planted concepts are recovered exactly when noiseless") {
    Rng rng(5005);
    ColoredGraph g = gen::random_forest(rng, 12, 1);
    FormulaPtr target = parse_formula("exists z1. E(x1, z1) & C1(z1)");
    Sample s = labeled_by_formula(g, 1, target, {});
    std::optional<Hypothesis> h = learn_const_l(g, s, 0, 1);
    REQUIRE(h.has_value());
    REQUIRE(training_error(g, *h, s) == Rational{0, 1});
    REQUIRE(erm_typeset(g, s, 0, 1).error == Rational{0, 1});
}
