#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <vector>

#include "folearn/splitter.hpp"
#include "support/gen.hpp"
#include "support/reference.hpp"

using namespace folearn;

TEST_CASE("ball_within restricts BFS to alive vertices") {
    ColoredGraph p5 = gen::path_graph(5);
    std::vector<bool> all(5, true);
    REQUIRE(ball_within(p5, all, 2, 1) == std::vector<int>{1, 2, 3});
    std::vector<bool> gap = all;
    gap[1] = false;
    REQUIRE(ball_within(p5, gap, 2, 2) == std::vector<int>{2, 3, 4});
    REQUIRE(ball_within(p5, gap, 0, 3) == std::vector<int>{0});
}

TEST_CASE("game values match hand analysis on the worked graphs") {
    ColoredGraph single = build_graph(1, {}, {}, {});
    REQUIRE(*minimax_depth(single, 1).depth == 1);
    REQUIRE(*minimax_depth(single, 5).depth == 1);

    ColoredGraph k2 = build_graph(2, {{0, 1}}, {}, {});
    REQUIRE(*minimax_depth(k2, 1).depth == 2);

    // Components outside the picked ball vanish, so two isolated vertices
    // fall in a single round.
    ColoredGraph iso2 = build_graph(2, {}, {}, {});
    REQUIRE(*minimax_depth(iso2, 1).depth == 1);

    ColoredGraph p5 = gen::path_graph(5);
    REQUIRE(*minimax_depth(p5, 2).depth == 3);
    REQUIRE(*minimax_depth(p5, 2).depth == ref::game_value(p5, 2));

    ColoredGraph empty = build_graph(0, {}, {}, {});
    REQUIRE(*minimax_depth(empty, 1).depth == 0);
}

TEST_CASE("game values agree with the reference search on random graphs") {
    Rng rng(4001);
    for (int trial = 0; trial < 40; ++trial) {
        ColoredGraph g = gen::random_graph(rng, 1 + rng.below_int(5), 0, 1, 3);
        for (int r : {1, 2}) {
            MinimaxResult res = minimax_depth(g, r);
            REQUIRE(res.depth.has_value());
            REQUIRE(*res.depth == ref::game_value(g, r));
        }
    }
}

TEST_CASE("game values never decrease when the radius grows") {
    Rng rng(4002);
    for (int trial = 0; trial < 30; ++trial) {
        ColoredGraph g = gen::random_graph(rng, 1 + rng.below_int(5), 0, 1, 3);
        int prev = 0;
        for (int r = 1; r <= 3; ++r) {
            int d = *minimax_depth(g, r).depth;
            REQUIRE(d >= prev);
            prev = d;
        }
    }
}

TEST_CASE("depth-limited search brackets the exact game value") {
    Rng rng(4003);
    for (int trial = 0; trial < 25; ++trial) {
        ColoredGraph g = gen::random_graph(rng, 1 + rng.below_int(5), 0, 1, 3);
        int d = *minimax_depth(g, 2).depth;
        REQUIRE(*minimax_wins_within(g, 2, d) == true);
        if (d > 0) REQUIRE(*minimax_wins_within(g, 2, d - 1) == false);
    }
}

TEST_CASE("a tiny budget reports exhaustion instead of a wrong answer") {
    ColoredGraph g = gen::path_graph(6);
    MinimaxResult res = minimax_depth(g, 2, 3);
    REQUIRE_FALSE(res.depth.has_value());
    REQUIRE(res.answer.empty());
    REQUIRE_FALSE(minimax_wins_within(g, 2, 3, 2).has_value());
}

TEST_CASE("forest strategy declares height plus one") {
    ForestStrategy forest;
    REQUIRE(forest.declared_depth(build_graph(0, {}, {}, {}), 1) == 0);
    REQUIRE(forest.declared_depth(build_graph(1, {}, {}, {}), 1) == 1);
    REQUIRE(forest.declared_depth(gen::path_graph(5), 1) == 3);
    REQUIRE(forest.declared_depth(gen::path_graph(9), 2) == 5);

    ColoredGraph star = build_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, {}, {});
    REQUIRE(forest.declared_depth(star, 1) == 2);

    // Two three-vertex paths: every component is centered separately.
    ColoredGraph two_p3 = build_graph(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}}, {}, {});
    REQUIRE(forest.declared_depth(two_p3, 1) == 2);

    ColoredGraph triangle = build_graph(3, {{0, 1}, {1, 2}, {0, 2}}, {}, {});
    REQUIRE_THROWS_AS(forest.declared_depth(triangle, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(forest.answer(triangle, {0, 1, 2}, 0, 1), std::invalid_argument);
}

TEST_CASE("forest strategy answers the shallowest ball vertex") {
    ForestStrategy forest;
    ColoredGraph star = build_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, {}, {});
    std::vector<int> ids{0, 1, 2, 3, 4};
    REQUIRE(forest.answer(star, ids, 1, 1) == 0);  // leaf pick still yields the center
    REQUIRE(forest.answer(star, ids, 0, 1) == 0);

    ColoredGraph p5 = gen::path_graph(5);
    REQUIRE(forest.answer(p5, ids, 0, 1) == 1);  // ball {0,1}, vertex 1 is nearer the center
    REQUIRE(forest.answer(p5, ids, 2, 1) == 2);  // the center itself is in the ball
}

TEST_CASE("worked game lines play out as specified") {
    ForestStrategy forest;

    GameState single = initial_state(build_graph(1, {}, {}, {}), 1);
    REQUIRE_FALSE(single.won());
    GameState after = play_round(single, forest, 0, 1);
    REQUIRE(after.won());
    REQUIRE(after.round == 1);

    ColoredGraph k2 = build_graph(2, {{0, 1}}, {}, {});
    GameState st = initial_state(k2, 1);
    st = play_round(st, forest, 0, 1);
    REQUIRE_FALSE(st.won());
    REQUIRE(st.graph.n == 1);
    REQUIRE(st.to_original == std::vector<int>{1});
    st = play_round(st, forest, 0, 1);
    REQUIRE(st.won());
    REQUIRE(st.round == 2);

    ColoredGraph star = build_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, {}, {});
    GameState sk = initial_state(star, 1);
    sk = play_round(sk, forest, 1, 1);  // pick a leaf; the rest of the star vanishes
    REQUIRE(sk.graph.n == 1);
    REQUIRE(sk.to_original == std::vector<int>{1});
    sk = play_round(sk, forest, 0, 1);
    REQUIRE(sk.won());
}

TEST_CASE("game state transitions validate their inputs") {
    ForestStrategy forest;
    ColoredGraph k2 = build_graph(2, {{0, 1}}, {}, {});
    REQUIRE_THROWS_AS(initial_state(k2, 0), std::invalid_argument);
    GameState st = initial_state(k2, 2);
    REQUIRE_THROWS_AS(play_round(st, forest, 5, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(play_round(st, forest, 0, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(play_round(st, forest, 0, -1), std::invalid_argument);
    st = play_round(st, forest, 0, 2);  // radius 2 ball covers both vertices
    st = play_round(st, forest, 0, 2);
    REQUIRE(st.won());
    REQUIRE_THROWS_AS(play_round(st, forest, 0, 1), std::invalid_argument);
}

TEST_CASE("verified wins match the worked examples") {
    ForestStrategy forest;
    ColoredGraph single = build_graph(1, {}, {}, {});
    REQUIRE(*verify_winning(single, 1, forest, 1) == true);

    ColoredGraph k2 = build_graph(2, {{0, 1}}, {}, {});
    REQUIRE(*verify_winning(k2, 1, forest, 1) == false);
    REQUIRE(*verify_winning(k2, 1, forest, 2) == true);
}

TEST_CASE("forest strategy survives exhaustive adversarial play") {
    ForestStrategy forest;
    Rng rng(4004);
    for (int trial = 0; trial < 30; ++trial) {
        ColoredGraph g = gen::random_forest(rng, 1 + rng.below_int(12), 0);
        int radius = 1 + rng.below_int(2);
        int declared = forest.declared_depth(g, radius);
        std::optional<bool> ok = verify_winning(g, radius, forest, declared);
        REQUIRE(ok.has_value());
        REQUIRE(*ok == true);
        if (g.n > 0 && g.n <= 6) {
            // The declared depth is an upper bound on the true game value.
            REQUIRE(*minimax_depth(g, radius).depth <= declared);
        }
    }
}

TEST_CASE("table strategy replays the optimal game") {
    Rng rng(4005);
    for (int trial = 0; trial < 25; ++trial) {
        ColoredGraph g = gen::random_graph(rng, 1 + rng.below_int(5), 0, 1, 3);
        int radius = 1 + rng.below_int(2);
        MinimaxResult res = minimax_depth(g, radius);
        int d = *res.depth;
        TableStrategy table(std::move(res), d);
        REQUIRE(table.declared_depth(g, radius) == d);
        REQUIRE(*verify_winning(g, radius, table, d) == true);
        if (d > 1) REQUIRE(*verify_winning(g, radius, table, d - 1) == false);
    }
}

TEST_CASE("exact strategy plays optimally and validates radii") {
    Rng rng(4006);
    for (int trial = 0; trial < 15; ++trial) {
        ColoredGraph g = gen::random_graph(rng, 1 + rng.below_int(5), 0, 1, 3);
        ExactStrategy exact(2);
        int d = exact.declared_depth(g, 2);
        REQUIRE(d == *minimax_depth(g, 2).depth);
        REQUIRE(*verify_winning(g, 2, exact, d) == true);
    }
    ExactStrategy exact(1);
    ColoredGraph p3 = gen::path_graph(3);
    REQUIRE_THROWS_AS(exact.declared_depth(p3, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(exact.answer(p3, {0, 1, 2}, 0, 2), std::invalid_argument);
    // Rounds at a smaller radius than the game radius are legitimate.
    ExactStrategy wide(3);
    int w = wide.answer(p3, {0, 1, 2}, 0, 1);
    REQUIRE((w == 0 || w == 1));
}
