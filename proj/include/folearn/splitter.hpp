#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "folearn/check.hpp"
#include "folearn/graph.hpp"

namespace folearn {

// One game position: Splitter removes a vertex from the radius-limited ball
// Connector picked, and play continues inside that ball. Splitter wins when
// the arena empties. Radii may shrink below the game radius in a round
// (shrinking never helps Connector); the adversarial analyses below play the
// full radius every round.

// Vertices within distance r of seed, restricted to the alive set.
inline std::vector<int> ball_within(const ColoredGraph& g, const std::vector<bool>& alive, int seed, int r) {
    std::vector<int> dist(g.n, -1);
    std::vector<int> queue{seed};
    dist[seed] = 0;
    std::vector<int> out{seed};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        int u = queue[qi];
        if (dist[u] == r) continue;
        for (int w : g.adj[u])
            if (alive[w] && dist[w] < 0) {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
                out.push_back(w);
            }
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct MinimaxResult {
    std::optional<int> depth;  // empty when the search budget ran out
    // (position, connector pick) -> optimal Splitter answer; positions are
    // sorted alive-vertex sets of the input graph.
    std::map<std::pair<std::vector<int>, int>, int> answer;
};

namespace internal {

struct MinimaxSearch {
    const ColoredGraph& g;
    int radius;
    long long budget;
    std::map<std::vector<int>, int> value;
    MinimaxResult* out;

    struct OutOfBudget {};

    int run(const std::vector<int>& state) {
        if (state.empty()) return 0;
        auto it = value.find(state);
        if (it != value.end()) return it->second;
        if (--budget < 0) throw OutOfBudget{};

        std::vector<bool> alive(g.n, false);
        for (int v : state) alive[v] = true;

        int worst = 0;
        for (int v : state) {
            std::vector<int> b = ball_within(g, alive, v, radius);
            int best = -1, best_w = -1;
            for (int w : b) {
                std::vector<int> next;
                next.reserve(b.size() - 1);
                for (int u : b)
                    if (u != w) next.push_back(u);
                int d = run(next);
                if (best < 0 || d < best) { best = d; best_w = w; }
            }
            out->answer[{state, v}] = best_w;
            worst = std::max(worst, best);
        }
        int result = 1 + worst;
        value.emplace(state, result);
        return result;
    }
};

}  // namespace internal

// Exact game value: the least s such that Splitter can always win the
// radius-r game within s rounds. Exhaustive over positions, so only suitable
// for small graphs; a blown budget yields an empty depth, never a wrong one.
inline MinimaxResult minimax_depth(const ColoredGraph& g, int radius, long long budget = 2'000'000) {
    require_input(radius >= 0, "minimax_depth: negative radius");
    MinimaxResult res;
    std::vector<int> full(g.n);
    for (int v = 0; v < g.n; ++v) full[v] = v;
    internal::MinimaxSearch search{g, radius, budget, {}, &res};
    try {
        res.depth = search.run(full);
    } catch (internal::MinimaxSearch::OutOfBudget&) {
        res.depth.reset();
        res.answer.clear();
    }
    return res;
}

// Depth-limited variant: can Splitter force a win within d rounds?
inline std::optional<bool> minimax_wins_within(const ColoredGraph& g, int radius, int d,
                                               long long budget = 2'000'000) {
    require_input(radius >= 0 && d >= 0, "minimax_wins_within: bad arguments");
    struct Search {
        const ColoredGraph& g;
        int radius;
        long long budget;
        std::map<std::pair<std::vector<int>, int>, bool> memo;
        struct OutOfBudget {};

        bool wins(const std::vector<int>& state, int d) {
            if (state.empty()) return true;
            if (d == 0) return false;
            auto key = std::make_pair(state, d);
            auto it = memo.find(key);
            if (it != memo.end()) return it->second;
            if (--budget < 0) throw OutOfBudget{};

            std::vector<bool> alive(g.n, false);
            for (int v : state) alive[v] = true;
            bool all = true;
            for (int v : state) {
                std::vector<int> b = ball_within(g, alive, v, radius);
                bool any = false;
                for (int w : b) {
                    std::vector<int> next;
                    for (int u : b)
                        if (u != w) next.push_back(u);
                    if (wins(next, d - 1)) { any = true; break; }
                }
                if (!any) { all = false; break; }
            }
            memo.emplace(key, all);
            return all;
        }
    };
    Search s{g, radius, budget, {}};
    try {
        return s.wins([&] {
            std::vector<int> full(g.n);
            for (int v = 0; v < g.n; ++v) full[v] = v;
            return full;
        }(), d);
    } catch (Search::OutOfBudget&) {
        return std::nullopt;
    }
}

// A Splitter strategy answers Connector's pick inside the current arena.
// Picks and answers use arena-local ids; arena_ids maps them back to the
// caller's universe for strategies that track history.
class Strategy {
public:
    virtual ~Strategy() = default;
    virtual int answer(const ColoredGraph& arena, const std::vector<int>& arena_ids, int pick, int radius) = 0;
    // Upper bound on rounds this strategy needs on this graph at this radius.
    virtual int declared_depth(const ColoredGraph& g, int radius) = 0;
};

namespace internal {

inline bool forest_check(const ColoredGraph& g) {
    std::vector<int> parent(g.n, -2);
    for (int root = 0; root < g.n; ++root) {
        if (parent[root] != -2) continue;
        parent[root] = -1;
        std::vector<int> stack{root};
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int w : g.adj[u]) {
                if (w == parent[u]) continue;
                if (parent[w] != -2) return false;
                parent[w] = u;
                stack.push_back(w);
            }
        }
    }
    return true;
}

// Center of each component (min eccentricity, ties to least id) and depths
// from those centers.
struct ForestRooting {
    std::vector<int> depth;
    std::vector<int> comp;
    int height = 0;  // max depth over all vertices
};

inline ForestRooting root_forest_at_centers(const ColoredGraph& g) {
    ForestRooting out;
    out.depth.assign(g.n, -1);
    out.comp.assign(g.n, -1);
    int comp_id = 0;
    for (int v = 0; v < g.n; ++v) {
        if (out.comp[v] >= 0) continue;
        std::vector<int> members;
        {
            std::vector<int> stack{v};
            out.comp[v] = comp_id;
            while (!stack.empty()) {
                int u = stack.back();
                stack.pop_back();
                members.push_back(u);
                for (int w : g.adj[u])
                    if (out.comp[w] < 0) {
                        out.comp[w] = comp_id;
                        stack.push_back(w);
                    }
            }
        }
        std::sort(members.begin(), members.end());
        int center = -1, center_ecc = -1;
        for (int c : members) {
            std::vector<int> d = bfs_distances(g, VertexTuple{c});
            int ecc = 0;
            for (int u : members) ecc = std::max(ecc, d[u]);
            if (center < 0 || ecc < center_ecc) { center = c; center_ecc = ecc; }
        }
        std::vector<int> d = bfs_distances(g, VertexTuple{center});
        for (int u : members) {
            out.depth[u] = d[u];
            out.height = std::max(out.height, d[u]);
        }
        ++comp_id;
    }
    return out;
}

}  // namespace internal

// On forests, answering with the ball vertex closest to the component root
// strictly shrinks component height every round, so height+1 rounds always
// suffice at any radius.
class ForestStrategy : public Strategy {
public:
    int answer(const ColoredGraph& arena, const std::vector<int>&, int pick, int radius) override {
        require_input(pick >= 0 && pick < arena.n, "forest strategy: pick out of range");
        require_input(internal::forest_check(arena), "forest strategy: arena contains a cycle");
        internal::ForestRooting rooting = internal::root_forest_at_centers(arena);
        std::vector<bool> alive(arena.n, true);
        std::vector<int> b = ball_within(arena, alive, pick, radius);
        int best = -1;
        for (int u : b)
            if (best < 0 || rooting.depth[u] < rooting.depth[best]) best = u;
        return best;
    }

    int declared_depth(const ColoredGraph& g, int) override {
        require_input(internal::forest_check(g), "forest strategy: graph contains a cycle");
        if (g.n == 0) return 0;
        return internal::root_forest_at_centers(g).height + 1;
    }
};

// Replays the optimal answers computed by minimax_depth. Only valid for
// arenas whose arena_ids are positions of the graph the table was built on.
class TableStrategy : public Strategy {
public:
    TableStrategy(MinimaxResult table, int fallback_depth)
        : table_(std::move(table)), depth_(fallback_depth) {}

    int answer(const ColoredGraph&, const std::vector<int>& arena_ids, int pick, int) override {
        std::vector<int> state = arena_ids;
        auto it = table_.answer.find({state, arena_ids[pick]});
        require_input(it != table_.answer.end(), "table strategy: position not in table");
        int orig_w = it->second;
        for (std::size_t i = 0; i < arena_ids.size(); ++i)
            if (arena_ids[i] == orig_w) return static_cast<int>(i);
        throw InvariantViolation("table strategy: answer not in arena");
    }

    int declared_depth(const ColoredGraph&, int) override { return depth_; }

private:
    MinimaxResult table_;
    int depth_;
};

// Recomputes the exact game on every arena it is asked about. The game
// radius is fixed at construction; rounds may be played at smaller radii, and
// the answer then minimizes the game-radius value of the shrunk ball, which
// keeps the remaining-rounds invariant that a round at the full radius would
// give (the shrunk ball minus the full-radius answer, or minus any vertex
// when that answer lies outside, is a subset of the full ball minus its
// optimal answer).
class ExactStrategy : public Strategy {
public:
    explicit ExactStrategy(int game_radius, long long budget = 2'000'000)
        : game_radius_(game_radius), budget_(budget) {}

    int answer(const ColoredGraph& arena, const std::vector<int>&, int pick, int radius) override {
        require_input(radius <= game_radius_, "exact strategy: round radius exceeds the game radius");
        MinimaxResult res;
        internal::MinimaxSearch search{arena, game_radius_, budget_, {}, &res};
        std::vector<bool> alive(arena.n, true);
        std::vector<int> b = ball_within(arena, alive, pick, radius);
        int best = -1, best_value = -1;
        try {
            for (int w : b) {
                std::vector<int> rest;
                for (int u : b)
                    if (u != w) rest.push_back(u);
                int value = search.run(rest);
                if (best < 0 || value < best_value) { best = w; best_value = value; }
            }
        } catch (internal::MinimaxSearch::OutOfBudget&) {
            throw BudgetExceeded("exact splitter strategy: game search budget exceeded");
        }
        return best;
    }

    int declared_depth(const ColoredGraph& g, int radius) override {
        require_input(radius == game_radius_, "exact strategy: depth queried at a foreign radius");
        MinimaxResult res = minimax_depth(g, radius, budget_);
        if (!res.depth) throw BudgetExceeded("exact splitter strategy: game search budget exceeded");
        return *res.depth;
    }

private:
    int game_radius_;
    long long budget_;
};

// A live game position. Arena ids are dense; to_original maps them back to
// the ids of the graph the game started on.
struct GameState {
    ColoredGraph graph;
    std::vector<int> to_original;
    int radius = 1;  // game radius bound; rounds may be played at less
    int round = 0;
    bool won() const { return graph.n == 0; }
};

inline GameState initial_state(const ColoredGraph& g, int radius) {
    require_input(radius >= 1, "splitter game: radius must be positive");
    GameState st;
    st.graph = g;
    st.to_original.resize(g.n);
    for (int v = 0; v < g.n; ++v) st.to_original[v] = v;
    st.radius = radius;
    return st;
}

// One round: Connector picked `pick` (an arena id) and a round radius at most
// the game radius; the strategy answers inside the pick's ball and play
// continues in that ball minus the answer.
inline GameState play_round(const GameState& st, Strategy& strategy, int pick, int round_radius) {
    require_input(!st.won(), "splitter game: game already won");
    require_input(pick >= 0 && pick < st.graph.n, "splitter game: pick outside the arena");
    require_input(round_radius >= 0 && round_radius <= st.radius,
                  "splitter game: round radius exceeds the game radius");
    std::vector<bool> alive(st.graph.n, true);
    std::vector<int> b = ball_within(st.graph, alive, pick, round_radius);
    int w = strategy.answer(st.graph, st.to_original, pick, round_radius);
    require_input(w >= 0 && w < st.graph.n && std::binary_search(b.begin(), b.end(), w),
                  "splitter game: strategy answered outside the ball");
    std::vector<int> next;
    for (int u : b)
        if (u != w) next.push_back(u);
    InducedSubgraph sub = induced_subgraph(st.graph, next);
    GameState out;
    out.graph = std::move(sub.graph);
    out.to_original.reserve(sub.to_old.size());
    for (int u : sub.to_old) out.to_original.push_back(st.to_original[u]);
    out.radius = st.radius;
    out.round = st.round + 1;
    return out;
}

// Plays every Connector line against the strategy. Returns whether the
// strategy wins within s rounds; empty when the budget runs out first.
inline std::optional<bool> verify_winning(const ColoredGraph& g, int radius, Strategy& strategy, int s,
                                          long long budget = 2'000'000) {
    require_input(radius >= 0 && s >= 0, "verify_winning: bad arguments");
    struct Search {
        int radius;
        Strategy& strategy;
        long long budget;
        std::map<std::vector<int>, int> rounds_needed;
        struct OutOfBudget {};

        int run(const ColoredGraph& arena, const std::vector<int>& ids) {
            if (arena.n == 0) return 0;
            auto it = rounds_needed.find(ids);
            if (it != rounds_needed.end()) return it->second;
            if (--budget < 0) throw OutOfBudget{};

            std::vector<bool> alive(arena.n, true);
            int worst = 0;
            for (int v = 0; v < arena.n; ++v) {
                int w = strategy.answer(arena, ids, v, radius);
                std::vector<int> b = ball_within(arena, alive, v, radius);
                require_input(std::binary_search(b.begin(), b.end(), w),
                              "verify_winning: strategy answered outside the ball");
                std::vector<int> next;
                for (int u : b)
                    if (u != w) next.push_back(u);
                InducedSubgraph sub = induced_subgraph(arena, next);
                std::vector<int> next_ids;
                next_ids.reserve(sub.to_old.size());
                for (int u : sub.to_old) next_ids.push_back(ids[u]);
                worst = std::max(worst, run(sub.graph, next_ids));
            }
            int result = 1 + worst;
            rounds_needed.emplace(ids, result);
            return result;
        }
    };
    Search search{radius, strategy, budget, {}};
    std::vector<int> ids(g.n);
    for (int v = 0; v < g.n; ++v) ids[v] = v;
    try {
        return search.run(g, ids) <= s;
    } catch (Search::OutOfBudget&) {
        return std::nullopt;
    }
}

}  // namespace folearn
