#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "folearn/check.hpp"

namespace folearn {

using VertexTuple = std::vector<int>;

struct Vocabulary {
    std::vector<std::string> colors;

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < colors.size(); ++i)
            if (colors[i] == name) return static_cast<int>(i);
        return -1;
    }
    bool contains(const std::string& name) const { return index_of(name) >= 0; }
    int size() const { return static_cast<int>(colors.size()); }
};

// Finite undirected graph with unary color relations. Neighbor lists are kept
// sorted; vertex ids are 0..n-1.
struct ColoredGraph {
    int n = 0;
    Vocabulary vocab;
    std::vector<std::vector<int>> adj;
    std::vector<std::vector<bool>> color;  // color[c][v], parallel to vocab.colors

    bool has_edge(int u, int v) const {
        if (u == v) return false;
        const auto& a = adj[u];
        return std::binary_search(a.begin(), a.end(), v);
    }
    bool has_color(int c, int v) const { return color[c][v]; }
    bool has_color(const std::string& name, int v) const {
        int c = vocab.index_of(name);
        return c >= 0 && color[c][v];
    }

    bool is_isolated(int v) const { return adj[v].empty(); }

    int edge_count() const {
        std::size_t total = 0;
        for (const auto& a : adj) total += a.size();
        return static_cast<int>(total / 2);
    }
};

inline ColoredGraph build_graph(int n, const std::vector<std::pair<int, int>>& edges,
                                const Vocabulary& vocab = {},
                                const std::vector<std::vector<int>>& color_sets = {}) {
    require_input(n >= 0, "build_graph: negative vertex count");
    require_input(color_sets.empty() || static_cast<int>(color_sets.size()) == vocab.size(),
                  "build_graph: color sets do not match vocabulary");
    for (std::size_t i = 0; i < vocab.colors.size(); ++i)
        for (std::size_t j = i + 1; j < vocab.colors.size(); ++j)
            require_input(vocab.colors[i] != vocab.colors[j], "build_graph: duplicate color name " + vocab.colors[i]);

    ColoredGraph g;
    g.n = n;
    g.vocab = vocab;
    g.adj.assign(n, {});
    g.color.assign(vocab.colors.size(), std::vector<bool>(n, false));
    for (auto [u, v] : edges) {
        require_input(u >= 0 && u < n && v >= 0 && v < n,
                      "build_graph: edge endpoint out of range");
        require_input(u != v, "build_graph: self-loop rejected");
        if (!g.has_edge(u, v)) {
            g.adj[u].insert(std::upper_bound(g.adj[u].begin(), g.adj[u].end(), v), v);
            g.adj[v].insert(std::upper_bound(g.adj[v].begin(), g.adj[v].end(), u), u);
        }
    }
    for (std::size_t c = 0; c < color_sets.size(); ++c)
        for (int v : color_sets[c]) {
            require_input(v >= 0 && v < n, "build_graph: colored vertex out of range");
            g.color[c][v] = true;
        }
    return g;
}

// Multi-source BFS distances; unreachable vertices get -1.
inline std::vector<int> bfs_distances(const ColoredGraph& g, const VertexTuple& seeds) {
    std::vector<int> dist(g.n, -1);
    std::deque<int> queue;
    for (int s : seeds) {
        require_input(s >= 0 && s < g.n, "bfs_distances: seed out of range");
        if (dist[s] != 0) { dist[s] = 0; queue.push_back(s); }
    }
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int w : g.adj[u])
            if (dist[w] < 0) { dist[w] = dist[u] + 1; queue.push_back(w); }
    }
    return dist;
}

// N_r(seeds): all vertices within distance r of some seed, ascending.
inline std::vector<int> ball(const ColoredGraph& g, const VertexTuple& seeds, int r) {
    require_input(r >= 0, "ball: negative radius");
    std::vector<int> dist = bfs_distances(g, seeds);
    std::vector<int> out;
    for (int v = 0; v < g.n; ++v)
        if (dist[v] >= 0 && dist[v] <= r) out.push_back(v);
    return out;
}

inline std::vector<int> ball(const ColoredGraph& g, int seed, int r) {
    return ball(g, VertexTuple{seed}, r);
}

// Caches single-source BFS runs against one fixed graph.
class DistanceOracle {
public:
    explicit DistanceOracle(const ColoredGraph& g) : g_(&g) {}

    const std::vector<int>& from(int source) {
        auto it = cache_.find(source);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(source, bfs_distances(*g_, VertexTuple{source})).first->second;
    }

    // -1 when disconnected.
    int dist(int u, int v) { return from(u)[v]; }

    bool within(int u, int v, int r) {
        int d = from(u)[v];
        return d >= 0 && d <= r;
    }

private:
    const ColoredGraph* g_;
    std::map<int, std::vector<int>> cache_;
};

struct InducedSubgraph {
    ColoredGraph graph;
    std::vector<int> to_old;  // new id -> old id, ascending in old ids
    std::vector<int> to_new;  // old id -> new id, -1 if dropped
};

inline InducedSubgraph induced_subgraph(const ColoredGraph& g, const std::vector<int>& vertices) {
    InducedSubgraph out;
    out.to_old = vertices;
    std::sort(out.to_old.begin(), out.to_old.end());
    out.to_old.erase(std::unique(out.to_old.begin(), out.to_old.end()), out.to_old.end());
    for (int v : out.to_old)
        require_input(v >= 0 && v < g.n, "induced_subgraph: vertex out of range");

    out.to_new.assign(g.n, -1);
    for (std::size_t i = 0; i < out.to_old.size(); ++i) out.to_new[out.to_old[i]] = static_cast<int>(i);

    ColoredGraph& h = out.graph;
    h.n = static_cast<int>(out.to_old.size());
    h.vocab = g.vocab;
    h.adj.assign(h.n, {});
    h.color.assign(g.vocab.colors.size(), std::vector<bool>(h.n, false));
    for (int nu = 0; nu < h.n; ++nu) {
        int u = out.to_old[nu];
        for (int w : g.adj[u]) {
            int nw = out.to_new[w];
            if (nw >= 0) h.adj[nu].push_back(nw);
        }
        std::sort(h.adj[nu].begin(), h.adj[nu].end());
        for (int c = 0; c < g.vocab.size(); ++c) h.color[c][nu] = g.color[c][u];
    }
    return out;
}

// Adds fresh unary relations; names must not collide with existing ones.
inline ColoredGraph expand_colors(const ColoredGraph& g,
                                  const std::vector<std::pair<std::string, std::vector<bool>>>& additions) {
    ColoredGraph h = g;
    for (const auto& [name, members] : additions) {
        require_input(!h.vocab.contains(name), "expand_colors: color name already present: " + name);
        require_input(static_cast<int>(members.size()) == g.n, "expand_colors: membership vector size mismatch");
        h.vocab.colors.push_back(name);
        h.color.push_back(members);
    }
    return h;
}

// t disjoint copies; vertex v of copy i maps to i*n + v.
inline ColoredGraph disjoint_copies(const ColoredGraph& g, int t) {
    require_input(t >= 1, "disjoint_copies: need at least one copy");
    ColoredGraph h;
    h.n = g.n * t;
    h.vocab = g.vocab;
    h.adj.assign(h.n, {});
    h.color.assign(g.vocab.colors.size(), std::vector<bool>(h.n, false));
    for (int i = 0; i < t; ++i) {
        int base = i * g.n;
        for (int v = 0; v < g.n; ++v) {
            for (int w : g.adj[v]) h.adj[base + v].push_back(base + w);
            for (int c = 0; c < g.vocab.size(); ++c) h.color[c][base + v] = g.color[c][v];
        }
    }
    return h;
}

struct CoverResult {
    std::vector<int> Z;  // sorted subset of X
    int R = 0;           // 3^i * r
    int iterations = 0;  // the i with R = 3^i * r
};

namespace internal {

inline bool balls_pairwise_disjoint(const std::vector<std::vector<int>>& balls) {
    for (std::size_t a = 0; a < balls.size(); ++a)
        for (std::size_t b = a + 1; b < balls.size(); ++b) {
            const auto& x = balls[a];
            const auto& y = balls[b];
            std::size_t i = 0, j = 0;
            while (i < x.size() && j < y.size()) {
                if (x[i] == y[j]) return false;
                if (x[i] < y[j]) ++i; else ++j;
            }
        }
    return true;
}

}  // namespace internal

// Shrinks X to a subset Z whose R-balls are pairwise disjoint while N_r(X)
// stays inside N_R(Z). R = 3^i * r for the number of shrink rounds i; each
// round keeps a maximal ascending-id subset with disjoint current-radius
// balls, so i is at most |X|-1.
inline CoverResult vitali_cover(const ColoredGraph& g, const std::vector<int>& X, int r) {
    require_input(!X.empty(), "vitali_cover: empty center set");
    require_input(r >= 1, "vitali_cover: radius must be positive");

    CoverResult res;
    res.Z = X;
    std::sort(res.Z.begin(), res.Z.end());
    res.Z.erase(std::unique(res.Z.begin(), res.Z.end()), res.Z.end());
    for (int v : res.Z) require_input(v >= 0 && v < g.n, "vitali_cover: center out of range");
    int x_count = static_cast<int>(res.Z.size());

    res.iterations = 0;
    res.R = r;
    while (true) {
        std::vector<std::vector<int>> balls;
        balls.reserve(res.Z.size());
        for (int z : res.Z) balls.push_back(ball(g, z, res.R));
        if (internal::balls_pairwise_disjoint(balls)) break;

        std::vector<int> kept;
        std::vector<std::vector<int>> kept_balls;
        for (std::size_t idx = 0; idx < res.Z.size(); ++idx) {
            std::vector<std::vector<int>> probe = kept_balls;
            probe.push_back(balls[idx]);
            if (internal::balls_pairwise_disjoint(probe)) {
                kept.push_back(res.Z[idx]);
                kept_balls.push_back(balls[idx]);
            }
        }
        check(kept.size() < res.Z.size(), "vitali_cover: shrink round kept every center");
        res.Z = std::move(kept);
        ++res.iterations;
        res.R *= 3;
    }

    // Postconditions the callers rely on; a failure here is a bug.
    check(res.iterations <= std::max(0, x_count - 1), "vitali_cover: too many shrink rounds");
    {
        std::vector<int> covered = ball(g, res.Z, res.R);
        std::vector<int> need = ball(g, X, r);
        check(std::includes(covered.begin(), covered.end(), need.begin(), need.end()),
              "vitali_cover: N_r(X) escapes N_R(Z)");
    }
    return res;
}

}  // namespace folearn
