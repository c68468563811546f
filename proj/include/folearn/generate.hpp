#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "folearn/check.hpp"
#include "folearn/eval.hpp"
#include "folearn/formula.hpp"
#include "folearn/graph.hpp"
#include "folearn/graph_io.hpp"
#include "folearn/learners.hpp"
#include "folearn/parser.hpp"
#include "folearn/rational.hpp"
#include "folearn/rng.hpp"

namespace folearn {

enum class GraphFamily { Forest, Caterpillar, BoundedDegree, File };

inline const char* family_name(GraphFamily f) {
    switch (f) {
        case GraphFamily::Forest: return "forest";
        case GraphFamily::Caterpillar: return "caterpillar";
        case GraphFamily::BoundedDegree: return "bounded-degree";
        case GraphFamily::File: return "file";
    }
    return "?";
}

inline GraphFamily parse_family(const std::string& s) {
    if (s == "forest") return GraphFamily::Forest;
    if (s == "caterpillar") return GraphFamily::Caterpillar;
    if (s == "bounded-degree") return GraphFamily::BoundedDegree;
    if (s == "file") return GraphFamily::File;
    throw std::invalid_argument("unknown graph family: " + s);
}

struct DatasetSpec {
    GraphFamily family = GraphFamily::Forest;
    int n = 10;
    int height_bound = 3;                                  // forest: max root-to-leaf depth
    int spine = 0;                                         // caterpillar: spine length, 0 = (n+1)/2
    int degree_bound = 3;                                  // bounded-degree family
    Rational edge_density{1, 4};                           // bounded-degree: per-pair probability
    std::string graph_file;                                // explicit-file family
    std::vector<std::pair<std::string, Rational>> colors;  // color name -> density
    std::string target;                                    // concept formula over x1..xk, y1..yell
    VertexTuple target_params;                             // parameter vertices, one per y_j
    int k = 1;
    int ell = 0;
    int q = 1;
    int m_train = 20;
    int m_test = 50;
    Rational noise{0, 1};  // per-example label flip probability
    std::uint64_t seed = 1;
};

namespace internal {

inline void validate_density(const Rational& p, const std::string& what) {
    require_input(!(p < Rational(0)) && !(Rational(1) < p), what + " must lie in [0,1]");
}

inline void collect_color_names(const Node* f, std::set<std::string>& out) {
    if (f->kind == Node::Kind::Color) out.insert(f->color_name);
    if (f->lhs) collect_color_names(f->lhs.get(), out);
    if (f->rhs) collect_color_names(f->rhs.get(), out);
}

inline std::vector<std::pair<int, int>> forest_edges(int n, int height_bound, Rng& rng) {
    std::vector<int> depth(n, 0);
    std::vector<std::pair<int, int>> edges;
    std::vector<int> eligible;  // earlier vertices with spare depth below them
    for (int v = 1; v < n; ++v) {
        eligible.clear();
        for (int u = 0; u < v; ++u)
            if (depth[u] < height_bound) eligible.push_back(u);
        if (eligible.empty() || rng.chance(1, 4)) continue;  // v starts a new root
        int parent = eligible[rng.below_int(static_cast<int>(eligible.size()))];
        depth[v] = depth[parent] + 1;
        edges.emplace_back(parent, v);
    }
    return edges;
}

inline std::vector<std::pair<int, int>> caterpillar_edges(int n, int spine, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    if (n == 0) return edges;
    int s = spine > 0 ? std::min(spine, n) : (n + 1) / 2;
    for (int v = 1; v < s; ++v) edges.emplace_back(v - 1, v);
    for (int v = s; v < n; ++v) edges.emplace_back(rng.below_int(s), v);
    return edges;
}

inline std::vector<std::pair<int, int>> bounded_degree_edges(int n, int bound, const Rational& density, Rng& rng) {
    std::vector<std::pair<int, int>> pairs;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
    rng.shuffle(pairs);  // so the degree cap does not favor low-id vertices
    std::vector<int> deg(n, 0);
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : pairs) {
        if (deg[u] >= bound || deg[v] >= bound) continue;
        if (!rng.chance(static_cast<std::uint64_t>(density.num), static_cast<std::uint64_t>(density.den))) continue;
        ++deg[u];
        ++deg[v];
        edges.emplace_back(u, v);
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

// True when n^k >= m, without overflowing.
inline bool tuple_space_at_least(int n, int k, long long m) {
    long long total = 1;
    for (int i = 0; i < k; ++i) {
        if (n == 0) { total = 0; break; }
        if (total > m / std::max(n, 1) + 1) return true;
        total *= n;
    }
    return total >= m;
}

}  // namespace internal

inline ColoredGraph generate_graph(const DatasetSpec& spec) {
    require_input(spec.n >= 0, "generate_graph: negative n");
    if (spec.family == GraphFamily::File) {
        require_input(spec.colors.empty(), "generate_graph: explicit files carry their own colors");
        return load_graph_file(spec.graph_file);
    }

    Rng rng = Rng(spec.seed).child("graph");
    std::vector<std::pair<int, int>> edges;
    switch (spec.family) {
        case GraphFamily::Forest:
            require_input(spec.height_bound >= 0, "generate_graph: negative height bound");
            edges = internal::forest_edges(spec.n, spec.height_bound, rng);
            break;
        case GraphFamily::Caterpillar:
            edges = internal::caterpillar_edges(spec.n, spec.spine, rng);
            break;
        case GraphFamily::BoundedDegree:
            require_input(spec.degree_bound >= 1, "generate_graph: degree bound must be at least 1");
            internal::validate_density(spec.edge_density, "edge density");
            edges = internal::bounded_degree_edges(spec.n, spec.degree_bound, spec.edge_density, rng);
            break;
        case GraphFamily::File:
            break;  // handled above
    }

    Vocabulary vocab;
    std::vector<std::vector<int>> sets;
    for (const auto& [name, density] : spec.colors) {
        require_input(!name.empty(), "generate_graph: empty color name");
        internal::validate_density(density, "color density for " + name);
        Rng cr = Rng(spec.seed).child("color:" + name);
        std::vector<int> members;
        for (int v = 0; v < spec.n; ++v)
            if (cr.chance(static_cast<std::uint64_t>(density.num), static_cast<std::uint64_t>(density.den)))
                members.push_back(v);
        vocab.colors.push_back(name);
        sets.push_back(std::move(members));
    }
    return build_graph(spec.n, edges, vocab, sets);
}

// Parses and validates the target concept against the spec's k, ell, q and
// the graph it will be evaluated on.
inline FormulaPtr target_formula(const ColoredGraph& g, const DatasetSpec& spec) {
    require_input(!spec.target.empty(), "target formula missing");
    FormulaPtr f = parse_formula(spec.target);
    require_input(f->qr <= spec.q, "target formula exceeds the declared quantifier rank");
    for (const Var& v : f->free_vars) {
        if (v.fam == 'x')
            require_input(v.idx >= 1 && v.idx <= spec.k, "target uses instance variable beyond arity k");
        else if (v.fam == 'y')
            require_input(v.idx >= 1 && v.idx <= spec.ell, "target uses parameter variable beyond ell");
        else
            require_input(false, "target has an unexpected free variable " + v.str());
    }
    std::set<std::string> names;
    internal::collect_color_names(f.get(), names);
    for (const std::string& name : names)
        require_input(g.vocab.contains(name), "target mentions unknown color " + name);
    require_input(static_cast<int>(spec.target_params.size()) == spec.ell,
                  "target_params size must equal ell");
    for (int w : spec.target_params)
        require_input(w >= 0 && w < g.n, "target parameter vertex out of range");
    return f;
}

namespace internal {

inline Sample draw_sample(const ColoredGraph& g, const DatasetSpec& spec, int m, const std::string& stream) {
    require_input(m >= 0, "generate_sample: negative sample size");
    validate_density(spec.noise, "noise rate");
    require_input(spec.k >= 1, "generate_sample: k must be at least 1");
    FormulaPtr f = target_formula(g, spec);
    require_input(tuple_space_at_least(g.n, spec.k, m), "generate_sample: fewer than m distinct tuples exist");

    Rng rng = Rng(spec.seed).child(stream);
    std::vector<VertexTuple> tuples;
    if (!tuple_space_at_least(g.n, spec.k, 4LL * m + 16)) {
        // Dense regime: rejection would crawl, so enumerate and shuffle.
        std::vector<VertexTuple> all;
        for_each_tuple(g.n, spec.k, [&](const VertexTuple& t) {
            all.push_back(t);
            return true;
        });
        rng.shuffle(all);
        tuples.assign(all.begin(), all.begin() + m);
    } else {
        std::set<VertexTuple> seen;
        while (static_cast<int>(tuples.size()) < m) {
            VertexTuple t(spec.k);
            for (int i = 0; i < spec.k; ++i) t[i] = rng.below_int(g.n);
            if (seen.insert(t).second) tuples.push_back(t);
        }
    }

    Evaluator ev(g, f);
    std::vector<VertexTuple> pos, neg;
    for (const VertexTuple& t : tuples) {
        Assignment alpha;
        for (int i = 0; i < spec.k; ++i) alpha.set(var_x(i + 1), t[i]);
        for (int j = 0; j < spec.ell; ++j) alpha.set(var_y(j + 1), spec.target_params[j]);
        bool label = ev(alpha);
        if (rng.chance(static_cast<std::uint64_t>(spec.noise.num), static_cast<std::uint64_t>(spec.noise.den)))
            label = !label;
        (label ? pos : neg).push_back(t);
    }
    return make_sample(g, spec.k, pos, neg);
}

}  // namespace internal

inline Sample generate_sample(const ColoredGraph& g, const DatasetSpec& spec) {
    return internal::draw_sample(g, spec, spec.m_train, "sample:train");
}

inline Sample generate_test_sample(const ColoredGraph& g, const DatasetSpec& spec) {
    return internal::draw_sample(g, spec, spec.m_test, "sample:test");
}

}  // namespace folearn
