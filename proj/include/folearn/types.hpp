#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "folearn/formula.hpp"
#include "folearn/graph.hpp"
#include "folearn/rng.hpp"

namespace folearn {

// Radius within which rank-q formulas are determined by neighborhood types.
inline int gaifman_radius(int q) {
    require_input(q >= 0 && q <= 8, "gaifman_radius: rank out of supported range");
    long long p = 1;
    for (int i = 0; i < q; ++i) p *= 7;
    return static_cast<int>((p - 1) / 2);
}

struct TypeContext {
    int q = 0;
    int r = 0;
    friend bool operator==(const TypeContext& a, const TypeContext& b) { return a.q == b.q && a.r == b.r; }
};

// Fingerprint of a recursive type object. Equality of fingerprints is the
// type-equality test; 128 bits over two independent FNV streams makes
// accidental collisions irrelevant at the scales this library handles.
struct TypeId {
    std::uint64_t hi = 0, lo = 0;
    std::uint16_t arity = 0;
    std::uint16_t rank = 0;

    friend bool operator==(const TypeId& a, const TypeId& b) {
        return a.hi == b.hi && a.lo == b.lo && a.arity == b.arity && a.rank == b.rank;
    }
    friend bool operator!=(const TypeId& a, const TypeId& b) { return !(a == b); }
    friend bool operator<(const TypeId& a, const TypeId& b) {
        if (a.hi != b.hi) return a.hi < b.hi;
        if (a.lo != b.lo) return a.lo < b.lo;
        if (a.arity != b.arity) return a.arity < b.arity;
        return a.rank < b.rank;
    }

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string s(32, '0');
        for (int i = 0; i < 16; ++i) s[15 - i] = digits[(hi >> (4 * i)) & 0xf];
        for (int i = 0; i < 16; ++i) s[31 - i] = digits[(lo >> (4 * i)) & 0xf];
        return s;
    }
};

// Position-sensitive atomic diagram of a tuple: equalities and adjacencies
// for every index pair, plus color membership per position.
struct Diagram {
    int arity = 0;
    std::vector<bool> eq;        // pair (i,j), i<j, row-major
    std::vector<bool> adjacent;  // same indexing
    std::vector<std::vector<bool>> colors;  // [position][color]

    static int pair_index(int i, int j, int arity) {
        // i < j
        return i * arity - i * (i + 1) / 2 + (j - i - 1);
    }

    friend bool operator==(const Diagram& a, const Diagram& b) {
        return a.arity == b.arity && a.eq == b.eq && a.adjacent == b.adjacent && a.colors == b.colors;
    }
};

inline Diagram compute_diagram(const ColoredGraph& g, const VertexTuple& tuple) {
    Diagram d;
    d.arity = static_cast<int>(tuple.size());
    int pairs = d.arity * (d.arity - 1) / 2;
    d.eq.assign(pairs, false);
    d.adjacent.assign(pairs, false);
    d.colors.assign(d.arity, std::vector<bool>(g.vocab.size(), false));
    for (int i = 0; i < d.arity; ++i) {
        require_input(tuple[i] >= 0 && tuple[i] < g.n, "compute_diagram: vertex out of range");
        for (int c = 0; c < g.vocab.size(); ++c) d.colors[i][c] = g.color[c][tuple[i]];
        for (int j = i + 1; j < d.arity; ++j) {
            int p = Diagram::pair_index(i, j, d.arity);
            d.eq[p] = tuple[i] == tuple[j];
            d.adjacent[p] = g.has_edge(tuple[i], tuple[j]);
        }
    }
    return d;
}

struct TypeObj;
using TypePtr = std::shared_ptr<const TypeObj>;

// Rank-q type of a pointed graph: the atomic diagram of the tuple plus, for
// q > 0, the set of rank-(q-1) types of all one-vertex extensions.
struct TypeObj {
    Diagram diagram;
    std::vector<TypePtr> children;  // sorted by id, deduplicated
    TypeId id;
    int rank = 0;
};

namespace internal {

inline std::uint64_t vocab_fingerprint(const Vocabulary& vocab) {
    std::string joined;
    for (const auto& name : vocab.colors) {
        joined += name;
        joined += '\x1f';
    }
    return fnv1a64(joined);
}

inline TypeId fingerprint_type(const Diagram& d, const std::vector<TypePtr>& children, int rank,
                               std::uint64_t vocab_fp) {
    std::string bytes;
    bytes.reserve(64 + d.eq.size() * 2 + children.size() * 16);
    bytes += 'T';
    auto put_u64 = [&bytes](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes += static_cast<char>((v >> (8 * i)) & 0xff);
    };
    put_u64(static_cast<std::uint64_t>(rank));
    put_u64(static_cast<std::uint64_t>(d.arity));
    put_u64(vocab_fp);
    for (bool b : d.eq) bytes += b ? '1' : '0';
    bytes += '|';
    for (bool b : d.adjacent) bytes += b ? '1' : '0';
    bytes += '|';
    for (const auto& row : d.colors) {
        for (bool b : row) bytes += b ? '1' : '0';
        bytes += ';';
    }
    bytes += '|';
    for (const TypePtr& c : children) {
        put_u64(c->id.hi);
        put_u64(c->id.lo);
    }
    TypeId id;
    id.hi = fnv1a64(bytes.data(), bytes.size(), 0xcbf29ce484222325ULL);
    id.lo = fnv1a64(bytes.data(), bytes.size(), 0x84222325cbf29ce4ULL);
    id.arity = static_cast<std::uint16_t>(d.arity);
    id.rank = static_cast<std::uint16_t>(rank);
    return id;
}

}  // namespace internal

inline TypePtr rank_type_obj(const ColoredGraph& g, const VertexTuple& tuple, int q) {
    require_input(q >= 0, "rank_type: negative rank");
    auto obj = std::make_shared<TypeObj>();
    obj->rank = q;
    obj->diagram = compute_diagram(g, tuple);
    if (q > 0) {
        VertexTuple ext = tuple;
        ext.push_back(0);
        std::vector<TypePtr> kids;
        kids.reserve(g.n);
        for (int a = 0; a < g.n; ++a) {
            ext.back() = a;
            kids.push_back(rank_type_obj(g, ext, q - 1));
        }
        std::sort(kids.begin(), kids.end(), [](const TypePtr& x, const TypePtr& y) { return x->id < y->id; });
        kids.erase(std::unique(kids.begin(), kids.end(),
                               [](const TypePtr& x, const TypePtr& y) { return x->id == y->id; }),
                   kids.end());
        obj->children = std::move(kids);
    }
    obj->id = internal::fingerprint_type(obj->diagram, obj->children, q,
                                         internal::vocab_fingerprint(g.vocab));
    return obj;
}

inline TypeId rank_type(const ColoredGraph& g, const VertexTuple& tuple, int q) {
    return rank_type_obj(g, tuple, q)->id;
}

// Local (q,r)-type: the rank-q type of the r-ball around the tuple, pointed
// at the tuple.
inline TypePtr local_type_obj(const ColoredGraph& g, const VertexTuple& tuple, int q, int r) {
    require_input(!tuple.empty(), "local_type: empty tuple");
    InducedSubgraph sub = induced_subgraph(g, ball(g, tuple, r));
    VertexTuple mapped;
    mapped.reserve(tuple.size());
    for (int v : tuple) {
        require_input(v >= 0 && v < g.n, "local_type: vertex out of range");
        mapped.push_back(sub.to_new[v]);
    }
    return rank_type_obj(sub.graph, mapped, q);
}

inline TypeId local_type(const ColoredGraph& g, const VertexTuple& tuple, int q, int r) {
    return local_type_obj(g, tuple, q, r)->id;
}

inline TypePtr local_type_obj(const ColoredGraph& g, const VertexTuple& tuple, TypeContext ctx) {
    return local_type_obj(g, tuple, ctx.q, ctx.r);
}

inline TypeId local_type(const ColoredGraph& g, const VertexTuple& tuple, TypeContext ctx) {
    return local_type(g, tuple, ctx.q, ctx.r);
}

// dist(u,v) <= d as a formula; quantifier rank is ceil(log2 d) via the
// doubling split d = ceil(d/2) + floor(d/2). aux_z supplies indices for the
// midpoint variables.
inline FormulaPtr mk_dist_le(Var u, Var v, int d, int& aux_z) {
    require_input(d >= 0, "mk_dist_le: negative distance");
    if (d == 0) return mk_eq(u, v);
    if (d == 1) return mk_or(mk_eq(u, v), mk_edge(u, v));
    int h = (d + 1) / 2;
    Var mid = var_z(aux_z++);
    FormulaPtr left = mk_dist_le(u, mid, h, aux_z);
    FormulaPtr right = mk_dist_le(mid, v, d - h, aux_z);
    return mk_exists(mid, mk_and(std::move(left), std::move(right)));
}

inline int dist_rank(int r) {
    int q = 0;
    int span = 1;
    while (span < r) { span *= 2; ++q; }
    return q;  // ceil(log2 r) for r >= 1, and 0 for r <= 1
}

namespace internal {

struct RealizeState {
    std::vector<Var> base_vars;  // the k+L free variables
    int r = 0;
    int next_aux = 0;
    std::map<int, FormulaPtr> guard_cache;  // level -> "z_level within r of base tuple"

    FormulaPtr guard(int level) {
        auto it = guard_cache.find(level);
        if (it != guard_cache.end()) return it->second;
        Var zv = var_z(level);
        std::vector<FormulaPtr> parts;
        parts.reserve(base_vars.size());
        for (const Var& b : base_vars) parts.push_back(mk_dist_le(zv, b, r, next_aux));
        FormulaPtr g = mk_or_all(parts);
        guard_cache.emplace(level, g);
        return g;
    }
};

inline FormulaPtr diagram_formula(const Diagram& d, const std::vector<Var>& vars,
                                  const Vocabulary& vocab) {
    std::vector<FormulaPtr> lits;
    for (int i = 0; i < d.arity; ++i)
        for (int j = i + 1; j < d.arity; ++j) {
            int p = Diagram::pair_index(i, j, d.arity);
            FormulaPtr eq = mk_eq(vars[i], vars[j]);
            lits.push_back(d.eq[p] ? eq : mk_not(eq));
            FormulaPtr ed = mk_edge(vars[i], vars[j]);
            lits.push_back(d.adjacent[p] ? ed : mk_not(ed));
        }
    for (int i = 0; i < d.arity; ++i)
        for (int c = 0; c < vocab.size(); ++c) {
            FormulaPtr col = mk_color(vocab.colors[c], vars[i]);
            lits.push_back(d.colors[i][c] ? col : mk_not(col));
        }
    return mk_and_all(lits);
}

inline FormulaPtr hintikka(const TypeObj& t, std::vector<Var>& vars, int level,
                           RealizeState& st, const Vocabulary& vocab) {
    FormulaPtr diag = diagram_formula(t.diagram, vars, vocab);
    if (t.rank == 0) return diag;

    Var zv = var_z(level);
    FormulaPtr g = st.guard(level);
    std::vector<FormulaPtr> parts{diag};
    std::vector<FormulaPtr> branches;
    vars.push_back(zv);
    for (const TypePtr& child : t.children) {
        FormulaPtr h = hintikka(*child, vars, level + 1, st, vocab);
        parts.push_back(mk_exists(zv, mk_and(g, h)));
        branches.push_back(std::move(h));
    }
    vars.pop_back();
    parts.push_back(mk_forall(zv, mk_implies(g, mk_or_all(branches))));
    return mk_and_all(parts);
}

}  // namespace internal

// Builds a formula over the given base variables that holds on (G, t) exactly
// when the local (q,r)-type of the tuple t assigned to those variables belongs
// to phi_types. Every type must have rank q and arity |base|. The empty set
// realizes as the canonical false formula.
inline FormulaPtr realize_formula_over(const std::vector<TypePtr>& phi_types, TypeContext ctx,
                                       const std::vector<Var>& base, const Vocabulary& vocab) {
    require_input(!base.empty(), "realize_formula: need at least one free variable");
    require_input(ctx.q >= 0 && ctx.r >= 0, "realize_formula: bad context");
    for (const Var& v : base)
        require_input(v.fam != 'z', "realize_formula: base variables must not use the bound family");
    if (phi_types.empty()) return mk_not(mk_eq(base[0], base[0]));

    internal::RealizeState st;
    st.base_vars = base;
    st.r = ctx.r;
    st.next_aux = ctx.q + 1;

    std::vector<FormulaPtr> disjuncts;
    for (const TypePtr& t : phi_types) {
        require_input(t->rank == ctx.q, "realize_formula: type rank does not match context");
        require_input(t->diagram.arity == static_cast<int>(base.size()),
                      "realize_formula: type arity does not match the variable count");
        std::vector<Var> vars = base;
        disjuncts.push_back(internal::hintikka(*t, vars, 1, st, vocab));
    }
    FormulaPtr out = mk_or_all(disjuncts);
    check(out->qr <= ctx.q + dist_rank(ctx.r) + 2,
          "realize_formula: quantifier rank exceeds the q + log r + c0 bound");
    return out;
}

// Convenience layout x1..xk, y1..yL.
inline FormulaPtr realize_formula(const std::vector<TypePtr>& phi_types, TypeContext ctx, int k, int L,
                                  const Vocabulary& vocab) {
    require_input(k >= 1 && L >= 0, "realize_formula: bad arities");
    std::vector<Var> base;
    for (int i = 1; i <= k; ++i) base.push_back(var_x(i));
    for (int j = 1; j <= L; ++j) base.push_back(var_y(j));
    return realize_formula_over(phi_types, ctx, base, vocab);
}

}  // namespace folearn
