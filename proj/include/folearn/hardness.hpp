#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "folearn/check.hpp"
#include "folearn/eval.hpp"
#include "folearn/formula.hpp"
#include "folearn/graph.hpp"
#include "folearn/learners.hpp"

namespace folearn {

// A learning oracle as the model checker sees it: a black box that either
// returns a hypothesis consistent with the labelled tuples or rejects, plus a
// declared bound L on how many parameters a returned hypothesis may use. The
// reduction trusts reject verdicts; accepted hypotheses are re-checked.
struct LearnOracle {
    using LearnFn = std::function<std::optional<Hypothesis>(const ColoredGraph&, const std::vector<VertexTuple>&,
                                                            const std::vector<VertexTuple>&, int, int, int)>;
    using LFn = std::function<int(int, int, int)>;

    LearnFn learn;  // (graph, positives, negatives, k, ell, q) -> hypothesis or nullopt
    LFn L;          // (ell, k, q) -> max parameters a returned hypothesis may use
    std::string name;
};

inline LearnOracle oracle_from_const_l() {
    LearnOracle o;
    o.name = "const-l";
    o.learn = [](const ColoredGraph& g, const std::vector<VertexTuple>& pos, const std::vector<VertexTuple>& neg,
                 int k, int ell, int q) { return learn_const_l(g, make_sample(g, k, pos, neg), ell, q); };
    o.L = [](int ell, int, int) { return ell; };
    return o;
}

// erm_typeset never rejects on its own, so wrap it: a hypothesis is returned
// only when it is consistent, otherwise the call counts as a reject. Zero
// training error is achievable whenever any rule in the class is consistent,
// so the reject verdict is as trustworthy as the exact learner's.
inline LearnOracle oracle_from_erm() {
    LearnOracle o;
    o.name = "erm";
    o.learn = [](const ColoredGraph& g, const std::vector<VertexTuple>& pos, const std::vector<VertexTuple>& neg,
                 int k, int ell, int q) -> std::optional<Hypothesis> {
        ErmResult r = erm_typeset(g, make_sample(g, k, pos, neg), ell, q);
        if (r.error == Rational(0)) return r.hypothesis;
        return std::nullopt;
    };
    o.L = [](int ell, int, int) { return ell; };
    return o;
}

struct McStats {
    long long oracle_calls = 0;
    long long max_calls_per_expansion = 0;  // every expansion makes exactly (n choose 2) calls
    int expansions = 0;                     // existential quantifiers expanded via the oracle
    int max_depth = 0;                      // quantifier expansions on the deepest recursion path
};

namespace internal {

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    // Roots stay minimal in their component, so find() doubles as "least id".
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

inline bool mc_rec(const ColoredGraph& g, const FormulaPtr& f, const LearnOracle& oracle, McStats& stats, int depth) {
    stats.max_depth = std::max(stats.max_depth, depth);
    if (f->qr == 0) return eval(g, f);
    switch (f->kind) {
        case Node::Kind::Not:
            return !mc_rec(g, f->lhs, oracle, stats, depth);
        case Node::Kind::And:
            return mc_rec(g, f->lhs, oracle, stats, depth) && mc_rec(g, f->rhs, oracle, stats, depth);
        case Node::Kind::Or:
            return mc_rec(g, f->lhs, oracle, stats, depth) || mc_rec(g, f->rhs, oracle, stats, depth);
        case Node::Kind::Implies:
            return !mc_rec(g, f->lhs, oracle, stats, depth) || mc_rec(g, f->rhs, oracle, stats, depth);
        case Node::Kind::Forall:
            return !mc_rec(g, mk_exists(f->qvar, mk_not(f->lhs)), oracle, stats, depth);
        case Node::Kind::Exists:
            break;
        default:
            throw InvariantViolation("mc_via_learn_oracle: free atom survived the sentence check");
    }

    const FormulaPtr& body = f->lhs;
    if (g.n == 0) return false;
    bool vacuous = true;
    for (const Var& v : body->free_vars) vacuous &= !(v == f->qvar);
    if (vacuous) return mc_rec(g, body, oracle, stats, depth);

    // Free the witness variable under an instance-family name so candidate
    // vertices can be pinned into it.
    Var x = var_x(1);
    FormulaPtr psi = rename_free(body, {{f->qvar, x}});
    int q_inner = body->qr;

    // One oracle call per unordered vertex pair. The call runs on L+1
    // disjoint copies of the graph with every copy of the pair labelled:
    // a hypothesis with at most L parameters leaves some copy parameter-free,
    // so the parameter budget cannot manufacture consistency for a pair that
    // no parameter-free rank-q_inner formula separates.
    int t = oracle.L(0, 1, q_inner) + 1;
    check(t >= 1, "mc_via_learn_oracle: oracle declared a negative parameter bound");
    ColoredGraph gu = disjoint_copies(g, t);
    auto copies_of = [&](int v) {
        std::vector<VertexTuple> out;
        for (int i = 0; i < t; ++i) out.push_back({v + i * g.n});
        return out;
    };

    Dsu dsu(g.n);
    long long calls_here = 0;
    for (int v = 0; v < g.n; ++v) {
        for (int w = v + 1; w < g.n; ++w) {
            std::vector<VertexTuple> pos = copies_of(w), neg = copies_of(v);
            ++calls_here;
            std::optional<Hypothesis> h = oracle.learn(gu, pos, neg, 1, 0, q_inner);
            if (!h) {
                dsu.unite(v, w);
            } else {
                check(training_error(gu, *h, make_sample(gu, 1, pos, neg)) == Rational(0),
                      "mc_via_learn_oracle: oracle returned an inconsistent hypothesis");
            }
        }
    }
    check(calls_here == (long long)g.n * (g.n - 1) / 2, "mc_via_learn_oracle: pair enumeration miscounted");
    stats.oracle_calls += calls_here;
    stats.max_calls_per_expansion = std::max(stats.max_calls_per_expansion, calls_here);
    ++stats.expansions;

    // A reject certifies the pair is indistinguishable by parameter-free
    // rank-q_inner formulas; connected components extend that along paths.
    // An accept may split a genuinely indistinguishable pair (the oracle can
    // lean on its inflated rank), which only costs extra representatives.
    for (int v = 0; v < g.n; ++v) {
        if (dsu.find(v) != v) continue;
        PinResult pinned = pin_constant(g, psi, x, v);
        if (mc_rec(pinned.graph, pinned.formula, oracle, stats, depth + 1)) return true;
    }
    return false;
}

}  // namespace internal

// Decides g |= f using only the learning oracle above quantifier-free
// evaluation. Each existential level partitions the vertices into classes
// with equal rank-(q-1) types via pairwise oracle calls and recurses on one
// pinned representative per class; universals go through their dual.
inline bool mc_via_learn_oracle(const ColoredGraph& g, const FormulaPtr& f, const LearnOracle& oracle,
                                McStats* stats_out = nullptr) {
    require_input(f != nullptr, "mc_via_learn_oracle: missing formula");
    require_input(f->free_vars.empty(), "mc_via_learn_oracle: formula must be a sentence");
    require_input(oracle.learn && oracle.L, "mc_via_learn_oracle: oracle is missing a callable");
    McStats stats;
    bool verdict = internal::mc_rec(g, f, oracle, stats, 0);
    if (stats_out) *stats_out = stats;
    return verdict;
}

}  // namespace folearn
