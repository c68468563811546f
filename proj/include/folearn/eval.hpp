#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "folearn/formula.hpp"
#include "folearn/graph.hpp"

namespace folearn {

// Partial map from variables to vertices.
struct Assignment {
    std::vector<std::pair<Var, int>> entries;

    void set(Var v, int vertex) {
        for (auto& [var, val] : entries)
            if (var == v) { val = vertex; return; }
        entries.emplace_back(v, vertex);
    }
    const int* find(Var v) const {
        for (const auto& [var, val] : entries)
            if (var == v) return &val;
        return nullptr;
    }
};

// Recursive model checker with memoization at quantifier nodes. Memo entries
// are keyed by the node's free-variable values, so shared subformulas hit the
// cache across enclosing contexts. An Evaluator is bound to one graph and one
// formula; reuse it when evaluating many assignments.
class Evaluator {
public:
    Evaluator(const ColoredGraph& g, FormulaPtr root) : g_(&g), root_(std::move(root)) {
        std::unordered_set<const Node*> seen;
        resolve(root_.get(), seen);
        env_.reserve(16);
    }

    bool operator()(const Assignment& alpha) {
        for (const Var& v : root_->free_vars) {
            const int* val = alpha.find(v);
            require_input(val != nullptr, "eval: assignment missing free variable " + v.str());
            require_input(*val >= 0 && *val < g_->n, "eval: vertex out of range for " + v.str());
        }
        env_.clear();
        for (const Var& v : root_->free_vars) env_.emplace_back(v, *alpha.find(v));
        return eval_node(root_.get());
    }

    long long nodes_visited() const { return visits_; }

private:
    const ColoredGraph* g_;
    FormulaPtr root_;
    std::vector<std::pair<Var, int>> env_;
    std::unordered_map<const Node*, int> color_index_;
    long long visits_ = 0;

    // Memo per quantifier node. Keys pack the node's free-variable values
    // 16 bits each while they fit; rare wide nodes fall back to a map.
    struct NodeMemo {
        std::unordered_map<std::uint64_t, bool> packed;
        std::map<std::vector<int>, bool> wide;
    };
    std::unordered_map<const Node*, NodeMemo> memo_;

    void resolve(const Node* f, std::unordered_set<const Node*>& seen) {
        if (!seen.insert(f).second) return;
        if (f->kind == Node::Kind::Color) {
            int c = g_->vocab.index_of(f->color_name);
            require_input(c >= 0, "eval: color not in vocabulary: " + f->color_name);
            color_index_[f] = c;
        }
        if (f->lhs) resolve(f->lhs.get(), seen);
        if (f->rhs) resolve(f->rhs.get(), seen);
    }

    int lookup(Var v) const {
        for (auto it = env_.rbegin(); it != env_.rend(); ++it)
            if (it->first == v) return it->second;
        throw InvariantViolation("eval: unbound variable " + v.str());
    }

    bool eval_node(const Node* f) {
        ++visits_;
        switch (f->kind) {
            case Node::Kind::ConstTrue: return true;
            case Node::Kind::ConstFalse: return false;
            case Node::Kind::Edge: return g_->has_edge(lookup(f->a), lookup(f->b));
            case Node::Kind::Eq: return lookup(f->a) == lookup(f->b);
            case Node::Kind::Color: return g_->color[color_index_.at(f)][lookup(f->a)];
            case Node::Kind::Not: return !eval_node(f->lhs.get());
            case Node::Kind::And: return eval_node(f->lhs.get()) && eval_node(f->rhs.get());
            case Node::Kind::Or: return eval_node(f->lhs.get()) || eval_node(f->rhs.get());
            case Node::Kind::Implies: return !eval_node(f->lhs.get()) || eval_node(f->rhs.get());
            case Node::Kind::Exists:
            case Node::Kind::Forall: return eval_quant(f);
        }
        throw InvariantViolation("eval: unknown node kind");
    }

    bool eval_quant(const Node* f) {
        NodeMemo& memo = memo_[f];
        bool packable = f->free_vars.size() <= 4 && g_->n <= (1 << 16);
        std::uint64_t key = 0;
        std::vector<int> wide_key;
        if (packable) {
            for (const Var& v : f->free_vars) key = (key << 16) | static_cast<std::uint64_t>(lookup(v));
            auto it = memo.packed.find(key);
            if (it != memo.packed.end()) return it->second;
        } else {
            wide_key.reserve(f->free_vars.size());
            for (const Var& v : f->free_vars) wide_key.push_back(lookup(v));
            auto it = memo.wide.find(wide_key);
            if (it != memo.wide.end()) return it->second;
        }

        bool exists = f->kind == Node::Kind::Exists;
        bool result = !exists;
        env_.emplace_back(f->qvar, 0);
        for (int v = 0; v < g_->n; ++v) {
            env_.back().second = v;
            if (eval_node(f->lhs.get()) == exists) { result = exists; break; }
        }
        env_.pop_back();

        if (packable) memo.packed.emplace(key, result);
        else memo.wide.emplace(std::move(wide_key), result);
        return result;
    }
};

// One-shot evaluation. Callers with many assignments against a fixed graph
// and formula should hold an Evaluator instead.
inline bool eval(const ColoredGraph& g, const FormulaPtr& f, const Assignment& alpha = {}) {
    Evaluator ev(g, f);
    return ev(alpha);
}

struct PinResult {
    ColoredGraph graph;
    FormulaPtr formula;
    std::string edge_color;  // E_<v> style name actually chosen
    std::string eq_color;
};

namespace internal {

inline FormulaPtr pin_rewrite(const Node* f, Var pv, int vertex, const ColoredGraph& g,
                              const std::string& edge_color, const std::string& eq_color) {
    switch (f->kind) {
        case Node::Kind::ConstTrue: return mk_true();
        case Node::Kind::ConstFalse: return mk_false();
        case Node::Kind::Edge:
            if (f->a == pv && f->b == pv) return mk_false();
            if (f->a == pv) return mk_color(edge_color, f->b);
            if (f->b == pv) return mk_color(edge_color, f->a);
            return mk_edge(f->a, f->b);
        case Node::Kind::Eq:
            if (f->a == pv && f->b == pv) return mk_true();
            if (f->a == pv) return mk_color(eq_color, f->b);
            if (f->b == pv) return mk_color(eq_color, f->a);
            return mk_eq(f->a, f->b);
        case Node::Kind::Color:
            if (f->a == pv) {
                int c = g.vocab.index_of(f->color_name);
                require_input(c >= 0, "pin_constant: color not in vocabulary: " + f->color_name);
                return g.color[c][vertex] ? mk_true() : mk_false();
            }
            return mk_color(f->color_name, f->a);
        case Node::Kind::Not:
            return mk_not(pin_rewrite(f->lhs.get(), pv, vertex, g, edge_color, eq_color));
        case Node::Kind::And:
            return mk_and(pin_rewrite(f->lhs.get(), pv, vertex, g, edge_color, eq_color),
                          pin_rewrite(f->rhs.get(), pv, vertex, g, edge_color, eq_color));
        case Node::Kind::Or:
            return mk_or(pin_rewrite(f->lhs.get(), pv, vertex, g, edge_color, eq_color),
                         pin_rewrite(f->rhs.get(), pv, vertex, g, edge_color, eq_color));
        case Node::Kind::Implies:
            return mk_implies(pin_rewrite(f->lhs.get(), pv, vertex, g, edge_color, eq_color),
                              pin_rewrite(f->rhs.get(), pv, vertex, g, edge_color, eq_color));
        case Node::Kind::Exists:
            return mk_exists(f->qvar, pin_rewrite(f->lhs.get(), pv, vertex, g, edge_color, eq_color));
        case Node::Kind::Forall:
            return mk_forall(f->qvar, pin_rewrite(f->lhs.get(), pv, vertex, g, edge_color, eq_color));
    }
    throw InvariantViolation("pin_rewrite: unknown node kind");
}

inline std::string fresh_color_name(const Vocabulary& vocab, const std::string& base) {
    if (!vocab.contains(base)) return base;
    for (int k = 1;; ++k) {
        std::string candidate = base + "_" + std::to_string(k);
        if (!vocab.contains(candidate)) return candidate;
    }
}

}  // namespace internal

// Eliminates a free variable by pinning it to a concrete vertex: the graph
// gains colors marking v's neighborhood and v itself, and every atom that
// mentioned the variable is rewritten over them. Quantifier rank is
// unchanged, and evaluation agrees with the original under var -> v.
inline PinResult pin_constant(const ColoredGraph& g, const FormulaPtr& f, Var var, int vertex) {
    require_input(vertex >= 0 && vertex < g.n, "pin_constant: vertex out of range");
    require_input(var.fam != 'z', "pin_constant: cannot pin a bound-family variable");
    bool is_free = false;
    for (const Var& v : f->free_vars) is_free |= v == var;
    require_input(is_free, "pin_constant: variable " + var.str() + " is not free in the formula");

    PinResult out;
    out.edge_color = internal::fresh_color_name(g.vocab, "E_" + std::to_string(vertex));
    out.eq_color = internal::fresh_color_name(g.vocab, "Eq_" + std::to_string(vertex));
    std::vector<bool> nbr(g.n, false), self(g.n, false);
    for (int w : g.adj[vertex]) nbr[w] = true;
    self[vertex] = true;
    out.graph = expand_colors(g, {{out.edge_color, nbr}, {out.eq_color, self}});
    out.formula = internal::pin_rewrite(f.get(), var, vertex, g, out.edge_color, out.eq_color);
    check(out.formula->qr <= f->qr, "pin_constant: quantifier rank increased");
    return out;
}

}  // namespace folearn
