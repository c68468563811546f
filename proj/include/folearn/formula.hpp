#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "folearn/check.hpp"

namespace folearn {

// Variable families are fixed by convention: x* instance variables, y*
// parameter variables, z* bound variables. Quantifiers may only bind z*.
struct Var {
    char fam = 'x';
    int idx = 1;

    friend bool operator==(const Var& a, const Var& b) { return a.fam == b.fam && a.idx == b.idx; }
    friend bool operator!=(const Var& a, const Var& b) { return !(a == b); }
    friend bool operator<(const Var& a, const Var& b) {
        if (a.fam != b.fam) return a.fam < b.fam;
        return a.idx < b.idx;
    }
    std::string str() const { return std::string(1, fam) + std::to_string(idx); }
};

inline Var var_x(int i) { return Var{'x', i}; }
inline Var var_y(int i) { return Var{'y', i}; }
inline Var var_z(int i) { return Var{'z', i}; }

struct Node;
using FormulaPtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind {
        ConstTrue, ConstFalse,
        Edge, Color, Eq,
        Not, And, Or, Implies,
        Exists, Forall
    };

    Kind kind;
    Var a, b;                // Edge/Eq operands; Color operand in a
    std::string color_name;  // Color relation name, resolved against a graph at eval time
    FormulaPtr lhs, rhs;     // Not/quantifiers use lhs only
    Var qvar;

    // Caches filled by the builders.
    int qr = 0;
    std::vector<Var> free_vars;  // sorted, deduplicated
};

namespace internal {

inline std::vector<Var> merge_vars(const std::vector<Var>& a, const std::vector<Var>& b) {
    std::vector<Var> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline FormulaPtr finish(std::shared_ptr<Node> n) { return n; }

}  // namespace internal

inline FormulaPtr mk_true() {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::ConstTrue;
    return internal::finish(n);
}

inline FormulaPtr mk_false() {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::ConstFalse;
    return internal::finish(n);
}

inline FormulaPtr mk_edge(Var a, Var b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Edge;
    n->a = a;
    n->b = b;
    n->free_vars = a == b ? std::vector<Var>{a} : (a < b ? std::vector<Var>{a, b} : std::vector<Var>{b, a});
    return internal::finish(n);
}

inline FormulaPtr mk_eq(Var a, Var b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Eq;
    n->a = a;
    n->b = b;
    n->free_vars = a == b ? std::vector<Var>{a} : (a < b ? std::vector<Var>{a, b} : std::vector<Var>{b, a});
    return internal::finish(n);
}

inline FormulaPtr mk_color(const std::string& name, Var v) {
    require_input(!name.empty(), "mk_color: empty color name");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Color;
    n->color_name = name;
    n->a = v;
    n->free_vars = {v};
    return internal::finish(n);
}

inline FormulaPtr mk_not(FormulaPtr f) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Not;
    n->qr = f->qr;
    n->free_vars = f->free_vars;
    n->lhs = std::move(f);
    return internal::finish(n);
}

namespace internal {

inline FormulaPtr mk_binary(Node::Kind kind, FormulaPtr l, FormulaPtr r) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->qr = std::max(l->qr, r->qr);
    n->free_vars = merge_vars(l->free_vars, r->free_vars);
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return finish(n);
}

inline FormulaPtr mk_quant(Node::Kind kind, Var v, FormulaPtr body) {
    require_input(v.fam == 'z', "quantifier must bind a z* variable, got " + v.str());
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->qvar = v;
    n->qr = body->qr + 1;
    n->free_vars = body->free_vars;
    n->free_vars.erase(std::remove(n->free_vars.begin(), n->free_vars.end(), v), n->free_vars.end());
    n->lhs = std::move(body);
    return finish(n);
}

}  // namespace internal

inline FormulaPtr mk_and(FormulaPtr l, FormulaPtr r) { return internal::mk_binary(Node::Kind::And, std::move(l), std::move(r)); }
inline FormulaPtr mk_or(FormulaPtr l, FormulaPtr r) { return internal::mk_binary(Node::Kind::Or, std::move(l), std::move(r)); }
inline FormulaPtr mk_implies(FormulaPtr l, FormulaPtr r) { return internal::mk_binary(Node::Kind::Implies, std::move(l), std::move(r)); }
inline FormulaPtr mk_exists(Var v, FormulaPtr body) { return internal::mk_quant(Node::Kind::Exists, v, std::move(body)); }
inline FormulaPtr mk_forall(Var v, FormulaPtr body) { return internal::mk_quant(Node::Kind::Forall, v, std::move(body)); }

inline FormulaPtr mk_and_all(const std::vector<FormulaPtr>& parts) {
    if (parts.empty()) return mk_true();
    FormulaPtr acc = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) acc = mk_and(acc, parts[i]);
    return acc;
}

inline FormulaPtr mk_or_all(const std::vector<FormulaPtr>& parts) {
    if (parts.empty()) return mk_false();
    FormulaPtr acc = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) acc = mk_or(acc, parts[i]);
    return acc;
}

inline int quantifier_rank(const FormulaPtr& f) { return f->qr; }
inline const std::vector<Var>& free_variables(const FormulaPtr& f) { return f->free_vars; }

// Structural equality (no normalization).
inline bool same_formula(const FormulaPtr& a, const FormulaPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Node::Kind::ConstTrue:
        case Node::Kind::ConstFalse:
            return true;
        case Node::Kind::Edge:
        case Node::Kind::Eq:
            return a->a == b->a && a->b == b->b;
        case Node::Kind::Color:
            return a->color_name == b->color_name && a->a == b->a;
        case Node::Kind::Not:
            return same_formula(a->lhs, b->lhs);
        case Node::Kind::And:
        case Node::Kind::Or:
        case Node::Kind::Implies:
            return same_formula(a->lhs, b->lhs) && same_formula(a->rhs, b->rhs);
        case Node::Kind::Exists:
        case Node::Kind::Forall:
            return a->qvar == b->qvar && same_formula(a->lhs, b->lhs);
    }
    return false;
}

namespace internal {

// Precedence: implies 1, or 2, and 3, not 4, atoms 5. A quantifier body
// swallows everything to its right, so quantifiers print bare only in
// rightmost position.
inline void unparse_rec(const Node* f, int min_prec, bool rightmost, std::string& out) {
    auto parenthesized = [&](const Node* g) {
        out += "(";
        unparse_rec(g, 1, true, out);
        out += ")";
    };
    switch (f->kind) {
        case Node::Kind::ConstTrue: out += "true"; return;
        case Node::Kind::ConstFalse: out += "false"; return;
        case Node::Kind::Edge:
            out += "E(" + f->a.str() + ", " + f->b.str() + ")";
            return;
        case Node::Kind::Color:
            out += f->color_name + "(" + f->a.str() + ")";
            return;
        case Node::Kind::Eq:
            out += f->a.str() + " = " + f->b.str();
            return;
        case Node::Kind::Not:
            out += "!";
            unparse_rec(f->lhs.get(), 4, rightmost, out);
            return;
        case Node::Kind::And:
        case Node::Kind::Or:
        case Node::Kind::Implies: {
            int prec = f->kind == Node::Kind::And ? 3 : f->kind == Node::Kind::Or ? 2 : 1;
            if (prec < min_prec) { parenthesized(f); return; }
            const char* op = f->kind == Node::Kind::And ? " & " : f->kind == Node::Kind::Or ? " | " : " -> ";
            if (f->kind == Node::Kind::Implies) {
                unparse_rec(f->lhs.get(), prec + 1, false, out);
                out += op;
                unparse_rec(f->rhs.get(), prec, rightmost, out);
            } else {
                unparse_rec(f->lhs.get(), prec, false, out);
                out += op;
                unparse_rec(f->rhs.get(), prec + 1, rightmost, out);
            }
            return;
        }
        case Node::Kind::Exists:
        case Node::Kind::Forall: {
            if (!rightmost) { parenthesized(f); return; }
            out += f->kind == Node::Kind::Exists ? "exists " : "forall ";
            out += f->qvar.str() + ". ";
            unparse_rec(f->lhs.get(), 1, true, out);
            return;
        }
    }
}

}  // namespace internal

inline std::string unparse(const FormulaPtr& f) {
    std::string out;
    internal::unparse_rec(f.get(), 1, true, out);
    return out;
}

}  // namespace folearn
