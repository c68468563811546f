#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "folearn/eval.hpp"
#include "folearn/rational.hpp"
#include "folearn/types.hpp"

namespace folearn {

struct Sample {
    int k = 1;
    std::vector<VertexTuple> positives;
    std::vector<VertexTuple> negatives;

    int m() const { return static_cast<int>(positives.size() + negatives.size()); }
};

// Validates arity and vertex range, sorts and deduplicates each side, and
// rejects tuples labeled both ways.
inline Sample make_sample(const ColoredGraph& g, int k, std::vector<VertexTuple> positives,
                          std::vector<VertexTuple> negatives) {
    require_input(k >= 1, "make_sample: arity must be at least 1");
    auto normalize = [&](std::vector<VertexTuple>& side, const char* name) {
        for (const VertexTuple& t : side) {
            require_input(static_cast<int>(t.size()) == k, std::string("make_sample: ") + name + " tuple arity mismatch");
            for (int v : t)
                require_input(v >= 0 && v < g.n, std::string("make_sample: ") + name + " tuple vertex out of range");
        }
        std::sort(side.begin(), side.end());
        side.erase(std::unique(side.begin(), side.end()), side.end());
    };
    normalize(positives, "positive");
    normalize(negatives, "negative");
    for (const VertexTuple& t : positives)
        require_input(!std::binary_search(negatives.begin(), negatives.end(), t),
                      "make_sample: tuple labeled both positive and negative");
    return Sample{k, std::move(positives), std::move(negatives)};
}

// A classifier: v is positive iff the local type of v followed by the chosen
// parameter slots belongs to positive_types. The formula is the same rule
// spelled out over x1..xk, y1..yL; slots it does not use stay unmentioned.
struct Hypothesis {
    int k = 1;
    VertexTuple params;                   // values for y1..yL
    std::vector<int> rule_param_slots;    // 0-based indices into params, ascending
    std::vector<TypeId> positive_types;   // sorted
    TypeContext ctx{0, 0};
    FormulaPtr formula;
    std::vector<std::string> trace;
};

inline VertexTuple rule_tuple(const Hypothesis& h, const VertexTuple& instance) {
    VertexTuple t = instance;
    for (int slot : h.rule_param_slots) {
        check(slot >= 0 && slot < static_cast<int>(h.params.size()), "hypothesis: rule slot out of range");
        t.push_back(h.params[slot]);
    }
    return t;
}

// Classification through the type-set rule (the formula is its certificate;
// tests cross-check the two).
inline bool classify(const ColoredGraph& g, const Hypothesis& h, const VertexTuple& instance) {
    require_input(static_cast<int>(instance.size()) == h.k, "classify: instance arity mismatch");
    TypeId id = local_type(g, rule_tuple(h, instance), h.ctx);
    return std::binary_search(h.positive_types.begin(), h.positive_types.end(), id);
}

// Classification by evaluating the emitted formula; slower, used to validate
// that the certificate matches the rule.
inline bool classify_by_formula(const ColoredGraph& g, const Hypothesis& h, const VertexTuple& instance) {
    require_input(static_cast<int>(instance.size()) == h.k, "classify: instance arity mismatch");
    Assignment alpha;
    for (int i = 0; i < h.k; ++i) alpha.set(var_x(i + 1), instance[i]);
    for (std::size_t j = 0; j < h.params.size(); ++j) alpha.set(var_y(static_cast<int>(j) + 1), h.params[j]);
    return eval(g, h.formula, alpha);
}

inline Rational training_error(const ColoredGraph& g, const Hypothesis& h, const Sample& sample) {
    require_input(sample.k == h.k, "training_error: arity mismatch");
    if (sample.m() == 0) return Rational(0);
    long long wrong = 0;
    for (const VertexTuple& t : sample.positives)
        if (!classify(g, h, t)) ++wrong;
    for (const VertexTuple& t : sample.negatives)
        if (classify(g, h, t)) ++wrong;
    return Rational(wrong, sample.m());
}

namespace internal {

// Ascending-lexicographic enumeration of V^len; callback returns false to stop.
template <typename F>
bool for_each_tuple(int n, int len, F&& fn) {
    VertexTuple t(len, 0);
    if (len == 0) return fn(t);
    if (n == 0) return true;
    while (true) {
        if (!fn(t)) return false;
        int pos = len - 1;
        while (pos >= 0 && t[pos] == n - 1) t[pos--] = 0;
        if (pos < 0) return true;
        ++t[pos];
    }
}

struct TypeTally {
    long long pos = 0;
    long long neg = 0;
};

// Local types of all training tuples extended with params; returns the tally
// per type and remembers one TypeObj per id for later realization.
inline std::map<TypeId, TypeTally> tally_types(const ColoredGraph& g, const Sample& sample,
                                               const VertexTuple& params, TypeContext ctx,
                                               std::map<TypeId, TypePtr>& registry) {
    std::map<TypeId, TypeTally> tally;
    auto add = [&](const VertexTuple& t, bool positive) {
        VertexTuple full = t;
        full.insert(full.end(), params.begin(), params.end());
        TypePtr obj = local_type_obj(g, full, ctx);
        registry.emplace(obj->id, obj);
        TypeTally& slot = tally[obj->id];
        (positive ? slot.pos : slot.neg) += 1;
    };
    for (const VertexTuple& t : sample.positives) add(t, true);
    for (const VertexTuple& t : sample.negatives) add(t, false);
    return tally;
}

inline std::vector<TypePtr> lookup_types(const std::vector<TypeId>& ids,
                                         const std::map<TypeId, TypePtr>& registry) {
    std::vector<TypePtr> out;
    out.reserve(ids.size());
    for (const TypeId& id : ids) {
        auto it = registry.find(id);
        check(it != registry.end(), "type registry lost a realized type");
        out.push_back(it->second);
    }
    return out;
}

inline std::vector<int> all_slots(int ell) {
    std::vector<int> s(ell);
    for (int i = 0; i < ell; ++i) s[i] = i;
    return s;
}

}  // namespace internal

struct ErmResult {
    Hypothesis hypothesis;
    Rational error;
};

// Exhaustive empirical risk minimization over the class of type-set rules
// with ell parameters: for every parameter tuple, classify by majority label
// per local (q, r(q))-type class (ties negative). The minimum found is a
// lower bound certificate: no quantifier-rank-q formula with ell parameters
// does better, because equal local types force equal classification.
inline ErmResult erm_typeset(const ColoredGraph& g, const Sample& sample, int ell, int q,
                             long long budget = 4'000'000) {
    require_input(ell >= 0 && q >= 0, "erm_typeset: bad hyperparameters");
    require_input(g.n >= 1 || ell == 0, "erm_typeset: parameters require a nonempty graph");
    TypeContext ctx{q, gaifman_radius(q)};

    double tuples = std::pow(static_cast<double>(std::max(g.n, 1)), ell);
    if (tuples * std::max(sample.m(), 1) > static_cast<double>(budget))
        throw BudgetExceeded("erm_typeset: parameter enumeration exceeds budget");

    std::map<TypeId, TypePtr> registry;
    bool have_best = false;
    VertexTuple best_params;
    std::vector<TypeId> best_phi;
    long long best_wrong = 0;

    internal::for_each_tuple(g.n, ell, [&](const VertexTuple& params) {
        auto tally = internal::tally_types(g, sample, params, ctx, registry);
        long long wrong = 0;
        std::vector<TypeId> phi;
        for (const auto& [id, counts] : tally) {
            if (counts.pos > counts.neg) {
                phi.push_back(id);
                wrong += counts.neg;
            } else {
                wrong += counts.pos;
            }
        }
        if (!have_best || wrong < best_wrong) {
            have_best = true;
            best_wrong = wrong;
            best_params = params;
            best_phi = std::move(phi);
        }
        return best_wrong > 0 || !have_best ? true : false;  // error 0 cannot improve
    });
    check(have_best, "erm_typeset: enumeration produced no candidate");

    Hypothesis h;
    h.k = sample.k;
    h.params = best_params;
    h.rule_param_slots = internal::all_slots(ell);
    h.positive_types = best_phi;
    h.ctx = ctx;
    h.formula = realize_formula(internal::lookup_types(best_phi, registry), ctx, sample.k, ell, g.vocab);
    Rational error = sample.m() == 0 ? Rational(0) : Rational(best_wrong, sample.m());
    return ErmResult{std::move(h), error};
}

// First consistent type-set hypothesis in ascending parameter order, or
// nothing. Rejecting is sound beyond this class: a consistent quantifier-
// rank-q formula with ell parameters would make the type sets of positives
// and negatives disjoint for its own parameter tuple, so some type-set rule
// would be consistent too.
inline std::optional<Hypothesis> learn_const_l(const ColoredGraph& g, const Sample& sample, int ell, int q,
                                               long long budget = 4'000'000) {
    require_input(ell >= 0 && q >= 0, "learn_const_l: bad hyperparameters");
    require_input(g.n >= 1 || ell == 0, "learn_const_l: parameters require a nonempty graph");
    TypeContext ctx{q, gaifman_radius(q)};

    double tuples = std::pow(static_cast<double>(std::max(g.n, 1)), ell);
    if (tuples * std::max(sample.m(), 1) > static_cast<double>(budget))
        throw BudgetExceeded("learn_const_l: parameter enumeration exceeds budget");

    std::map<TypeId, TypePtr> registry;
    std::optional<Hypothesis> found;
    internal::for_each_tuple(g.n, ell, [&](const VertexTuple& params) {
        auto tally = internal::tally_types(g, sample, params, ctx, registry);
        std::vector<TypeId> phi;
        for (const auto& [id, counts] : tally) {
            if (counts.pos > 0 && counts.neg > 0) return true;  // conflict, next params
            if (counts.pos > 0) phi.push_back(id);
        }
        Hypothesis h;
        h.k = sample.k;
        h.params = params;
        h.rule_param_slots = internal::all_slots(ell);
        h.positive_types = phi;
        h.ctx = ctx;
        h.formula = realize_formula(internal::lookup_types(phi, registry), ctx, sample.k, ell, g.vocab);
        found = std::move(h);
        return false;
    });
    return found;
}

namespace internal {

// Renames free occurrences of x/y variables. Binders only ever introduce
// z-family variables, so fresh z targets cannot be captured.
inline FormulaPtr rename_free(const FormulaPtr& f, const std::vector<std::pair<Var, Var>>& mapping) {
    auto lookup = [&](const Var& v) {
        for (const auto& [from, to] : mapping)
            if (from == v) return to;
        return v;
    };
    switch (f->kind) {
        case Node::Kind::ConstTrue:
        case Node::Kind::ConstFalse:
            return f;
        case Node::Kind::Edge:
            return mk_edge(lookup(f->a), lookup(f->b));
        case Node::Kind::Eq:
            return mk_eq(lookup(f->a), lookup(f->b));
        case Node::Kind::Color:
            return mk_color(f->color_name, lookup(f->a));
        case Node::Kind::Not:
            return mk_not(rename_free(f->lhs, mapping));
        case Node::Kind::And:
            return mk_and(rename_free(f->lhs, mapping), rename_free(f->rhs, mapping));
        case Node::Kind::Or:
            return mk_or(rename_free(f->lhs, mapping), rename_free(f->rhs, mapping));
        case Node::Kind::Implies:
            return mk_implies(rename_free(f->lhs, mapping), rename_free(f->rhs, mapping));
        case Node::Kind::Exists:
        case Node::Kind::Forall: {
            // A binder shadows its own variable: drop it from the mapping.
            std::vector<std::pair<Var, Var>> inner;
            for (const auto& p : mapping)
                if (!(p.first == f->qvar)) inner.push_back(p);
            FormulaPtr body = rename_free(f->lhs, inner);
            return f->kind == Node::Kind::Exists ? mk_exists(f->qvar, std::move(body))
                                                 : mk_forall(f->qvar, std::move(body));
        }
    }
    throw InvariantViolation("rename_free: unknown node kind");
}

inline int max_z_index(const FormulaPtr& f) {
    int best = 0;
    if (f->kind == Node::Kind::Exists || f->kind == Node::Kind::Forall) best = f->qvar.idx;
    for (const Var& v : f->free_vars)
        if (v.fam == 'z') best = std::max(best, v.idx);
    if (f->lhs) best = std::max(best, max_z_index(f->lhs));
    if (f->rhs) best = std::max(best, max_z_index(f->rhs));
    return best;
}

}  // namespace internal

// Prefix-search learner for unary instances. Instead of enumerating all n^ell
// parameter tuples, it fixes parameters one vertex at a time and delegates
// the question "can this prefix still be completed consistently?" to a single
// sentence evaluation on the graph expanded with example colors P+/P- and
// singleton prefix colors S1..Si. Candidate rules are the type sets realized
// by positive examples, deduplicated; the search commits to the first vertex
// that keeps the sentence true, which by its semantics can never dead-end.
inline std::optional<Hypothesis> learn_k1(const ColoredGraph& g, const Sample& sample, int ell, int q,
                                          long long candidate_budget = 256) {
    require_input(sample.k == 1, "learn_k1: only unary instances");
    require_input(ell >= 0 && q >= 0, "learn_k1: bad hyperparameters");
    require_input(g.n >= 1 || ell == 0, "learn_k1: parameters require a nonempty graph");
    for (const std::string& name : {"P_pos", "P_neg"})
        require_input(!g.vocab.contains(name), "learn_k1: color name " + name + " is reserved");
    for (int j = 1; j <= ell; ++j)
        require_input(!g.vocab.contains("S_" + std::to_string(j)), "learn_k1: prefix color name reserved");
    TypeContext ctx{q, gaifman_radius(q)};

    // Candidate rules: for each parameter tuple, the set of types its
    // positives realize. Any consistent type-set rule is consistent with the
    // positive-type set of its own parameters, so this family preserves the
    // accept/reject verdict.
    std::map<TypeId, TypePtr> registry;
    std::vector<std::vector<TypeId>> candidates;
    internal::for_each_tuple(g.n, ell, [&](const VertexTuple& params) {
        std::vector<TypeId> phi;
        for (const VertexTuple& t : sample.positives) {
            VertexTuple full = t;
            full.insert(full.end(), params.begin(), params.end());
            TypePtr obj = local_type_obj(g, full, ctx);
            registry.emplace(obj->id, obj);
            phi.push_back(obj->id);
        }
        std::sort(phi.begin(), phi.end());
        phi.erase(std::unique(phi.begin(), phi.end()), phi.end());
        if (std::find(candidates.begin(), candidates.end(), phi) == candidates.end())
            candidates.push_back(std::move(phi));
        return true;
    });
    if (static_cast<long long>(candidates.size()) > candidate_budget)
        throw BudgetExceeded("learn_k1: candidate family exceeds budget");

    // The graph carrying the sample as colors. Prefix colors start empty and
    // are filled in as parameters commit.
    std::vector<std::pair<std::string, std::vector<bool>>> extra;
    {
        std::vector<bool> pos(g.n, false), neg(g.n, false);
        for (const VertexTuple& t : sample.positives) pos[t[0]] = true;
        for (const VertexTuple& t : sample.negatives) neg[t[0]] = true;
        extra.emplace_back("P_pos", std::move(pos));
        extra.emplace_back("P_neg", std::move(neg));
    }

    for (const std::vector<TypeId>& phi_ids : candidates) {
        FormulaPtr rule = realize_formula(internal::lookup_types(phi_ids, registry), ctx, 1, ell, g.vocab);

        // The sentence skeleton works over fresh z variables: zx plays x and
        // z_{base+j} plays y_j.
        int base = internal::max_z_index(rule) + 1;
        Var zx = var_z(base + ell);
        std::vector<std::pair<Var, Var>> mapping{{var_x(1), zx}};
        for (int j = 1; j <= ell; ++j) mapping.emplace_back(var_y(j), var_z(base + j - 1));
        FormulaPtr body = internal::rename_free(rule, mapping);

        VertexTuple committed;
        bool consistent = true;
        for (int i = 1; i <= ell && consistent; ++i) {
            // phi_i existentially re-binds the committed prefix through its
            // singleton colors, then the outer sentence asks for a consistent
            // completion of the remaining slots.
            FormulaPtr phi_i = body;
            for (int j = i; j >= 1; --j) {
                Var yj = var_z(base + j - 1);
                phi_i = mk_exists(yj, mk_and(mk_color("S_" + std::to_string(j), yj), phi_i));
            }
            FormulaPtr guarded =
                mk_and(mk_implies(mk_color("P_pos", zx), phi_i), mk_implies(mk_color("P_neg", zx), mk_not(phi_i)));
            FormulaPtr sentence = mk_forall(zx, guarded);
            for (int j = ell; j > i; --j) sentence = mk_exists(var_z(base + j - 1), sentence);

            bool found = false;
            for (int w = 0; w < g.n && !found; ++w) {
                auto colors = extra;
                auto singleton = [&](int v) {
                    std::vector<bool> bits(g.n, false);
                    bits[v] = true;
                    return bits;
                };
                for (int j = 1; j < i; ++j)
                    colors.emplace_back("S_" + std::to_string(j), singleton(committed[j - 1]));
                colors.emplace_back("S_" + std::to_string(i), singleton(w));
                ColoredGraph expanded = expand_colors(g, colors);
                if (eval(expanded, sentence)) {
                    committed.push_back(w);
                    found = true;
                }
            }
            if (!found) consistent = false;
        }
        if (!consistent) continue;

        if (ell == 0) {
            FormulaPtr phi0 = internal::rename_free(rule, {{var_x(1), zx}});
            FormulaPtr sentence = mk_forall(
                zx, mk_and(mk_implies(mk_color("P_pos", zx), phi0), mk_implies(mk_color("P_neg", zx), mk_not(phi0))));
            if (!eval(expand_colors(g, extra), sentence)) continue;
        }

        Hypothesis h;
        h.k = 1;
        h.params = committed;
        h.rule_param_slots = internal::all_slots(ell);
        h.positive_types = phi_ids;
        h.ctx = ctx;
        h.formula = rule;
        check(training_error(g, h, sample) == Rational(0),
              "learn_k1: committed parameters are not consistent");
        return h;
    }
    return std::nullopt;
}

}  // namespace folearn
