#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "folearn/learners.hpp"
#include "folearn/splitter.hpp"

namespace folearn {

struct NdConfig {
    int k = 1;
    int ell = 1;
    int q = 0;
    Rational epsilon{1, 4};
    long long stage_budget = 20000;  // stage nodes explored over all parameter-set guesses
};

struct NdDerived {
    int r = 0;       // locality radius for the type context
    int R = 0;       // splitter game radius, 3^{ell-1} * (k+2)(2r+1)
    int s = 0;       // game length the strategy promises at radius R
    int L = 0;       // final parameter count ell * s
    int Q_impl = 0;  // quantifier rank ceiling of the emitted formula
};

inline int cover_base_radius(int k, int r) { return (k + 2) * (2 * r + 1); }

// Splitter game radius implied by a config: enough room for ell-1 rounds of
// Vitali cover growth on top of the base covering radius.
inline int nd_game_radius(const NdConfig& cfg) {
    require_input(cfg.k >= 1 && cfg.ell >= 0 && cfg.q >= 0, "nd_game_radius: bad hyperparameters");
    long long radius = cover_base_radius(cfg.k, gaifman_radius(cfg.q));
    for (int i = 1; i < cfg.ell; ++i) radius *= 3;
    require_input(radius <= 1'000'000, "nd_game_radius: game radius overflows the practical range");
    return static_cast<int>(radius);
}

inline NdDerived derive_nd(const NdConfig& cfg, const ColoredGraph& g, Strategy& strategy) {
    require_input(cfg.k >= 1 && cfg.ell >= 0 && cfg.q >= 0, "derive_nd: bad hyperparameters");
    require_input(Rational(0) < cfg.epsilon, "derive_nd: epsilon must be positive");
    NdDerived d;
    d.r = gaifman_radius(cfg.q);
    d.R = nd_game_radius(cfg);
    d.s = strategy.declared_depth(g, d.R);
    d.L = cfg.ell * d.s;
    d.Q_impl = cfg.q + dist_rank(d.R) + 2;
    return d;
}

// One training tuple inside a stage graph. origin indexes the example list of
// the previous stage (for stage 0, the example's own position).
struct StageExample {
    VertexTuple tuple;
    bool positive = false;
    int origin = -1;
};

// conflicts pairs a positive example index with a negative one whose local
// types coincide; critical lists every index involved in some conflict;
// affected[w] lists the critical indices whose tuple has w within 2r+1.
struct ConflictReport {
    std::vector<std::pair<int, int>> conflicts;
    std::vector<int> critical;
    std::map<int, std::vector<int>> affected;
};

inline ConflictReport compute_conflicts(const ColoredGraph& g, const std::vector<StageExample>& examples,
                                        TypeContext ctx) {
    std::map<TypeId, std::pair<std::vector<int>, std::vector<int>>> groups;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        auto& slot = groups[local_type(g, examples[i].tuple, ctx)];
        (examples[i].positive ? slot.first : slot.second).push_back(static_cast<int>(i));
    }
    ConflictReport rep;
    std::set<int> crit;
    for (const auto& [id, sides] : groups)
        for (int p : sides.first)
            for (int n : sides.second) {
                rep.conflicts.emplace_back(p, n);
                crit.insert(p);
                crit.insert(n);
            }
    rep.critical.assign(crit.begin(), crit.end());
    int reach = 2 * ctx.r + 1;
    for (int idx : rep.critical)
        for (int w : ball(g, examples[idx].tuple, reach)) rep.affected[w].push_back(idx);
    return rep;
}

inline ConflictReport compute_conflicts(const ColoredGraph& g, const Sample& sample, int q, int r) {
    std::vector<StageExample> examples;
    for (const VertexTuple& t : sample.positives)
        examples.push_back({t, true, static_cast<int>(examples.size())});
    for (const VertexTuple& t : sample.negatives)
        examples.push_back({t, false, static_cast<int>(examples.size())});
    return compute_conflicts(g, examples, TypeContext{q, r});
}

// Greedy high-impact vertex selection: picks vertices pairwise more than
// 4r+2 apart, each maximizing how many critical tuples it can still affect,
// until the kls/eps cap, exhaustion, or only zero-impact candidates remain.
// gamma_original is the critical count of the original graph; the guarantee
// asserted below divides by it, not by the current stage's count.
inline std::vector<int> select_X(const ColoredGraph& g, const ConflictReport& rep, long long gamma_original,
                                 Rational epsilon, int k, int ell, int s, int r) {
    if (rep.critical.empty()) return {};
    require_input(gamma_original >= 1 && ell >= 1 && s >= 1, "select_X: bad bounds");

    auto weight = [&](int u) -> long long {
        auto it = rep.affected.find(u);
        return it == rep.affected.end() ? 0 : static_cast<long long>(it->second.size());
    };
    long long cap = floor_rational(Rational(static_cast<long long>(k) * ell * s) / epsilon);

    std::vector<int> X;
    std::vector<long long> min_dist(g.n, -1);  // -1 stands for infinity
    while (static_cast<long long>(X.size()) < cap) {
        int pick = -1;
        long long pick_weight = 0;
        for (int u = 0; u < g.n; ++u) {
            if (min_dist[u] >= 0 && min_dist[u] <= 4 * r + 2) continue;
            long long wu = weight(u);
            if (wu > pick_weight) { pick = u; pick_weight = wu; }
        }
        if (pick < 0) break;  // exhausted or only zero-impact candidates left
        X.push_back(pick);
        std::vector<int> d = bfs_distances(g, VertexTuple{pick});
        for (int u = 0; u < g.n; ++u)
            if (d[u] >= 0 && (min_dist[u] < 0 || d[u] < min_dist[u])) min_dist[u] = d[u];
    }

    check(static_cast<long long>(X.size()) * epsilon.num <=
              static_cast<long long>(k) * ell * s * epsilon.den,
          "select_X: size bound |X| <= kls/eps violated");
    for (int u = 0; u < g.n; ++u) {
        if (min_dist[u] >= 0 && min_dist[u] <= 4 * r + 2) continue;
        check(weight(u) * ell * s * epsilon.den < epsilon.num * gamma_original,
              "select_X: a far vertex still affects an eps/(ls) share of critical tuples");
    }
    return X;
}

struct StageState {
    int index = 0;
    ColoredGraph graph;
    std::vector<int> to_origin;  // stage vertex -> original vertex, -1 for fresh
    std::vector<StageExample> examples;
};

struct ProjectionOutcome {
    ColoredGraph graph;
    std::vector<int> to_prev;    // new vertex -> previous stage vertex, -1 for fresh
    std::vector<int> to_origin;  // new vertex -> original vertex, -1 for fresh
    std::vector<StageExample> examples;
    int region_size = 0;
    int fresh_isolated = 0;
    int carried_isolated = 0;
    std::string trace;
};

namespace internal {

inline std::string join_ids(const std::vector<int>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(ids[i]);
    }
    return out;
}

}  // namespace internal

// One round of graph surgery. The new graph is the disjoint union of the
// induced cover balls with the splitter answers cut out, plus every isolated
// vertex of the old graph, plus fresh isolated type representatives. Fresh
// colors record old distances to Y (D), old neighborhoods of the answers (C),
// the answers themselves (B), and replaced component types (A), so later
// stages lose no information the final rule needs.
inline ProjectionOutcome project_stage(const StageState& state, const ConflictReport& report,
                                       const std::vector<int>& Y, const CoverResult& cover,
                                       const std::vector<int>& answers, int k, int q, int r,
                                       int game_radius, int rounds_left) {
    const ColoredGraph& gi = state.graph;
    require_input(!Y.empty() && !cover.Z.empty(), "project_stage: empty parameter guess");
    require_input(answers.size() == cover.Z.size(), "project_stage: one answer per cover center required");
    TypeContext ctx{q, r};

    // Region: the union of the pairwise-disjoint cover balls.
    std::vector<int> piece(gi.n, -1);
    std::vector<int> region;
    for (std::size_t j = 0; j < cover.Z.size(); ++j) {
        std::vector<int> b = ball(gi, cover.Z[j], cover.R);
        check(std::binary_search(b.begin(), b.end(), answers[j]),
              "project_stage: splitter answer lies outside its cover ball");
        for (int v : b) {
            check(piece[v] < 0, "project_stage: cover balls overlap");
            piece[v] = static_cast<int>(j);
            region.push_back(v);
        }
    }
    std::sort(region.begin(), region.end());

    std::vector<bool> is_answer(gi.n, false);
    for (int w : answers) is_answer[w] = true;

    std::vector<int> kept_old = region;
    int carried = 0;
    for (int v = 0; v < gi.n; ++v)
        if (gi.is_isolated(v) && piece[v] < 0) {
            kept_old.push_back(v);
            ++carried;
        }
    std::sort(kept_old.begin(), kept_old.end());

    std::vector<int> to_new(gi.n, -1);
    for (std::size_t i = 0; i < kept_old.size(); ++i) to_new[kept_old[i]] = static_cast<int>(i);

    std::vector<std::pair<int, int>> edges;
    for (int u : region) {
        if (is_answer[u]) continue;
        for (int w : gi.adj[u])
            if (w > u && piece[w] == piece[u] && !is_answer[w]) edges.emplace_back(to_new[u], to_new[w]);
    }

    // Old colors carried over, then the fresh stage colors.
    Vocabulary vocab = gi.vocab;
    std::vector<std::vector<int>> members(vocab.size());
    for (int v : kept_old)
        for (int c = 0; c < gi.vocab.size(); ++c)
            if (gi.color[c][v]) members[c].push_back(to_new[v]);

    std::string stage_tag = std::to_string(state.index);
    int base_radius = cover_base_radius(k, r);
    for (std::size_t j = 0; j < Y.size(); ++j) {
        std::vector<int> d = bfs_distances(gi, VertexTuple{Y[j]});
        for (int dist = 0; dist <= base_radius; ++dist) {
            vocab.colors.push_back("D" + stage_tag + "_" + std::to_string(j + 1) + "_" + std::to_string(dist));
            std::vector<int> set;
            for (int v : kept_old)
                if (d[v] == dist) set.push_back(to_new[v]);
            members.push_back(std::move(set));
        }
    }
    for (std::size_t j = 0; j < answers.size(); ++j) {
        std::vector<int> set;
        if (to_new[answers[j]] >= 0) set.push_back(to_new[answers[j]]);
        for (int u : gi.adj[answers[j]])
            if (to_new[u] >= 0) set.push_back(to_new[u]);
        std::sort(set.begin(), set.end());
        vocab.colors.push_back("C" + stage_tag + "_" + std::to_string(j + 1));
        members.push_back(std::move(set));
        vocab.colors.push_back("B" + stage_tag + "_" + std::to_string(j + 1));
        members.push_back({to_new[answers[j]]});
    }

    // Example projection. Components of each critical tuple are kept verbatim
    // when they touch the 6r+3 ball of Y and otherwise collapse to a fresh
    // isolated vertex whose color names their local type.
    DistanceOracle dist(gi);
    std::vector<bool> near_y(gi.n, false);
    for (int v : ball(gi, Y, 6 * r + 3)) near_y[v] = true;

    int next_vertex = static_cast<int>(kept_old.size());
    std::map<std::pair<std::vector<int>, TypeId>, int> type_vertex;
    std::vector<StageExample> projected;

    for (int e : report.critical) {
        const StageExample& ex = state.examples[e];
        bool touches = false;
        for (int v : ex.tuple) touches = touches || near_y[v];
        if (!touches) continue;

        // Components over tuple positions: close entries (distance at most
        // 2r+1, including equal entries) travel together.
        std::vector<int> comp(k, -1);
        int comps = 0;
        for (int a = 0; a < k; ++a) {
            if (comp[a] >= 0) continue;
            comp[a] = comps;
            std::vector<int> stack{a};
            while (!stack.empty()) {
                int b = stack.back();
                stack.pop_back();
                for (int c2 = 0; c2 < k; ++c2) {
                    if (comp[c2] >= 0) continue;
                    int d = dist.dist(ex.tuple[b], ex.tuple[c2]);
                    if (d >= 0 && d <= 2 * r + 1) {
                        comp[c2] = comps;
                        stack.push_back(c2);
                    }
                }
            }
            ++comps;
        }

        VertexTuple out(k, -1);
        for (int c2 = 0; c2 < comps; ++c2) {
            std::vector<int> positions;
            for (int a = 0; a < k; ++a)
                if (comp[a] == c2) positions.push_back(a);
            bool keep = false;
            for (int a : positions) keep = keep || near_y[ex.tuple[a]];
            if (keep) {
                for (int a : positions) {
                    check(piece[ex.tuple[a]] >= 0,
                          "project_stage: kept component vertex escapes the cover region");
                    out[a] = to_new[ex.tuple[a]];
                }
            } else {
                VertexTuple sub;
                for (int a : positions) sub.push_back(ex.tuple[a]);
                TypePtr theta = local_type_obj(gi, sub, ctx);
                auto key = std::make_pair(positions, theta->id);
                auto it = type_vertex.find(key);
                if (it == type_vertex.end()) {
                    it = type_vertex.emplace(key, next_vertex++).first;
                    std::string iname;
                    for (std::size_t p = 0; p < positions.size(); ++p)
                        iname += (p ? "." : "") + std::to_string(positions[p]);
                    vocab.colors.push_back("A" + stage_tag + "_" + iname + "_" + theta->id.hex());
                    members.push_back({it->second});
                }
                for (int a : positions) out[a] = it->second;
            }
        }
        projected.push_back({out, ex.positive, e});
    }

    ProjectionOutcome outcome;
    outcome.region_size = static_cast<int>(region.size());
    outcome.carried_isolated = carried;
    outcome.fresh_isolated = static_cast<int>(type_vertex.size());
    outcome.graph = build_graph(next_vertex, edges, vocab, members);
    outcome.to_prev.assign(next_vertex, -1);
    outcome.to_origin.assign(next_vertex, -1);
    for (int v : kept_old) {
        outcome.to_prev[to_new[v]] = v;
        outcome.to_origin[to_new[v]] = state.to_origin[v];
    }
    outcome.examples = std::move(projected);

    // Vertex decomposition: cover region, carried old isolated vertices, and
    // fresh type vertices partition the new graph.
    check(outcome.graph.n == outcome.region_size + outcome.carried_isolated + outcome.fresh_isolated,
          "project_stage: vertex decomposition is not a partition");
    for (const auto& [u, v] : edges) {
        int pu = outcome.to_prev[u], pv = outcome.to_prev[v];
        check(pu >= 0 && pv >= 0 && gi.has_edge(pu, pv), "project_stage: edge not inherited from the old graph");
    }

    // No new conflicts: a conflicting projected pair must come from a
    // conflicting pair.
    {
        std::set<std::pair<int, int>> old_pairs(report.conflicts.begin(), report.conflicts.end());
        ConflictReport next = compute_conflicts(outcome.graph, outcome.examples, ctx);
        for (const auto& [p, n] : next.conflicts)
            check(old_pairs.count({outcome.examples[p].origin, outcome.examples[n].origin}) == 1,
                  "project_stage: projection created a conflict");
    }

    // Splitter must still win the shortened game on the new graph; checked
    // exhaustively while the graph is small enough. A zero-round game is only
    // winnable on an empty arena, and the carried isolated vertices persist,
    // so the last projection is exempt.
    if (outcome.graph.n <= 15 && rounds_left >= 1) {
        std::optional<bool> wins = minimax_wins_within(outcome.graph, game_radius, rounds_left, 200'000);
        if (wins.has_value())
            check(*wins, "project_stage: splitter lost the shortened game on the projected graph");
    }

    std::ostringstream trace;
    trace << "stage " << state.index << ": Y={" << internal::join_ids(Y) << "} Z={"
          << internal::join_ids(cover.Z) << "} R'=" << cover.R << " answers={"
          << internal::join_ids(answers) << "} carried " << outcome.examples.size() << "/"
          << state.examples.size() << " examples";
    outcome.trace = trace.str();
    return outcome;
}

namespace internal {

// Candidate classification rules tried at a leaf of the stage recursion: one
// majority rule per subset of the accumulated parameters at the base radius,
// plus the full tuple at the game radius. Majority ties resolve to negative.
struct LeafRule {
    TypeContext ctx{0, 0};
    std::vector<int> slots;
};

struct LeafEvaluator {
    const ColoredGraph& g;
    const Sample& sample;
    TypeContext base_ctx;
    TypeContext wide_ctx;
    std::map<TypeId, TypePtr> registry;
    std::map<std::pair<VertexTuple, int>, TypeId> type_cache;

    TypeId type_of(const VertexTuple& full, TypeContext ctx) {
        auto key = std::make_pair(full, ctx.r);
        auto it = type_cache.find(key);
        if (it != type_cache.end()) return it->second;
        TypePtr obj = local_type_obj(g, full, ctx);
        registry.emplace(obj->id, obj);
        type_cache.emplace(key, obj->id);
        return obj->id;
    }

    // Majority rule for one slot choice; returns its mistake count and fills
    // phi with the positive type set.
    long long tally(const VertexTuple& params, const LeafRule& rule, std::vector<TypeId>& phi) {
        std::map<TypeId, std::pair<long long, long long>> counts;
        auto add = [&](const VertexTuple& t, bool positive) {
            VertexTuple full = t;
            for (int slot : rule.slots) full.push_back(params[slot]);
            auto& slot_counts = counts[type_of(full, rule.ctx)];
            (positive ? slot_counts.first : slot_counts.second) += 1;
        };
        for (const VertexTuple& t : sample.positives) add(t, true);
        for (const VertexTuple& t : sample.negatives) add(t, false);
        long long wrong = 0;
        phi.clear();
        for (const auto& [id, c] : counts) {
            if (c.first > c.second) {
                phi.push_back(id);
                wrong += c.second;
            } else {
                wrong += c.first;
            }
        }
        return wrong;
    }
};

inline std::vector<LeafRule> leaf_rules(const VertexTuple& params, TypeContext base_ctx, TypeContext wide_ctx) {
    // Distinct parameter values, first occurrence wins a slot.
    std::vector<int> distinct_slots;
    for (std::size_t i = 0; i < params.size(); ++i) {
        bool seen = false;
        for (int s : distinct_slots) seen = seen || params[s] == params[i];
        if (!seen) distinct_slots.push_back(static_cast<int>(i));
    }
    check(distinct_slots.size() <= 12, "leaf_rules: too many distinct parameters to enumerate");

    std::vector<LeafRule> rules;
    int d = static_cast<int>(distinct_slots.size());
    for (int mask = 0; mask < (1 << d); ++mask) {
        LeafRule rule;
        rule.ctx = base_ctx;
        for (int i = 0; i < d; ++i)
            if (mask & (1 << i)) rule.slots.push_back(distinct_slots[i]);
        rules.push_back(std::move(rule));
    }
    std::sort(rules.begin(), rules.end(), [](const LeafRule& a, const LeafRule& b) {
        if (a.slots.size() != b.slots.size()) return a.slots.size() < b.slots.size();
        return a.slots < b.slots;
    });

    LeafRule wide;
    wide.ctx = wide_ctx;
    for (std::size_t i = 0; i < params.size(); ++i) wide.slots.push_back(static_cast<int>(i));
    rules.push_back(std::move(wide));
    return rules;
}

}  // namespace internal

struct NdRunStats {
    int stage_nodes = 0;
    int leaves = 0;
    int rules_tried = 0;
};

// Agnostic learner driven by the splitter game. Stages localize the search
// for useful parameters: conflicts name the examples a rank-q local rule
// cannot yet separate, X pins down where parameters can still matter, every
// parameter-set guess Y spawns a branch, and the splitter answers for the
// cover of Y become parameters while the projection shrinks the graph for
// the next stage. Leaves of that recursion classify with the best majority
// rule over the accumulated parameters; the overall best rule is returned.
inline Hypothesis learn_nd(const ColoredGraph& g, const Sample& sample, const NdConfig& cfg,
                           Strategy& strategy, NdDerived* derived_out = nullptr,
                           NdRunStats* stats_out = nullptr) {
    require_input(cfg.k == sample.k, "learn_nd: sample arity differs from the configured arity");
    NdDerived d = derive_nd(cfg, g, strategy);
    if (derived_out) *derived_out = d;
    TypeContext base_ctx{cfg.q, d.r};
    TypeContext wide_ctx{cfg.q, d.R};
    NdRunStats stats;

    if (sample.m() == 0 || g.n == 0) {
        Hypothesis h;
        h.k = cfg.k;
        h.params.assign(g.n == 0 ? 0 : d.L, 0);
        h.ctx = base_ctx;
        h.formula = realize_formula({}, base_ctx, cfg.k, static_cast<int>(h.params.size()), g.vocab);
        h.trace.push_back("empty instance: constant negative hypothesis");
        if (stats_out) *stats_out = stats;
        return h;
    }

    std::vector<StageExample> ex0;
    for (const VertexTuple& t : sample.positives)
        ex0.push_back({t, true, static_cast<int>(ex0.size())});
    for (const VertexTuple& t : sample.negatives)
        ex0.push_back({t, false, static_cast<int>(ex0.size())});

    long long gamma_original =
        static_cast<long long>(compute_conflicts(g, ex0, base_ctx).critical.size());

    internal::LeafEvaluator evaluator{g, sample, base_ctx, wide_ctx, {}, {}};
    struct BestRule {
        bool have = false;
        long long wrong = 0;
        VertexTuple params;
        internal::LeafRule rule;
        std::vector<TypeId> phi;
        std::vector<std::string> trace;
    } best;

    auto evaluate_leaf = [&](const VertexTuple& accumulated, const std::vector<std::string>& trace) {
        ++stats.leaves;
        check(static_cast<int>(accumulated.size()) <= d.L, "learn_nd: accumulated more parameters than L");
        VertexTuple params = accumulated;
        params.resize(d.L, 0);
        for (const internal::LeafRule& rule : internal::leaf_rules(params, base_ctx, wide_ctx)) {
            ++stats.rules_tried;
            std::vector<TypeId> phi;
            long long wrong = evaluator.tally(params, rule, phi);
            if (!best.have || wrong < best.wrong) {
                best.have = true;
                best.wrong = wrong;
                best.params = params;
                best.rule = rule;
                best.phi = std::move(phi);
                best.trace = trace;
            }
        }
    };

    // Depth-first over stages; each stage may branch on the guess Y. The
    // empty guess is the leaf where parameter collection stops.
    auto run_stage = [&](auto&& self, const StageState& state, const VertexTuple& accumulated,
                         std::vector<std::string>& trace) -> void {
        if (++stats.stage_nodes > cfg.stage_budget)
            throw BudgetExceeded("learn_nd: stage exploration exceeds the budget");

        ConflictReport report = compute_conflicts(state.graph, state.examples, base_ctx);
        evaluate_leaf(accumulated, trace);
        if (state.index >= d.s || report.conflicts.empty() || cfg.ell == 0) return;

        std::vector<int> X = select_X(state.graph, report, gamma_original, cfg.epsilon, cfg.k,
                                      cfg.ell, d.s, d.r);
        if (X.empty()) return;

        // All parameter-set guesses Y, smallest first, then lexicographic.
        std::vector<std::vector<int>> guesses;
        std::vector<int> pickbuf;
        auto enumerate = [&](auto&& rec, std::size_t from) -> void {
            if (!pickbuf.empty()) guesses.push_back(pickbuf);
            if (static_cast<int>(pickbuf.size()) == cfg.ell) return;
            for (std::size_t i = from; i < X.size(); ++i) {
                pickbuf.push_back(X[i]);
                rec(rec, i + 1);
                pickbuf.pop_back();
            }
        };
        enumerate(enumerate, 0);
        std::sort(guesses.begin(), guesses.end(), [](const auto& a, const auto& b) {
            if (a.size() != b.size()) return a.size() < b.size();
            return a < b;
        });

        std::vector<int> identity(state.graph.n);
        for (int v = 0; v < state.graph.n; ++v) identity[v] = v;

        for (std::vector<int>& Y : guesses) {
            std::sort(Y.begin(), Y.end());
            CoverResult cover = vitali_cover(state.graph, Y, cover_base_radius(cfg.k, d.r));
            check(cover.R <= d.R, "learn_nd: cover radius exceeded the game radius");
            std::vector<int> answers;
            for (int z : cover.Z) answers.push_back(strategy.answer(state.graph, identity, z, cover.R));

            ProjectionOutcome outcome = project_stage(state, report, Y, cover, answers, cfg.k, cfg.q,
                                                      d.r, d.R, d.s - (state.index + 1));

            // Parameters for this stage: the answers padded to ell by
            // repeating the last one, then mapped back to original vertices;
            // fresh vertices cannot serve as parameters and are dropped.
            std::vector<int> padded = answers;
            while (static_cast<int>(padded.size()) < cfg.ell) padded.push_back(padded.back());
            VertexTuple next_accumulated = accumulated;
            for (int w : padded)
                if (state.to_origin[w] >= 0) next_accumulated.push_back(state.to_origin[w]);

            StageState next;
            next.index = state.index + 1;
            next.graph = std::move(outcome.graph);
            next.to_origin = std::move(outcome.to_origin);
            next.examples = std::move(outcome.examples);
            trace.push_back(outcome.trace);
            self(self, next, next_accumulated, trace);
            trace.pop_back();
        }
    };

    StageState initial;
    initial.index = 0;
    initial.graph = g;
    initial.to_origin.resize(g.n);
    for (int v = 0; v < g.n; ++v) initial.to_origin[v] = v;
    initial.examples = std::move(ex0);
    std::vector<std::string> trace;
    run_stage(run_stage, initial, {}, trace);
    check(best.have, "learn_nd: no classification rule was evaluated");

    Hypothesis h;
    h.k = cfg.k;
    h.params = best.params;
    h.rule_param_slots = best.rule.slots;
    h.positive_types = best.phi;
    h.ctx = best.rule.ctx;
    std::vector<Var> base;
    for (int i = 1; i <= cfg.k; ++i) base.push_back(var_x(i));
    for (int slot : best.rule.slots) base.push_back(var_y(slot + 1));
    h.formula = realize_formula_over(internal::lookup_types(best.phi, evaluator.registry), best.rule.ctx,
                                     base, g.vocab);
    h.trace = best.trace;
    h.trace.push_back("rule: radius " + std::to_string(best.rule.ctx.r) + ", " +
                      std::to_string(best.rule.slots.size()) + " of " + std::to_string(d.L) +
                      " parameter slots, " + std::to_string(best.wrong) + "/" +
                      std::to_string(sample.m()) + " training mistakes");
    check(h.formula->qr <= d.Q_impl, "learn_nd: emitted formula exceeds the quantifier rank ceiling");
    if (stats_out) *stats_out = stats;
    return h;
}

}  // namespace folearn
