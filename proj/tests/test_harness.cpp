#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "folearn/experiment.hpp"
#include "folearn/graph_io.hpp"
#include "support/reference.hpp"

using namespace folearn;

namespace {

DatasetSpec base_spec() {
    DatasetSpec s;
    s.family = GraphFamily::Forest;
    s.n = 14;
    s.height_bound = 3;
    s.colors = {{"P", Rational{1, 3}}};
    s.target = "exists z1. E(x1, z1) & P(z1)";
    s.k = 1;
    s.ell = 0;
    s.q = 1;
    s.m_train = 10;
    s.m_test = 10;
    s.noise = Rational{0, 1};
    s.seed = 11;
    return s;
}

std::vector<int> component_roots(const ColoredGraph& g) {
    // Generated forests attach every child to a smaller parent id, so the
    // root of each component is the vertex with no smaller neighbor.
    std::vector<int> roots;
    for (int v = 0; v < g.n; ++v) {
        bool has_smaller = false;
        for (int u : g.adj[v]) has_smaller = has_smaller || u < v;
        if (!has_smaller) roots.push_back(v);
    }
    return roots;
}

}  // namespace

TEST_CASE("graph generation is deterministic per seed") {
    DatasetSpec spec = base_spec();
    spec.n = 24;
    std::string first = save_graph_string(generate_graph(spec));
    std::string second = save_graph_string(generate_graph(spec));
    CHECK(first == second);

    spec.seed = 12;
    CHECK(save_graph_string(generate_graph(spec)) != first);
}

TEST_CASE("forest family respects the height bound") {
    DatasetSpec spec = base_spec();
    spec.n = 20;
    spec.height_bound = 2;
    ColoredGraph g = generate_graph(spec);
    REQUIRE(g.n == 20);
    REQUIRE(internal::forest_check(g));

    std::vector<int> dist = ref::distances(g, component_roots(g));
    for (int v = 0; v < g.n; ++v) {
        REQUIRE(dist[v] >= 0);
        REQUIRE(dist[v] <= 2);
    }

    spec.height_bound = 0;
    CHECK(generate_graph(spec).edge_count() == 0);
    spec.height_bound = -1;
    CHECK_THROWS_AS(generate_graph(spec), std::invalid_argument);
}

TEST_CASE("caterpillar family grows legs off a spine") {
    DatasetSpec spec = base_spec();
    spec.family = GraphFamily::Caterpillar;
    spec.n = 10;
    spec.spine = 4;
    spec.colors.clear();
    ColoredGraph g = generate_graph(spec);

    REQUIRE(g.n == 10);
    REQUIRE(internal::forest_check(g));
    for (int v = 1; v < 4; ++v) CHECK(g.has_edge(v - 1, v));
    for (int v = 4; v < 10; ++v) {
        REQUIRE(g.adj[v].size() == 1);
        CHECK(g.adj[v][0] < 4);
    }
}

TEST_CASE("bounded-degree family stays within its cap") {
    DatasetSpec spec = base_spec();
    spec.family = GraphFamily::BoundedDegree;
    spec.n = 16;
    spec.degree_bound = 3;
    spec.edge_density = Rational{1, 2};
    spec.colors.clear();
    ColoredGraph g = generate_graph(spec);

    REQUIRE(g.n == 16);
    for (int v = 0; v < g.n; ++v) CHECK(static_cast<int>(g.adj[v].size()) <= 3);
    CHECK(g.edge_count() >= 1);

    spec.degree_bound = 0;
    CHECK_THROWS_AS(generate_graph(spec), std::invalid_argument);
    spec.degree_bound = 3;
    spec.edge_density = Rational{3, 2};
    CHECK_THROWS_AS(generate_graph(spec), std::invalid_argument);
}

TEST_CASE("file family loads a saved graph verbatim") {
    DatasetSpec source = base_spec();
    ColoredGraph g = generate_graph(source);
    const char* path = "harness_file_family.graph";
    save_graph_file(path, g);

    DatasetSpec spec;
    spec.family = GraphFamily::File;
    spec.graph_file = path;
    ColoredGraph loaded = generate_graph(spec);
    CHECK(save_graph_string(loaded) == save_graph_string(g));

    spec.colors = {{"P", Rational{1, 2}}};
    CHECK_THROWS_AS(generate_graph(spec), std::invalid_argument);
    std::remove(path);
}

TEST_CASE("target formulas are validated against the dataset spec") {
    DatasetSpec spec = base_spec();
    ColoredGraph g = generate_graph(spec);

    CHECK(target_formula(g, spec) != nullptr);

    DatasetSpec bad = spec;
    bad.q = 0;  // target has one quantifier
    CHECK_THROWS_AS(target_formula(g, bad), std::invalid_argument);

    bad = spec;
    bad.target = "Q(x1)";
    CHECK_THROWS_AS(target_formula(g, bad), std::invalid_argument);

    bad = spec;
    bad.target = "E(x1, x2)";
    CHECK_THROWS_AS(target_formula(g, bad), std::invalid_argument);

    bad = spec;
    bad.target = "E(x1, y1)";
    CHECK_THROWS_AS(target_formula(g, bad), std::invalid_argument);  // ell is 0

    bad = spec;
    bad.target = "E(x1, y1)";
    bad.ell = 1;
    CHECK_THROWS_AS(target_formula(g, bad), std::invalid_argument);  // params missing
    bad.target_params = {g.n + 5};
    CHECK_THROWS_AS(target_formula(g, bad), std::invalid_argument);  // param out of range
    bad.target_params = {0};
    CHECK(target_formula(g, bad) != nullptr);

    bad = spec;
    bad.target = "";
    CHECK_THROWS_AS(target_formula(g, bad), std::invalid_argument);
}

TEST_CASE("noiseless samples match the target labels") {
    DatasetSpec spec = base_spec();
    ColoredGraph g = generate_graph(spec);
    FormulaPtr f = target_formula(g, spec);
    Sample train = generate_sample(g, spec);
    REQUIRE(train.m() == spec.m_train);

    for (const VertexTuple& t : train.positives) {
        Assignment alpha;
        alpha.set(var_x(1), t[0]);
        CHECK(eval(g, f, alpha));
    }
    for (const VertexTuple& t : train.negatives) {
        Assignment alpha;
        alpha.set(var_x(1), t[0]);
        CHECK_FALSE(eval(g, f, alpha));
    }
}

TEST_CASE("full noise flips every label and nothing else") {
    DatasetSpec clean = base_spec();
    DatasetSpec flipped = clean;
    flipped.noise = Rational{1, 1};

    ColoredGraph g = generate_graph(clean);
    Sample s0 = generate_sample(g, clean);
    Sample s1 = generate_sample(g, flipped);

    CHECK(s0.positives == s1.negatives);
    CHECK(s0.negatives == s1.positives);
}

TEST_CASE("sampling handles the dense regime and rejects impossible requests") {
    DatasetSpec spec = base_spec();
    spec.n = 3;
    spec.m_train = 3;
    spec.colors = {{"P", Rational{1, 2}}};
    ColoredGraph g = generate_graph(spec);
    Sample s = generate_sample(g, spec);
    REQUIRE(s.m() == 3);
    std::set<int> seen;
    for (const VertexTuple& t : s.positives) seen.insert(t[0]);
    for (const VertexTuple& t : s.negatives) seen.insert(t[0]);
    CHECK(seen == std::set<int>{0, 1, 2});

    spec.m_train = 4;  // only 3 distinct unary tuples exist
    CHECK_THROWS_AS(generate_sample(g, spec), std::invalid_argument);
}

TEST_CASE("train and test streams draw independently") {
    DatasetSpec spec = base_spec();
    spec.n = 30;
    spec.m_train = 8;
    spec.m_test = 8;
    ColoredGraph g = generate_graph(spec);
    Sample train = generate_sample(g, spec);
    Sample test = generate_test_sample(g, spec);
    REQUIRE(test.m() == 8);
    bool identical = train.positives == test.positives && train.negatives == test.negatives;
    CHECK_FALSE(identical);
}

TEST_CASE("sample json round-trip") {
    DatasetSpec spec = base_spec();
    ColoredGraph g = generate_graph(spec);
    Sample s = generate_sample(g, spec);
    Sample back = json_to_sample(sample_to_json(s), g);
    CHECK(back.k == s.k);
    CHECK(back.positives == s.positives);
    CHECK(back.negatives == s.negatives);

    const char* path = "harness_sample_roundtrip.json";
    save_sample_file(path, s);
    Sample from_file = load_sample_file(path, g);
    CHECK(from_file.positives == s.positives);
    CHECK(from_file.negatives == s.negatives);
    std::remove(path);
}

TEST_CASE("hypothesis json round-trip") {
    DatasetSpec spec = base_spec();
    ColoredGraph g = generate_graph(spec);
    Sample s = generate_sample(g, spec);
    Hypothesis h = erm_typeset(g, s, spec.ell, spec.q).hypothesis;

    Hypothesis back = json_to_hypothesis(hypothesis_to_json(h));
    CHECK(back.k == h.k);
    CHECK(back.params == h.params);
    CHECK(back.rule_param_slots == h.rule_param_slots);
    CHECK(back.positive_types == h.positive_types);
    CHECK(back.ctx.q == h.ctx.q);
    CHECK(back.ctx.r == h.ctx.r);
    CHECK(back.trace == h.trace);
    CHECK(format_formula(back.formula) == format_formula(h.formula));
    for (int v = 0; v < g.n; ++v) CHECK(classify(g, back, {v}) == classify(g, h, {v}));
    CHECK(training_error(g, back, s) == training_error(g, h, s));
}

TEST_CASE("spec json round-trip is exact") {
    DatasetSpec s = base_spec();
    s.family = GraphFamily::BoundedDegree;
    s.edge_density = Rational{2, 7};
    s.target = "E(x1, y1)";
    s.ell = 1;
    s.target_params = {3};
    s.noise = Rational{1, 10};
    s.seed = 99;

    nlohmann::json j = spec_to_json(s);
    DatasetSpec s2 = json_to_spec(j);
    CHECK(spec_to_json(s2) == j);

    // Missing keys keep defaults; bad color entries are rejected.
    DatasetSpec sparse = json_to_spec(nlohmann::json{{"n", 5}});
    CHECK(sparse.n == 5);
    CHECK(sparse.k == 1);
    CHECK_THROWS_AS(json_to_spec(nlohmann::json{{"colors", {{"P", "1/2", "extra"}}}}), std::invalid_argument);
}

TEST_CASE("experiment records are self-consistent") {
    DatasetSpec spec = base_spec();
    ResultRecord rec = run_experiment(spec, "erm", Rational{1, 4});

    REQUIRE(rec.status == "ok");
    CHECK_FALSE(rec.bound_checked);
    REQUIRE(rec.hypothesis.has_value());
    CHECK(rec.train_error == Rational(0));  // noiseless rank-1 target, exact class
    CHECK(rec.erm_lower_bound == rec.train_error);

    // Everything in the record can be recomputed from the spec it names.
    ColoredGraph g = generate_graph(rec.spec);
    Sample train = generate_sample(g, rec.spec);
    Sample test = generate_test_sample(g, rec.spec);
    CHECK(training_error(g, *rec.hypothesis, train) == rec.train_error);
    CHECK(training_error(g, *rec.hypothesis, test) == rec.heldout_error);

    nlohmann::json j = record_to_json(rec);
    CHECK(j.at("status") == "ok");
    CHECK(j.contains("train_error"));
    CHECK(j.contains("hypothesis"));
}

TEST_CASE("nd experiment checks its agnostic bound") {
    DatasetSpec spec = base_spec();
    spec.ell = 0;
    ResultRecord rec = run_experiment(spec, "nd", Rational{1, 4});

    REQUIRE(rec.status == "ok");
    CHECK(rec.bound_checked);
    CHECK(rec.bound_satisfied);
    CHECK(rec.train_error <= rec.erm_lower_bound + rec.epsilon);
    REQUIRE(rec.hypothesis.has_value());
    CHECK(rec.stage_trace == rec.hypothesis->trace);

    // Bit-identical rerun apart from the wall clock.
    ResultRecord again = run_experiment(spec, "nd", Rational{1, 4});
    nlohmann::json a = record_to_json(rec);
    nlohmann::json b = record_to_json(again);
    a.erase("wall_ms");
    b.erase("wall_ms");
    CHECK(a == b);
}

TEST_CASE("exact learners reject unrealizable noisy specs") {
    DatasetSpec spec;
    spec.family = GraphFamily::Forest;
    spec.n = 10;
    spec.height_bound = 0;  // ten isolated, indistinguishable vertices
    spec.target = "x1 = x1";
    spec.k = 1;
    spec.ell = 0;
    spec.q = 0;
    spec.m_train = 10;
    spec.m_test = 10;
    spec.noise = Rational{1, 2};
    spec.seed = 3;

    ResultRecord rec = run_experiment(spec, "const-l", Rational{1, 4});
    REQUIRE(rec.status == "reject");
    CHECK_FALSE(rec.hypothesis.has_value());
    nlohmann::json j = record_to_json(rec);
    CHECK_FALSE(j.contains("train_error"));
    CHECK_FALSE(j.contains("hypothesis"));

    CHECK_THROWS_AS(run_experiment(spec, "magic", Rational{1, 4}), std::invalid_argument);
}

TEST_CASE("json-lines reader and summary aggregation") {
    std::string lines =
        "{\"status\":\"ok\",\"train_error\":\"1/4\",\"heldout_error\":\"1/2\"}\n"
        "\n"
        "  \t\n"
        "{\"status\":\"ok\",\"train_error\":\"0/1\",\"heldout_error\":\"0/1\","
        "\"bound_checked\":true,\"bound_satisfied\":true}\n"
        "{\"status\":\"reject\"}\n";
    std::istringstream in(lines);
    std::vector<nlohmann::json> records = read_json_lines(in);
    REQUIRE(records.size() == 3);

    Summary s = summarize_records(records);
    CHECK(s.total == 3);
    CHECK(s.ok == 2);
    CHECK(s.rejected == 1);
    CHECK(s.bound_checked == 1);
    CHECK(s.bound_satisfied == 1);
    CHECK(s.mean_train == 0.125);
    CHECK(s.mean_heldout == 0.25);

    std::string line = summary_line(s);
    CHECK(line.find("records=3") != std::string::npos);
    CHECK(line.find("ok=2") != std::string::npos);
    CHECK(line.find("bound_satisfied=1") != std::string::npos);

    std::istringstream bad("{\"status\":\"ok\"}\nnot json\n");
    try {
        read_json_lines(bad);
        FAIL("expected a parse failure");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}
