#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"  // vendored single-header nlohmann::json

#include "folearn/check.hpp"
#include "folearn/generate.hpp"
#include "folearn/graph.hpp"
#include "folearn/learn_nd.hpp"
#include "folearn/learners.hpp"
#include "folearn/parser.hpp"
#include "folearn/rational.hpp"
#include "folearn/splitter.hpp"
#include "folearn/types.hpp"

namespace folearn {

// ---------------------------------------------------------------------------
// JSON encoding. Rationals travel as "num/den" strings to stay exact; 64-bit
// hashes travel as hex strings to dodge JSON number precision.

inline nlohmann::json rational_to_json(const Rational& r) { return r.str(); }

inline Rational json_to_rational(const nlohmann::json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    return parse_rational(j.get<std::string>());
}

namespace internal {

inline std::string u64_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 0; i < 16; ++i) s[15 - i] = digits[(v >> (4 * i)) & 0xf];
    return s;
}

inline std::uint64_t hex_u64(const std::string& s) { return std::stoull(s, nullptr, 16); }

}  // namespace internal

inline nlohmann::json typeid_to_json(const TypeId& t) {
    return {{"hi", internal::u64_hex(t.hi)},
            {"lo", internal::u64_hex(t.lo)},
            {"arity", t.arity},
            {"rank", t.rank}};
}

inline TypeId json_to_typeid(const nlohmann::json& j) {
    TypeId t;
    t.hi = internal::hex_u64(j.at("hi").get<std::string>());
    t.lo = internal::hex_u64(j.at("lo").get<std::string>());
    t.arity = j.at("arity").get<std::uint16_t>();
    t.rank = j.at("rank").get<std::uint16_t>();
    return t;
}

// ---------------------------------------------------------------------------
// Sample round-trip.

inline nlohmann::json sample_to_json(const Sample& s) {
    return {{"k", s.k}, {"positives", s.positives}, {"negatives", s.negatives}};
}

inline Sample json_to_sample(const nlohmann::json& j, const ColoredGraph& g) {
    return make_sample(g, j.at("k").get<int>(), j.at("positives").get<std::vector<VertexTuple>>(),
                       j.at("negatives").get<std::vector<VertexTuple>>());
}

inline void save_sample_file(const std::string& path, const Sample& s) {
    std::ofstream out(path);
    require_input(out.good(), "cannot open sample file for writing: " + path);
    out << sample_to_json(s).dump(2) << "\n";
}

inline Sample load_sample_file(const std::string& path, const ColoredGraph& g) {
    std::ifstream in(path);
    require_input(in.good(), "cannot open sample file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("sample file " + path + ": " + e.what());
    }
    return json_to_sample(j, g);
}

// ---------------------------------------------------------------------------
// Hypothesis round-trip. The formula is stored as text and re-parsed, which
// preserves evaluation behavior exactly (the printer emits the parser's own
// grammar).

inline nlohmann::json hypothesis_to_json(const Hypothesis& h) {
    nlohmann::json types = nlohmann::json::array();
    for (const TypeId& t : h.positive_types) types.push_back(typeid_to_json(t));
    nlohmann::json j{{"k", h.k},
                     {"params", h.params},
                     {"rule_param_slots", h.rule_param_slots},
                     {"positive_types", std::move(types)},
                     {"ctx", {{"q", h.ctx.q}, {"r", h.ctx.r}}},
                     {"trace", h.trace}};
    j["formula"] = h.formula ? nlohmann::json(format_formula(h.formula)) : nlohmann::json();
    return j;
}

inline Hypothesis json_to_hypothesis(const nlohmann::json& j) {
    Hypothesis h;
    h.k = j.at("k").get<int>();
    h.params = j.at("params").get<VertexTuple>();
    h.rule_param_slots = j.at("rule_param_slots").get<std::vector<int>>();
    for (const nlohmann::json& t : j.at("positive_types")) h.positive_types.push_back(json_to_typeid(t));
    std::sort(h.positive_types.begin(), h.positive_types.end());
    h.ctx = TypeContext{j.at("ctx").at("q").get<int>(), j.at("ctx").at("r").get<int>()};
    if (j.contains("formula") && j.at("formula").is_string())
        h.formula = parse_formula(j.at("formula").get<std::string>());
    if (j.contains("trace")) h.trace = j.at("trace").get<std::vector<std::string>>();
    return h;
}

inline void save_hypothesis_file(const std::string& path, const Hypothesis& h) {
    std::ofstream out(path);
    require_input(out.good(), "cannot open hypothesis file for writing: " + path);
    out << hypothesis_to_json(h).dump(2) << "\n";
}

inline Hypothesis load_hypothesis_file(const std::string& path) {
    std::ifstream in(path);
    require_input(in.good(), "cannot open hypothesis file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("hypothesis file " + path + ": " + e.what());
    }
    return json_to_hypothesis(j);
}

// ---------------------------------------------------------------------------
// Dataset spec round-trip. Color densities are an ordered list of pairs so
// vocabulary order, and with it every downstream tie-break, is reproducible.

inline nlohmann::json spec_to_json(const DatasetSpec& s) {
    nlohmann::json colors = nlohmann::json::array();
    for (const auto& [name, density] : s.colors) colors.push_back({name, rational_to_json(density)});
    return {{"family", family_name(s.family)},
            {"n", s.n},
            {"height_bound", s.height_bound},
            {"spine", s.spine},
            {"degree_bound", s.degree_bound},
            {"edge_density", rational_to_json(s.edge_density)},
            {"graph_file", s.graph_file},
            {"colors", std::move(colors)},
            {"target", s.target},
            {"target_params", s.target_params},
            {"k", s.k},
            {"ell", s.ell},
            {"q", s.q},
            {"m_train", s.m_train},
            {"m_test", s.m_test},
            {"noise", rational_to_json(s.noise)},
            {"seed", s.seed}};
}

inline DatasetSpec json_to_spec(const nlohmann::json& j) {
    DatasetSpec s;
    if (j.contains("family")) s.family = parse_family(j.at("family").get<std::string>());
    s.n = j.value("n", s.n);
    s.height_bound = j.value("height_bound", s.height_bound);
    s.spine = j.value("spine", s.spine);
    s.degree_bound = j.value("degree_bound", s.degree_bound);
    if (j.contains("edge_density")) s.edge_density = json_to_rational(j.at("edge_density"));
    s.graph_file = j.value("graph_file", s.graph_file);
    if (j.contains("colors")) {
        s.colors.clear();
        for (const nlohmann::json& c : j.at("colors")) {
            require_input(c.is_array() && c.size() == 2, "spec colors must be [name, density] pairs");
            s.colors.emplace_back(c.at(0).get<std::string>(), json_to_rational(c.at(1)));
        }
    }
    s.target = j.value("target", s.target);
    if (j.contains("target_params")) s.target_params = j.at("target_params").get<VertexTuple>();
    s.k = j.value("k", s.k);
    s.ell = j.value("ell", s.ell);
    s.q = j.value("q", s.q);
    s.m_train = j.value("m_train", s.m_train);
    s.m_test = j.value("m_test", s.m_test);
    if (j.contains("noise")) s.noise = json_to_rational(j.at("noise"));
    s.seed = j.value("seed", s.seed);
    return s;
}

// ---------------------------------------------------------------------------
// Experiment driver.

struct ResultRecord {
    DatasetSpec spec;
    std::string algorithm;
    std::string status = "ok";  // "ok" or "reject"
    Rational train_error{0, 1};
    Rational heldout_error{0, 1};
    Rational erm_lower_bound{0, 1};
    Rational epsilon{0, 1};
    bool bound_checked = false;    // only the agnostic FPT learner carries a bound
    bool bound_satisfied = false;  // train_error <= erm_lower_bound + epsilon
    double wall_ms = 0.0;
    long long oracle_calls = 0;
    std::vector<std::string> stage_trace;
    std::uint64_t seed = 0;
    std::optional<Hypothesis> hypothesis;
};

inline nlohmann::json record_to_json(const ResultRecord& r) {
    nlohmann::json j{{"spec", spec_to_json(r.spec)},
                     {"algorithm", r.algorithm},
                     {"status", r.status},
                     {"epsilon", rational_to_json(r.epsilon)},
                     {"bound_checked", r.bound_checked},
                     {"bound_satisfied", r.bound_satisfied},
                     {"wall_ms", r.wall_ms},
                     {"oracle_calls", r.oracle_calls},
                     {"stage_trace", r.stage_trace},
                     {"seed", r.seed}};
    if (r.status == "ok") {
        j["train_error"] = rational_to_json(r.train_error);
        j["heldout_error"] = rational_to_json(r.heldout_error);
        j["erm_lower_bound"] = rational_to_json(r.erm_lower_bound);
        if (r.hypothesis) j["hypothesis"] = hypothesis_to_json(*r.hypothesis);
    }
    return j;
}

// Builds the splitter strategy an experiment should use: the forest strategy
// whenever the graph is acyclic, otherwise exhaustive play at the game radius
// the config implies.
inline std::unique_ptr<Strategy> pick_strategy(const ColoredGraph& g, const NdConfig& cfg) {
    if (internal::forest_check(g)) return std::make_unique<ForestStrategy>();
    return std::make_unique<ExactStrategy>(nd_game_radius(cfg));
}

inline ResultRecord run_experiment(const DatasetSpec& spec, const std::string& algo, const Rational& epsilon) {
    require_input(algo == "erm" || algo == "const-l" || algo == "k1" || algo == "nd",
                  "run_experiment: unknown algorithm " + algo);
    ColoredGraph g = generate_graph(spec);
    Sample train = generate_sample(g, spec);
    Sample test = generate_test_sample(g, spec);

    ResultRecord rec;
    rec.spec = spec;
    rec.algorithm = algo;
    rec.epsilon = epsilon;
    rec.seed = spec.seed;

    auto t0 = std::chrono::steady_clock::now();
    std::optional<Hypothesis> h;
    std::optional<Rational> erm_error;  // reused when the trained algorithm is erm itself
    if (algo == "erm") {
        ErmResult r = erm_typeset(g, train, spec.ell, spec.q);
        h = std::move(r.hypothesis);
        erm_error = r.error;
    } else if (algo == "const-l") {
        h = learn_const_l(g, train, spec.ell, spec.q);
    } else if (algo == "k1") {
        h = learn_k1(g, train, spec.ell, spec.q);
    } else {
        NdConfig cfg{spec.k, spec.ell, spec.q, epsilon};
        std::unique_ptr<Strategy> strategy = pick_strategy(g, cfg);
        h = learn_nd(g, train, cfg, *strategy);
    }
    rec.wall_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(std::chrono::steady_clock::now() - t0)
            .count();

    if (!h) {
        rec.status = "reject";
        return rec;
    }
    rec.hypothesis = *h;
    rec.stage_trace = h->trace;
    rec.train_error = training_error(g, *h, train);
    rec.heldout_error = training_error(g, *h, test);
    rec.erm_lower_bound = erm_error ? *erm_error : erm_typeset(g, train, spec.ell, spec.q).error;
    if (algo == "nd") {
        rec.bound_checked = true;
        rec.bound_satisfied = rec.train_error <= rec.erm_lower_bound + epsilon;
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Aggregation over JSON-lines result streams.

struct Summary {
    long long total = 0;
    long long ok = 0;
    long long rejected = 0;
    long long bound_checked = 0;
    long long bound_satisfied = 0;
    double mean_train = 0.0;    // over ok records
    double mean_heldout = 0.0;  // over ok records
};

inline std::vector<nlohmann::json> read_json_lines(std::istream& in) {
    std::vector<nlohmann::json> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("results line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline Summary summarize_records(const std::vector<nlohmann::json>& records) {
    Summary s;
    double train_sum = 0, heldout_sum = 0;
    for (const nlohmann::json& j : records) {
        ++s.total;
        if (j.value("status", "ok") != "ok") {
            ++s.rejected;
            continue;
        }
        ++s.ok;
        train_sum += json_to_rational(j.at("train_error")).to_double();
        heldout_sum += json_to_rational(j.at("heldout_error")).to_double();
        if (j.value("bound_checked", false)) {
            ++s.bound_checked;
            if (j.value("bound_satisfied", false)) ++s.bound_satisfied;
        }
    }
    if (s.ok > 0) {
        s.mean_train = train_sum / static_cast<double>(s.ok);
        s.mean_heldout = heldout_sum / static_cast<double>(s.ok);
    }
    return s;
}

inline std::string summary_line(const Summary& s) {
    std::ostringstream out;
    out << "records=" << s.total << " ok=" << s.ok << " rejected=" << s.rejected << " bound_checked="
        << s.bound_checked << " bound_satisfied=" << s.bound_satisfied << " mean_train=" << s.mean_train
        << " mean_heldout=" << s.mean_heldout;
    return out.str();
}

}  // namespace folearn
