// folearn command line: generation, learning, model checking, the splitter
// game, and experiment orchestration over the library in include/folearn.
//
// Exit codes: 0 success and all requested bounds hold; 1 negative verdict
// (learner reject, violated bound, failed verification); 2 work budget
// exhausted; 3 invalid input; 4 internal invariant violation.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "folearn/check.hpp"
#include "folearn/eval.hpp"
#include "folearn/experiment.hpp"
#include "folearn/generate.hpp"
#include "folearn/graph_io.hpp"
#include "folearn/hardness.hpp"
#include "folearn/learn_nd.hpp"
#include "folearn/learners.hpp"
#include "folearn/parser.hpp"
#include "folearn/splitter.hpp"

namespace {

using namespace folearn;

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    require_input(in.good(), "cannot open file: " + path);
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

struct GenArgs {
    std::string spec_file;
    std::string graph_out, train_out, test_out;
    std::optional<std::uint64_t> seed;
};

int run_gen(const GenArgs& a) {
    DatasetSpec spec = json_to_spec(load_json_file(a.spec_file));
    if (a.seed) spec.seed = *a.seed;
    ColoredGraph g = generate_graph(spec);
    if (!a.graph_out.empty()) save_graph_file(a.graph_out, g);
    std::cout << "graph: n=" << g.n << " edges=" << g.edge_count() << " colors=" << g.vocab.size() << "\n";
    if (!a.train_out.empty()) {
        Sample train = generate_sample(g, spec);
        save_sample_file(a.train_out, train);
        std::cout << "train: m=" << train.m() << " positives=" << train.positives.size() << "\n";
    }
    if (!a.test_out.empty()) {
        Sample test = generate_test_sample(g, spec);
        save_sample_file(a.test_out, test);
        std::cout << "test: m=" << test.m() << " positives=" << test.positives.size() << "\n";
    }
    return 0;
}

struct LearnArgs {
    std::string graph_file, sample_file, algo;
    int ell = 0, q = 0;
    std::string epsilon = "1/4";
    long long budget = 4'000'000;
    long long stage_budget = 20000;
    std::string hypothesis_out;
};

void emit_hypothesis(const Hypothesis& h, const std::string& path) {
    if (!path.empty()) save_hypothesis_file(path, h);
}

int run_learn(const LearnArgs& a) {
    ColoredGraph g = load_graph_file(a.graph_file);
    Sample sample = load_sample_file(a.sample_file, g);
    if (a.algo == "erm") {
        ErmResult res = erm_typeset(g, sample, a.ell, a.q, a.budget);
        std::cout << "status=ok train_error=" << res.error.str() << "\n";
        std::cout << "params=" << nlohmann::json(res.hypothesis.params).dump() << "\n";
        std::cout << "formula=" << format_formula(res.hypothesis.formula) << "\n";
        emit_hypothesis(res.hypothesis, a.hypothesis_out);
        return 0;
    }
    if (a.algo == "const-l" || a.algo == "k1") {
        std::optional<Hypothesis> h = a.algo == "const-l" ? learn_const_l(g, sample, a.ell, a.q, a.budget)
                                                          : learn_k1(g, sample, a.ell, a.q);
        if (!h) {
            std::cout << "status=reject\n";
            return 1;
        }
        std::cout << "status=ok train_error=" << training_error(g, *h, sample).str() << "\n";
        std::cout << "params=" << nlohmann::json(h->params).dump() << "\n";
        std::cout << "formula=" << format_formula(h->formula) << "\n";
        emit_hypothesis(*h, a.hypothesis_out);
        return 0;
    }
    if (a.algo == "nd") {
        NdConfig cfg{sample.k, a.ell, a.q, parse_rational(a.epsilon), a.stage_budget};
        std::unique_ptr<Strategy> strategy = pick_strategy(g, cfg);
        NdDerived d;
        NdRunStats stats;
        Hypothesis h = learn_nd(g, sample, cfg, *strategy, &d, &stats);
        Rational train = training_error(g, h, sample);
        Rational base = erm_typeset(g, sample, a.ell, a.q, a.budget).error;
        bool ok = train <= base + cfg.epsilon;
        std::cout << "status=ok r=" << d.r << " R=" << d.R << " s=" << d.s << " L=" << d.L << " Q=" << d.Q_impl
                  << "\n";
        std::cout << "stage_nodes=" << stats.stage_nodes << " leaves=" << stats.leaves
                  << " rules_tried=" << stats.rules_tried << "\n";
        for (const std::string& line : h.trace) std::cout << "trace: " << line << "\n";
        std::cout << "train_error=" << train.str() << " erm_error=" << base.str() << " epsilon="
                  << cfg.epsilon.str() << " bound=" << (ok ? "OK" : "VIOLATED") << "\n";
        emit_hypothesis(h, a.hypothesis_out);
        return ok ? 0 : 1;
    }
    throw std::invalid_argument("unknown algorithm: " + a.algo);
}

struct McArgs {
    std::string graph_file, formula;
};

int run_mc(const McArgs& a) {
    ColoredGraph g = load_graph_file(a.graph_file);
    FormulaPtr f = parse_formula(a.formula);
    require_input(f->free_vars.empty(), "mc: formula must be a sentence");
    std::cout << (eval(g, f) ? "true" : "false") << "\n";
    return 0;
}

struct ReduceMcArgs {
    std::string graph_file, formula, oracle = "const-l";
};

int run_reduce_mc(const ReduceMcArgs& a) {
    ColoredGraph g = load_graph_file(a.graph_file);
    FormulaPtr f = parse_formula(a.formula);
    require_input(f->free_vars.empty(), "reduce-mc: formula must be a sentence");
    require_input(a.oracle == "erm" || a.oracle == "const-l", "reduce-mc: unknown oracle " + a.oracle);
    LearnOracle oracle = a.oracle == "erm" ? oracle_from_erm() : oracle_from_const_l();
    McStats stats;
    bool verdict = mc_via_learn_oracle(g, f, oracle, &stats);
    std::cout << (verdict ? "true" : "false") << "\n";
    std::cout << "oracle_calls=" << stats.oracle_calls << " expansions=" << stats.expansions
              << " max_calls_per_expansion=" << stats.max_calls_per_expansion << " pair_bound="
              << static_cast<long long>(g.n) * (g.n - 1) / 2 << "\n";
    return 0;
}

struct SplitterArgs {
    std::string graph_file, strategy = "auto";
    int radius = 1;
    int verify_depth = 0;
    long long budget = 2'000'000;
};

int run_splitter(const SplitterArgs& a) {
    ColoredGraph g = load_graph_file(a.graph_file);
    std::unique_ptr<Strategy> strat;
    if (a.strategy == "forest" || (a.strategy == "auto" && internal::forest_check(g))) {
        strat = std::make_unique<ForestStrategy>();
        std::cout << "strategy=forest\n";
    } else if (a.strategy == "exact" || a.strategy == "auto") {
        strat = std::make_unique<ExactStrategy>(a.radius, a.budget);
        std::cout << "strategy=exact\n";
    } else {
        throw std::invalid_argument("unknown strategy: " + a.strategy);
    }
    int depth = strat->declared_depth(g, a.radius);
    std::cout << "radius=" << a.radius << " depth=" << depth << "\n";
    if (a.verify_depth > 0) {
        std::optional<bool> ok = verify_winning(g, a.radius, *strat, a.verify_depth, a.budget);
        if (!ok) {
            std::cout << "verify: budget exhausted\n";
            return 2;
        }
        std::cout << "verify: " << (*ok ? "wins" : "loses") << " within " << a.verify_depth << " rounds\n";
        return *ok ? 0 : 1;
    }
    return 0;
}

struct ExperimentArgs {
    std::string spec_file, manifest_file, algo = "nd";
    std::string epsilon = "1/4";
    std::string out_file;
    bool append = false;
};

bool record_passes(const ResultRecord& rec) {
    return rec.status == "ok" && (!rec.bound_checked || rec.bound_satisfied);
}

int run_experiment_cmd(const ExperimentArgs& a) {
    require_input(a.spec_file.empty() != a.manifest_file.empty(),
                  "experiment: pass exactly one of --spec or --manifest");
    std::ofstream file_out;
    if (!a.out_file.empty()) {
        file_out.open(a.out_file, a.append ? std::ios::app : std::ios::trunc);
        require_input(file_out.good(), "cannot open output file: " + a.out_file);
    }
    std::ostream& out = a.out_file.empty() ? std::cout : file_out;

    bool all_pass = true;
    auto run_one = [&](const DatasetSpec& spec, const std::string& algo, const Rational& eps) {
        ResultRecord rec = run_experiment(spec, algo, eps);
        out << record_to_json(rec).dump() << "\n";
        all_pass = all_pass && record_passes(rec);
    };

    if (!a.spec_file.empty()) {
        run_one(json_to_spec(load_json_file(a.spec_file)), a.algo, parse_rational(a.epsilon));
    } else {
        nlohmann::json manifest = load_json_file(a.manifest_file);
        require_input(manifest.is_array(), "manifest must be a JSON array of trials");
        for (const nlohmann::json& entry : manifest) {
            DatasetSpec spec = json_to_spec(entry.at("spec"));
            std::string algo = entry.value("algo", a.algo);
            Rational eps = entry.contains("epsilon") ? json_to_rational(entry.at("epsilon"))
                                                     : parse_rational(a.epsilon);
            if (entry.contains("seeds")) {
                for (std::uint64_t seed : entry.at("seeds").get<std::vector<std::uint64_t>>()) {
                    spec.seed = seed;
                    run_one(spec, algo, eps);
                }
            } else {
                run_one(spec, algo, eps);
            }
        }
    }
    return all_pass ? 0 : 1;
}

struct SummarizeArgs {
    std::string in_file;
};

int run_summarize(const SummarizeArgs& a) {
    std::vector<nlohmann::json> records;
    if (a.in_file.empty()) {
        records = read_json_lines(std::cin);
    } else {
        std::ifstream in(a.in_file);
        require_input(in.good(), "cannot open results file: " + a.in_file);
        records = read_json_lines(in);
    }
    Summary s = summarize_records(records);
    std::cout << summary_line(s) << "\n";
    return s.bound_satisfied == s.bound_checked ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"learning first-order definable concepts on finite colored graphs"};
    app.require_subcommand(1);
    int exit_code = 0;

    GenArgs gen;
    CLI::App* cgen = app.add_subcommand("gen", "generate a graph and labelled samples from a dataset spec");
    cgen->add_option("--spec", gen.spec_file, "dataset spec JSON file")->required()->check(CLI::ExistingFile);
    cgen->add_option("--graph-out", gen.graph_out, "write the graph here");
    cgen->add_option("--train-out", gen.train_out, "write the training sample here");
    cgen->add_option("--test-out", gen.test_out, "write the heldout sample here");
    std::uint64_t gen_seed = 0;
    CLI::Option* gen_seed_opt = cgen->add_option("--seed", gen_seed, "override the spec's seed");
    cgen->callback([&] {
        if (*gen_seed_opt) gen.seed = gen_seed;
        exit_code = run_gen(gen);
    });

    LearnArgs learn;
    CLI::App* clearn = app.add_subcommand("learn", "run a learner on a stored graph and sample");
    clearn->add_option("--graph", learn.graph_file, "graph file")->required()->check(CLI::ExistingFile);
    clearn->add_option("--sample", learn.sample_file, "sample JSON file")->required()->check(CLI::ExistingFile);
    clearn->add_option("--algo", learn.algo, "erm | const-l | k1 | nd")->required();
    clearn->add_option("--ell", learn.ell, "parameter count");
    clearn->add_option("--q", learn.q, "quantifier rank");
    clearn->add_option("--epsilon", learn.epsilon, "nd error slack, e.g. 1/4");
    clearn->add_option("--budget", learn.budget, "work budget for erm/const-l");
    clearn->add_option("--stage-budget", learn.stage_budget, "nd stage node budget");
    clearn->add_option("--hypothesis-out", learn.hypothesis_out, "write the hypothesis here");
    clearn->callback([&] { exit_code = run_learn(learn); });

    McArgs mc;
    CLI::App* cmc = app.add_subcommand("mc", "evaluate a sentence on a graph directly");
    cmc->add_option("--graph", mc.graph_file, "graph file")->required()->check(CLI::ExistingFile);
    cmc->add_option("--formula", mc.formula, "sentence text")->required();
    cmc->callback([&] { exit_code = run_mc(mc); });

    ReduceMcArgs rmc;
    CLI::App* crmc = app.add_subcommand("reduce-mc", "evaluate a sentence using only a learning oracle");
    crmc->add_option("--graph", rmc.graph_file, "graph file")->required()->check(CLI::ExistingFile);
    crmc->add_option("--formula", rmc.formula, "sentence text")->required();
    crmc->add_option("--oracle", rmc.oracle, "const-l | erm");
    crmc->callback([&] { exit_code = run_reduce_mc(rmc); });

    SplitterArgs sp;
    CLI::App* csp = app.add_subcommand("splitter", "play or verify the splitter game");
    csp->add_option("--graph", sp.graph_file, "graph file")->required()->check(CLI::ExistingFile);
    csp->add_option("--radius", sp.radius, "game radius")->required();
    csp->add_option("--strategy", sp.strategy, "auto | forest | exact");
    csp->add_option("--verify", sp.verify_depth, "verify the strategy wins within this many rounds");
    csp->add_option("--budget", sp.budget, "search node budget");
    csp->callback([&] { exit_code = run_splitter(sp); });

    ExperimentArgs ex;
    CLI::App* cex = app.add_subcommand("experiment", "run trials and emit JSON-lines result records");
    cex->add_option("--spec", ex.spec_file, "dataset spec JSON file")->check(CLI::ExistingFile);
    cex->add_option("--manifest", ex.manifest_file, "JSON array of trials")->check(CLI::ExistingFile);
    cex->add_option("--algo", ex.algo, "erm | const-l | k1 | nd");
    cex->add_option("--epsilon", ex.epsilon, "error slack for the nd bound");
    cex->add_option("--out", ex.out_file, "append records to this file instead of stdout");
    cex->add_flag("--append", ex.append, "append to --out instead of truncating");
    cex->callback([&] { exit_code = run_experiment_cmd(ex); });

    SummarizeArgs sm;
    CLI::App* csm = app.add_subcommand("summarize", "aggregate a JSON-lines result stream");
    csm->add_option("--in", sm.in_file, "results file (default: stdin)");
    csm->callback([&] { exit_code = run_summarize(sm); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const folearn::BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const folearn::InvariantViolation& e) {
        std::cerr << "internal invariant violated: " << e.what() << "\n";
        return 4;
    }
    return exit_code;
}
