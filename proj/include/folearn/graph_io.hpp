#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "folearn/graph.hpp"

namespace folearn {

// Text format, one directive per line:
//   vocab <name>*
//   nodes <n>
//   edge <u> <v>
//   color <name> <v>
// '#' starts a comment; blank lines are ignored. "vocab" and "nodes" must
// appear before any edge or color line.
inline ColoredGraph load_graph(std::istream& in) {
    Vocabulary vocab;
    bool saw_vocab = false, saw_nodes = false;
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> color_sets;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        auto fail = [&](const std::string& msg) {
            throw std::invalid_argument("graph line " + std::to_string(line_no) + ": " + msg);
        };
        if (tok == "vocab") {
            if (saw_vocab) fail("duplicate vocab line");
            std::string name;
            while (ls >> name) {
                if (vocab.contains(name)) fail("duplicate color name " + name);
                vocab.colors.push_back(name);
            }
            color_sets.assign(vocab.colors.size(), {});
            saw_vocab = true;
        } else if (tok == "nodes") {
            if (saw_nodes) fail("duplicate nodes line");
            if (!(ls >> n) || n < 0) fail("bad vertex count");
            saw_nodes = true;
        } else if (tok == "edge") {
            if (!saw_nodes) fail("edge before nodes line");
            int u, v;
            if (!(ls >> u >> v)) fail("bad edge line");
            if (u < 0 || u >= n || v < 0 || v >= n) fail("edge endpoint out of range");
            if (u == v) fail("self-loop rejected");
            edges.emplace_back(u, v);
        } else if (tok == "color") {
            if (!saw_nodes) fail("color before nodes line");
            std::string name;
            int v;
            if (!(ls >> name >> v)) fail("bad color line");
            int c = vocab.index_of(name);
            if (c < 0) fail("unknown color " + name);
            if (v < 0 || v >= n) fail("colored vertex out of range");
            color_sets[c].push_back(v);
        } else {
            fail("unknown directive " + tok);
        }
        std::string extra;
        if (tok != "vocab" && (ls >> extra)) fail("trailing tokens");
    }
    if (!saw_nodes) throw std::invalid_argument("graph file: missing nodes line");
    return build_graph(n, edges, vocab, color_sets);
}

inline ColoredGraph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    require_input(in.good(), "cannot open graph file: " + path);
    return load_graph(in);
}

inline ColoredGraph load_graph_string(const std::string& text) {
    std::istringstream in(text);
    return load_graph(in);
}

// Canonical order: vocab, nodes, edges ascending, colors in vocabulary order.
// save(load(save(g))) is byte-identical to save(g).
inline void save_graph(std::ostream& out, const ColoredGraph& g) {
    out << "vocab";
    for (const auto& name : g.vocab.colors) out << " " << name;
    out << "\n";
    out << "nodes " << g.n << "\n";
    for (int u = 0; u < g.n; ++u)
        for (int v : g.adj[u])
            if (u < v) out << "edge " << u << " " << v << "\n";
    for (int c = 0; c < g.vocab.size(); ++c)
        for (int v = 0; v < g.n; ++v)
            if (g.color[c][v]) out << "color " << g.vocab.colors[c] << " " << v << "\n";
}

inline std::string save_graph_string(const ColoredGraph& g) {
    std::ostringstream out;
    save_graph(out, g);
    return out.str();
}

inline void save_graph_file(const std::string& path, const ColoredGraph& g) {
    std::ofstream out(path);
    require_input(out.good(), "cannot write graph file: " + path);
    save_graph(out, g);
}

}  // namespace folearn
