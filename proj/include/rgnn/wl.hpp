#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rgnn/core.hpp"

namespace rgnn {

// Simple undirected graph.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    bool has_edge(int u, int v) const;
    std::vector<std::vector<int>> adjacency() const;
};

// Edge-list text: one "u v" pair per line, optional "n COUNT" line for
// isolated vertices, '#' comments.
Graph parse_edge_list(std::istream& in);
Graph parse_edge_list_file(const std::string& path);

struct Coloring {
    std::vector<int> color;  // per vertex (wl1) or per tuple, row-major
    int rounds = 0;
    int num_colors = 0;
};

// Classic 1-dimensional color refinement; uniform initial colors unless given.
Coloring wl1(const Graph& g, const std::vector<int>* initial = nullptr);
// Folklore 2-WL over ordered pairs, initialized by pair type.
Coloring fwl2(const Graph& g);
// Oblivious 2-WL: per-position multisets instead of paired contexts.
Coloring owl2(const Graph& g);
// Oblivious k-WL for k in {2, 3}; k = 3 is capped at 12 vertices.
Coloring owl_k(const Graph& g, int k, std::size_t owl3_vertex_cap = 12);

enum class WlAlgo { wl1, fwl2, owl2, owl3 };
const char* to_string(WlAlgo algo);
WlAlgo wl_algo_from_string(const std::string& text);

struct WlComparison {
    bool distinguished = false;
    int rounds_a = 0;
    int rounds_b = 0;
};

// Runs the refinement on both graphs with one shared relabel dictionary and
// compares the stable color multisets.
WlComparison compare_graphs(const Graph& a, const Graph& b, WlAlgo algo);

}  // namespace rgnn
