#include "rgnn/wl.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace rgnn {

bool Graph::has_edge(int u, int v) const {
    for (const auto& [a, b] : edges)
        if ((a == u && b == v) || (a == v && b == u)) return true;
    return false;
}

std::vector<std::vector<int>> Graph::adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& [a, b] : edges) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return adj;
}

Graph parse_edge_list(std::istream& in) {
    Graph g;
    std::string line;
    int max_vertex = -1;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::stringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue;
        if (first == "n") {
            int count;
            if (!(ss >> count) || count < 0)
                throw SyntaxError("bad vertex count line: " + line);
            g.n = std::max(g.n, count);
            continue;
        }
        int u, v;
        try {
            u = std::stoi(first);
        } catch (const std::exception&) {
            throw SyntaxError("bad edge line: " + line);
        }
        if (!(ss >> v)) throw SyntaxError("bad edge line: " + line);
        if (u < 0 || v < 0) throw SyntaxError("negative vertex id: " + line);
        if (u == v) throw SyntaxError("self loops are not supported: " + line);
        g.edges.emplace_back(u, v);
        max_vertex = std::max({max_vertex, u, v});
    }
    g.n = std::max(g.n, max_vertex + 1);
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    return g;
}

Graph parse_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph file: " + path);
    return parse_edge_list(in);
}

namespace {

using Key = std::vector<long long>;

struct Relabeler {
    std::map<Key, int> table;
    int relabel(const Key& key) {
        auto [it, inserted] = table.emplace(key, static_cast<int>(table.size()));
        return it->second;
    }
};

int distinct_count(const std::vector<int>& colors) {
    std::set<int> s(colors.begin(), colors.end());
    return static_cast<int>(s.size());
}

// One refinement pass; key_of must place the old color inside the key so the
// partition only ever refines.
template <typename KeyFn>
std::vector<int> refine_round(const std::vector<int>& colors, KeyFn&& key_of) {
    Relabeler relabeler;
    std::vector<int> next(colors.size());
    for (std::size_t i = 0; i < colors.size(); ++i)
        next[i] = relabeler.relabel(key_of(static_cast<int>(i), colors));
    return next;
}

template <typename KeyFn>
Coloring refine_to_fixpoint(std::vector<int> colors, KeyFn&& key_of) {
    Coloring result;
    int classes = distinct_count(colors);
    for (;;) {
        std::vector<int> next = refine_round(colors, key_of);
        ++result.rounds;
        int next_classes = distinct_count(next);
        colors = std::move(next);
        if (next_classes == classes) break;
        classes = next_classes;
    }
    result.color = std::move(colors);
    result.num_colors = classes;
    return result;
}

Key wl1_key(int v, const std::vector<int>& colors,
            const std::vector<std::vector<int>>& adj) {
    Key key{colors[static_cast<std::size_t>(v)]};
    std::vector<long long> neighborhood;
    for (int u : adj[static_cast<std::size_t>(v)])
        neighborhood.push_back(colors[static_cast<std::size_t>(u)]);
    std::sort(neighborhood.begin(), neighborhood.end());
    key.insert(key.end(), neighborhood.begin(), neighborhood.end());
    return key;
}

std::vector<int> pair_initial_colors(const Graph& g) {
    std::set<std::pair<int, int>> edge_set;
    for (const auto& [a, b] : g.edges) {
        edge_set.emplace(a, b);
        edge_set.emplace(b, a);
    }
    std::vector<int> colors(static_cast<std::size_t>(g.n) *
                            static_cast<std::size_t>(g.n));
    for (int u = 0; u < g.n; ++u)
        for (int v = 0; v < g.n; ++v) {
            int type = u == v ? 0 : (edge_set.count({u, v}) ? 1 : 2);
            colors[static_cast<std::size_t>(u * g.n + v)] = type;
        }
    return colors;
}

Key fwl2_key(int tuple, const std::vector<int>& colors, int n) {
    const int u = tuple / n, v = tuple % n;
    Key key{colors[static_cast<std::size_t>(tuple)]};
    std::vector<std::pair<long long, long long>> context;
    context.reserve(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w)
        context.emplace_back(colors[static_cast<std::size_t>(w * n + v)],
                             colors[static_cast<std::size_t>(u * n + w)]);
    std::sort(context.begin(), context.end());
    for (const auto& [a, b] : context) {
        key.push_back(a);
        key.push_back(b);
    }
    return key;
}

Key owl2_key(int tuple, const std::vector<int>& colors, int n) {
    const int u = tuple / n, v = tuple % n;
    Key key{colors[static_cast<std::size_t>(tuple)]};
    std::vector<long long> first, second;
    for (int w = 0; w < n; ++w) {
        first.push_back(colors[static_cast<std::size_t>(w * n + v)]);
        second.push_back(colors[static_cast<std::size_t>(u * n + w)]);
    }
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    key.insert(key.end(), first.begin(), first.end());
    key.push_back(-1);
    key.insert(key.end(), second.begin(), second.end());
    return key;
}

std::vector<int> triple_initial_colors(const Graph& g) {
    std::set<std::pair<int, int>> edge_set;
    for (const auto& [a, b] : g.edges) {
        edge_set.emplace(a, b);
        edge_set.emplace(b, a);
    }
    const std::size_t n = static_cast<std::size_t>(g.n);
    std::vector<int> colors(n * n * n);
    for (int u = 0; u < g.n; ++u)
        for (int v = 0; v < g.n; ++v)
            for (int w = 0; w < g.n; ++w) {
                int type = 0;
                type = type * 2 + (u == v);
                type = type * 2 + (u == w);
                type = type * 2 + (v == w);
                type = type * 2 + edge_set.count({u, v});
                type = type * 2 + edge_set.count({u, w});
                type = type * 2 + edge_set.count({v, w});
                colors[(static_cast<std::size_t>(u) * n +
                        static_cast<std::size_t>(v)) * n +
                       static_cast<std::size_t>(w)] = type;
            }
    return colors;
}

Key owl3_key(int tuple, const std::vector<int>& colors, int n) {
    const int w = tuple % n;
    const int v = (tuple / n) % n;
    const int u = tuple / (n * n);
    Key key{colors[static_cast<std::size_t>(tuple)]};
    auto idx = [n](int a, int b, int c) {
        return (static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
                static_cast<std::size_t>(b)) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>(c);
    };
    for (int position = 0; position < 3; ++position) {
        std::vector<long long> bag;
        for (int x = 0; x < n; ++x) {
            if (position == 0) bag.push_back(colors[idx(x, v, w)]);
            else if (position == 1) bag.push_back(colors[idx(u, x, w)]);
            else bag.push_back(colors[idx(u, v, x)]);
        }
        std::sort(bag.begin(), bag.end());
        key.push_back(-1);
        key.insert(key.end(), bag.begin(), bag.end());
    }
    return key;
}

}  // namespace

Coloring wl1(const Graph& g, const std::vector<int>* initial) {
    auto adj = g.adjacency();
    std::vector<int> colors;
    if (initial) {
        if (static_cast<int>(initial->size()) != g.n)
            throw ShapeMismatchError("initial coloring size mismatch");
        Relabeler relabeler;
        for (int c : *initial) colors.push_back(relabeler.relabel({c}));
    } else {
        colors.assign(static_cast<std::size_t>(g.n), 0);
    }
    return refine_to_fixpoint(std::move(colors), [&](int v, const std::vector<int>& c) {
        return wl1_key(v, c, adj);
    });
}

Coloring fwl2(const Graph& g) {
    return refine_to_fixpoint(pair_initial_colors(g),
                              [&](int t, const std::vector<int>& c) {
                                  return fwl2_key(t, c, g.n);
                              });
}

Coloring owl2(const Graph& g) {
    return refine_to_fixpoint(pair_initial_colors(g),
                              [&](int t, const std::vector<int>& c) {
                                  return owl2_key(t, c, g.n);
                              });
}

Coloring owl_k(const Graph& g, int k, std::size_t owl3_vertex_cap) {
    if (k == 2) return owl2(g);
    if (k != 3) throw Error("owl_k supports k in {2, 3}");
    if (static_cast<std::size_t>(g.n) > owl3_vertex_cap)
        throw SizeCapError("3-OWL is capped at " +
                           std::to_string(owl3_vertex_cap) + " vertices");
    return refine_to_fixpoint(triple_initial_colors(g),
                              [&](int t, const std::vector<int>& c) {
                                  return owl3_key(t, c, g.n);
                              });
}

const char* to_string(WlAlgo algo) {
    switch (algo) {
    case WlAlgo::wl1: return "wl1";
    case WlAlgo::fwl2: return "fwl2";
    case WlAlgo::owl2: return "owl2";
    case WlAlgo::owl3: return "owl3";
    }
    return "wl1";
}

WlAlgo wl_algo_from_string(const std::string& text) {
    if (text == "wl1") return WlAlgo::wl1;
    if (text == "fwl2") return WlAlgo::fwl2;
    if (text == "owl2") return WlAlgo::owl2;
    if (text == "owl3") return WlAlgo::owl3;
    throw Error("unknown WL algorithm: " + text);
}

namespace {

struct JointSpace {
    // Tuple counts for graph a and b plus an update-key function evaluated
    // against the joint color vector (a's tuples first).
    int count_a = 0;
    int count_b = 0;
    std::vector<int> initial;
    std::function<Key(int, const std::vector<int>&)> key_of;
};

JointSpace joint_space(const Graph& a, const Graph& b, WlAlgo algo) {
    JointSpace js;
    switch (algo) {
    case WlAlgo::wl1: {
        js.count_a = a.n;
        js.count_b = b.n;
        js.initial.assign(static_cast<std::size_t>(a.n + b.n), 0);
        auto adj_a = a.adjacency();
        auto adj_b = b.adjacency();
        int offset = a.n;
        js.key_of = [adj_a, adj_b, offset](int i, const std::vector<int>& c) {
            if (i < offset) {
                Key key{c[static_cast<std::size_t>(i)]};
                std::vector<long long> bag;
                for (int u : adj_a[static_cast<std::size_t>(i)])
                    bag.push_back(c[static_cast<std::size_t>(u)]);
                std::sort(bag.begin(), bag.end());
                key.insert(key.end(), bag.begin(), bag.end());
                return key;
            }
            Key key{c[static_cast<std::size_t>(i)]};
            std::vector<long long> bag;
            for (int u : adj_b[static_cast<std::size_t>(i - offset)])
                bag.push_back(c[static_cast<std::size_t>(u + offset)]);
            std::sort(bag.begin(), bag.end());
            key.insert(key.end(), bag.begin(), bag.end());
            return key;
        };
        break;
    }
    case WlAlgo::fwl2:
    case WlAlgo::owl2: {
        js.count_a = a.n * a.n;
        js.count_b = b.n * b.n;
        std::vector<int> ia = pair_initial_colors(a);
        std::vector<int> ib = pair_initial_colors(b);
        js.initial = ia;
        js.initial.insert(js.initial.end(), ib.begin(), ib.end());
        const int na = a.n, nb = b.n, offset = js.count_a;
        const bool folklore = algo == WlAlgo::fwl2;
        js.key_of = [na, nb, offset, folklore](int i, const std::vector<int>& c) {
            // restrict the color view to the owning graph
            if (i < offset) {
                std::vector<int> view(c.begin(), c.begin() + offset);
                return folklore ? fwl2_key(i, view, na) : owl2_key(i, view, na);
            }
            std::vector<int> view(c.begin() + offset, c.end());
            return folklore ? fwl2_key(i - offset, view, nb)
                            : owl2_key(i - offset, view, nb);
        };
        break;
    }
    case WlAlgo::owl3: {
        if (a.n > 12 || b.n > 12)
            throw SizeCapError("3-OWL comparison is capped at 12 vertices");
        js.count_a = a.n * a.n * a.n;
        js.count_b = b.n * b.n * b.n;
        std::vector<int> ia = triple_initial_colors(a);
        std::vector<int> ib = triple_initial_colors(b);
        js.initial = ia;
        js.initial.insert(js.initial.end(), ib.begin(), ib.end());
        const int na = a.n, nb = b.n, offset = js.count_a;
        js.key_of = [na, nb, offset](int i, const std::vector<int>& c) {
            if (i < offset) {
                std::vector<int> view(c.begin(), c.begin() + offset);
                return owl3_key(i, view, na);
            }
            std::vector<int> view(c.begin() + offset, c.end());
            return owl3_key(i - offset, view, nb);
        };
        break;
    }
    }
    return js;
}

}  // namespace

WlComparison compare_graphs(const Graph& a, const Graph& b, WlAlgo algo) {
    JointSpace js = joint_space(a, b, algo);
    std::vector<int> colors = js.initial;
    {
        // compress the shared initial colors to dense ids
        Relabeler relabeler;
        for (int& c : colors) c = relabeler.relabel({c});
    }

    WlComparison result;
    auto classes_of = [&](std::size_t begin, std::size_t end) {
        std::set<int> s(colors.begin() + static_cast<std::ptrdiff_t>(begin),
                        colors.begin() + static_cast<std::ptrdiff_t>(end));
        return static_cast<int>(s.size());
    };
    int classes = distinct_count(colors);
    int classes_a = classes_of(0, static_cast<std::size_t>(js.count_a));
    int classes_b = classes_of(static_cast<std::size_t>(js.count_a), colors.size());
    bool stable_a = false, stable_b = false;
    int round = 0;
    for (;;) {
        std::vector<int> next = refine_round(colors, js.key_of);
        ++round;
        colors = std::move(next);
        int next_classes = distinct_count(colors);
        int next_a = classes_of(0, static_cast<std::size_t>(js.count_a));
        int next_b = classes_of(static_cast<std::size_t>(js.count_a), colors.size());
        if (!stable_a && next_a == classes_a) {
            stable_a = true;
            result.rounds_a = round;
        }
        if (!stable_b && next_b == classes_b) {
            stable_b = true;
            result.rounds_b = round;
        }
        classes_a = next_a;
        classes_b = next_b;
        if (next_classes == classes) break;
        classes = next_classes;
    }
    if (!stable_a) result.rounds_a = round;
    if (!stable_b) result.rounds_b = round;

    std::vector<int> bag_a(colors.begin(),
                           colors.begin() + static_cast<std::ptrdiff_t>(js.count_a));
    std::vector<int> bag_b(colors.begin() + static_cast<std::ptrdiff_t>(js.count_a),
                           colors.end());
    std::sort(bag_a.begin(), bag_a.end());
    std::sort(bag_b.begin(), bag_b.end());
    result.distinguished = bag_a != bag_b;
    return result;
}

}  // namespace rgnn
