#include "oligo/graph.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

namespace oligo {

bool ConflictGraph::adjacent(int u, int v) const {
    const auto& nb = adj[u];
    return std::binary_search(nb.begin(), nb.end(), v);
}

int ConflictGraph::max_degree() const {
    int d = 0;
    for (const auto& nb : adj) d = std::max(d, static_cast<int>(nb.size()));
    return d;
}

int ConflictGraph::edge_count() const {
    int total = 0;
    for (const auto& nb : adj) total += static_cast<int>(nb.size());
    return total / 2;
}

std::vector<std::pair<int, int>> ConflictGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < n_nodes; ++u)
        for (int v : adj[u])
            if (u < v) out.emplace_back(u, v);
    return out;
}

ConflictGraph ConflictGraph::empty(int n) {
    ConflictGraph g;
    g.n_nodes = n;
    g.adj.resize(n);
    g.label.resize(n);
    std::iota(g.label.begin(), g.label.end(), 0);
    return g;
}

namespace {
void add_edge(ConflictGraph& g, int u, int v) {
    if (u == v) throw std::runtime_error("self-loop");
    if (!g.adjacent(u, v)) {
        g.adj[u].insert(std::lower_bound(g.adj[u].begin(), g.adj[u].end(), v), v);
        g.adj[v].insert(std::lower_bound(g.adj[v].begin(), g.adj[v].end(), u), u);
    }
}
}  // namespace

ConflictGraph ConflictGraph::linear(int n) {
    auto g = empty(n);
    for (int i = 0; i + 1 < n; ++i) add_edge(g, i, i + 1);
    g.transitive_hint = (n <= 2);
    return g;
}

ConflictGraph ConflictGraph::cycle(int n) {
    auto g = linear(n);
    if (n > 2) add_edge(g, n - 1, 0);
    g.transitive_hint = true;
    return g;
}

ConflictGraph ConflictGraph::king_grid(int k) {
    auto g = empty(k * k);
    auto id = [k](int r, int c) { return r * k + c; };
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c)
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    int nr = r + dr, nc = c + dc;
                    if (nr < 0 || nc < 0 || nr >= k || nc >= k) continue;
                    if (id(nr, nc) > id(r, c)) add_edge(g, id(r, c), id(nr, nc));
                }
    return g;
}

ConflictGraph ConflictGraph::complete(int n) {
    auto g = empty(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) add_edge(g, u, v);
    g.transitive_hint = true;
    return g;
}

ConflictGraph ConflictGraph::circulant(int n, const std::vector<int>& hops) {
    if (hops.empty()) throw std::runtime_error("circulant hop set must be non-empty");
    auto g = empty(n);
    for (int u = 0; u < n; ++u)
        for (int h : hops) {
            if (h <= 0) throw std::runtime_error("circulant hops must be positive");
            add_edge(g, u, (u + h) % n);
        }
    g.transitive_hint = true;
    return g;
}

ConflictGraph ConflictGraph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    auto g = empty(n);
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n) throw std::runtime_error("edge endpoint out of range");
        add_edge(g, u, v);
    }
    return g;
}

ConflictGraph ConflictGraph::parse_edge_list(std::istream& in, int n_nodes) {
    std::vector<std::pair<int, int>> edges;
    int max_id = -1;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int u, v;
        if (!(ls >> u >> v)) throw std::runtime_error("malformed edge list line: " + line);
        if (u < 0 || v < 0) throw std::runtime_error("negative node id in edge list");
        edges.emplace_back(u, v);
        max_id = std::max({max_id, u, v});
    }
    int n = n_nodes >= 0 ? n_nodes : max_id + 1;
    return from_edges(n, edges);
}

ConflictGraph restrict_graph(const ConflictGraph& g, const std::vector<int>& states) {
    if (static_cast<int>(states.size()) != g.n_nodes)
        throw std::runtime_error("state vector length mismatch");
    std::vector<int> keep;
    for (int i = 0; i < g.n_nodes; ++i)
        if (states[i] >= 1) keep.push_back(i);
    std::vector<int> pos(g.n_nodes, -1);
    for (size_t i = 0; i < keep.size(); ++i) pos[keep[i]] = static_cast<int>(i);
    auto out = ConflictGraph::empty(static_cast<int>(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i) {
        out.label[i] = g.label[keep[i]];
        for (int nb : g.adj[keep[i]])
            if (pos[nb] > static_cast<int>(i)) add_edge(out, static_cast<int>(i), pos[nb]);
    }
    return out;
}

ConflictGraph restrict_graph(const ConflictGraph& g, uint32_t available_mask) {
    std::vector<int> states(g.n_nodes, 0);
    for (int i = 0; i < g.n_nodes; ++i)
        if (available_mask >> i & 1u) states[i] = 1;
    return restrict_graph(g, states);
}

std::vector<std::vector<int>> components(const ConflictGraph& g) {
    std::vector<std::vector<int>> out;
    std::vector<char> seen(g.n_nodes, 0);
    std::vector<int> stack;
    for (int s = 0; s < g.n_nodes; ++s) {
        if (seen[s]) continue;
        std::vector<int> comp;
        stack.push_back(s);
        seen[s] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            for (int v : g.adj[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

namespace {

std::vector<int> mask_to_set(uint64_t mask) {
    std::vector<int> out;
    while (mask) {
        int v = std::countr_zero(mask);
        out.push_back(v);
        mask &= mask - 1;
    }
    return out;
}

// Bron-Kerbosch with pivoting over an arbitrary symmetric relation given as
// per-node bitmasks; enumerates maximal sets that are pairwise related.
void bron_kerbosch(uint64_t r, uint64_t p, uint64_t x, const std::vector<uint64_t>& rel,
                   std::vector<uint64_t>& out) {
    if (p == 0 && x == 0) {
        out.push_back(r);
        return;
    }
    uint64_t px = p | x;
    int pivot = -1, best = -1;
    for (uint64_t m = px; m;) {
        int v = std::countr_zero(m);
        m &= m - 1;
        int cnt = std::popcount(p & rel[v]);
        if (cnt > best) {
            best = cnt;
            pivot = v;
        }
    }
    uint64_t cand = p & ~rel[pivot];
    while (cand) {
        int v = std::countr_zero(cand);
        uint64_t bit = 1ull << v;
        cand &= cand - 1;
        bron_kerbosch(r | bit, p & rel[v], x & rel[v], rel, out);
        p &= ~bit;
        x |= bit;
    }
}

std::vector<std::vector<int>> sorted_sets(std::vector<uint64_t>& masks) {
    std::vector<std::vector<int>> out;
    out.reserve(masks.size());
    for (uint64_t m : masks) out.push_back(mask_to_set(m));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<std::vector<int>> independent_sets(const ConflictGraph& g, ISMode mode) {
    const int n = g.n_nodes;
    const int cap = (mode == ISMode::All) ? kEnumCapAll : kEnumCapMaximal;
    if (n > cap)
        throw cap_exceeded("independent-set enumeration over " + std::to_string(n) +
                           " nodes exceeds the cap; enumerate per component instead");
    if (n == 0) return mode == ISMode::All ? std::vector<std::vector<int>>{{}} : std::vector<std::vector<int>>{};

    std::vector<uint64_t> adj_mask(n, 0);
    for (int u = 0; u < n; ++u)
        for (int v : g.adj[u]) adj_mask[u] |= 1ull << v;
    const uint64_t full = (n == 64) ? ~0ull : (1ull << n) - 1;

    if (mode == ISMode::All) {
        std::vector<uint64_t> masks;
        // include/exclude over nodes; allowed = nodes not conflicting so far
        std::vector<std::pair<int, uint64_t>> stack{{0, 0}};
        while (!stack.empty()) {
            auto [i, cur] = stack.back();
            stack.pop_back();
            if (i == n) {
                masks.push_back(cur);
                continue;
            }
            stack.push_back({i + 1, cur});
            if ((adj_mask[i] & cur) == 0) stack.push_back({i + 1, cur | (1ull << i)});
        }
        return sorted_sets(masks);
    }

    // maximal independent sets = maximal "mutually non-adjacent" sets
    std::vector<uint64_t> nonadj(n);
    for (int v = 0; v < n; ++v) nonadj[v] = full & ~adj_mask[v] & ~(1ull << v);
    std::vector<uint64_t> masks;
    bron_kerbosch(0, full, 0, nonadj, masks);

    if (mode == ISMode::Maximum) {
        int best = 0;
        for (uint64_t m : masks) best = std::max(best, std::popcount(m));
        std::vector<uint64_t> keep;
        for (uint64_t m : masks)
            if (std::popcount(m) == best) keep.push_back(m);
        masks.swap(keep);
    }
    return sorted_sets(masks);
}

std::vector<std::vector<int>> maximal_cliques(const ConflictGraph& g) {
    const int n = g.n_nodes;
    if (n > kEnumCapMaximal) throw cap_exceeded("clique enumeration cap exceeded");
    if (n == 0) return {};
    std::vector<uint64_t> adj_mask(n, 0);
    for (int u = 0; u < n; ++u)
        for (int v : g.adj[u]) adj_mask[u] |= 1ull << v;
    const uint64_t full = (1ull << n) - 1;
    std::vector<uint64_t> masks;
    bron_kerbosch(0, full, 0, adj_mask, masks);
    return sorted_sets(masks);
}

std::vector<int> Partition::cardinalities() const {
    std::vector<int> out;
    for (const auto& s : sets) out.push_back(static_cast<int>(s.size()));
    return out;
}

namespace {

// Max over independent sets of sum of node weights, by branch and bound.
double max_weight_independent_set(const ConflictGraph& g, const std::vector<double>& weight,
                                  std::vector<int>& argmax) {
    const int n = g.n_nodes;
    std::vector<uint64_t> adj_mask(n, 0);
    for (int u = 0; u < n; ++u)
        for (int v : g.adj[u]) adj_mask[u] |= 1ull << v;
    std::vector<double> suffix(n + 1, 0.0);
    for (int i = n - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + weight[i];

    double best = -1.0;
    uint64_t best_mask = 0;
    // (index, chosen mask, blocked mask, value)
    struct Frame {
        int i;
        uint64_t chosen, blocked;
        double value;
    };
    std::vector<Frame> stack{{0, 0, 0, 0.0}};
    while (!stack.empty()) {
        Frame fr = stack.back();
        stack.pop_back();
        if (fr.value + suffix[fr.i] <= best) continue;
        if (fr.i == n) {
            if (fr.value > best) {
                best = fr.value;
                best_mask = fr.chosen;
            }
            continue;
        }
        uint64_t bit = 1ull << fr.i;
        stack.push_back({fr.i + 1, fr.chosen, fr.blocked, fr.value});
        if (!(fr.blocked & bit))
            stack.push_back({fr.i + 1, fr.chosen | bit, fr.blocked | adj_mask[fr.i], fr.value + weight[fr.i]});
    }
    argmax = mask_to_set(best_mask);
    return best;
}

}  // namespace

MeanValidReport check_mean_valid(const ConflictGraph& g, const Partition& partition) {
    MeanValidReport report;
    const int n = g.n_nodes;
    std::vector<int> owner(n, -1);
    int prev = n + 1;
    for (size_t s = 0; s < partition.sets.size(); ++s) {
        const auto& set = partition.sets[s];
        if (static_cast<int>(set.size()) > prev) {
            report.reason = "cardinalities not sorted descending";
            return report;
        }
        prev = static_cast<int>(set.size());
        for (int a : set) {
            if (a < 0 || a >= n || owner[a] != -1) {
                report.reason = "sets not a disjoint cover of the nodes";
                return report;
            }
            owner[a] = static_cast<int>(s);
        }
        // independent?
        for (int a : set)
            for (int b : set)
                if (a < b && g.adjacent(a, b)) {
                    report.reason = "set " + std::to_string(s + 1) + " is not independent";
                    return report;
                }
        // maximal?
        for (int v = 0; v < n; ++v) {
            if (std::find(set.begin(), set.end(), v) != set.end()) continue;
            bool blocked = false;
            for (int a : set)
                if (g.adjacent(a, v)) {
                    blocked = true;
                    break;
                }
            if (!blocked) {
                report.reason = "set " + std::to_string(s + 1) + " is not maximal (node " +
                                std::to_string(v) + " extends it)";
                return report;
            }
        }
    }
    for (int v = 0; v < n; ++v)
        if (owner[v] == -1) {
            report.reason = "node " + std::to_string(v) + " not covered";
            return report;
        }

    // The weight condition sum_s m_s(I)/M_s <= 1 for all independent sets I is
    // equivalent to the max-weight independent set (weights 1/M_s) being <= 1.
    std::vector<double> weight(n);
    for (int v = 0; v < n; ++v)
        weight[v] = 1.0 / static_cast<double>(partition.sets[owner[v]].size());
    std::vector<int> argmax;
    double best = max_weight_independent_set(g, weight, argmax);
    if (best > 1.0 + 1e-9) {
        report.reason = "independent set exceeds the mean-valid weight bound";
        report.witness = argmax;
        return report;
    }
    report.valid = true;
    return report;
}

namespace {

// Backtracking isomorphism/automorphism search. `fixed_image` optionally pins
// the image of node 0.
bool extend_mapping(const ConflictGraph& a, const ConflictGraph& b, std::vector<int>& map,
                    std::vector<char>& used, int i) {
    const int n = a.n_nodes;
    if (i == n) return true;
    for (int cand = 0; cand < n; ++cand) {
        if (used[cand] || (map[i] != -1 && map[i] != cand)) continue;
        if (a.degree(i) != b.degree(cand)) continue;
        bool ok = true;
        for (int j = 0; j < i && ok; ++j)
            if (a.adjacent(i, j) != b.adjacent(cand, map[j])) ok = false;
        if (!ok) continue;
        int saved = map[i];
        map[i] = cand;
        used[cand] = 1;
        if (extend_mapping(a, b, map, used, i + 1)) return true;
        used[cand] = 0;
        map[i] = saved;
        if (saved != -1) break;  // image was pinned; nothing else to try
    }
    return false;
}

bool isomorphic_with_pin(const ConflictGraph& a, const ConflictGraph& b, int pin_image) {
    const int n = a.n_nodes;
    std::vector<int> map(n, -1);
    std::vector<char> used(n, 0);
    if (pin_image >= 0) map[0] = pin_image;
    return extend_mapping(a, b, map, used, 0);
}

}  // namespace

bool are_isomorphic(const ConflictGraph& a, const ConflictGraph& b) {
    if (a.n_nodes != b.n_nodes) return false;
    if (a.n_nodes > kSymmetryCap) throw cap_exceeded("isomorphism check cap exceeded");
    if (a.edge_count() != b.edge_count()) return false;
    auto degs = [](const ConflictGraph& g) {
        std::vector<int> d;
        for (int v = 0; v < g.n_nodes; ++v) d.push_back(g.degree(v));
        std::sort(d.begin(), d.end());
        return d;
    };
    if (degs(a) != degs(b)) return false;
    return isomorphic_with_pin(a, b, -1);
}

bool is_vertex_transitive(const ConflictGraph& g) {
    if (g.transitive_hint.has_value()) return *g.transitive_hint;
    if (g.n_nodes > kSymmetryCap) throw cap_exceeded("vertex-transitivity check cap exceeded");
    if (g.n_nodes <= 1) return true;
    for (int b = 1; b < g.n_nodes; ++b)
        if (g.degree(0) != g.degree(b) || !isomorphic_with_pin(g, g, b)) return false;
    return true;
}

}  // namespace oligo
