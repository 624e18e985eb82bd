#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <optional>
#include <string>
#include <vector>

namespace oligo {

// Undirected conflict graph. Node ids are dense 0..N-1; `label` carries the
// original ids through restriction so strategies map back to locations.
struct ConflictGraph {
    int n_nodes = 0;
    std::vector<std::vector<int>> adj;  // sorted neighbor lists
    std::vector<int> label;
    // Set by generators whose symmetry is known by construction.
    std::optional<bool> transitive_hint;

    bool adjacent(int u, int v) const;
    int degree(int v) const { return static_cast<int>(adj[v].size()); }
    int max_degree() const;
    int edge_count() const;
    std::vector<std::pair<int, int>> edges() const;

    static ConflictGraph empty(int n);
    static ConflictGraph linear(int n);
    static ConflictGraph cycle(int n);
    static ConflictGraph king_grid(int k);  // k x k, 8-neighborhood
    static ConflictGraph complete(int n);
    static ConflictGraph circulant(int n, const std::vector<int>& hops);
    static ConflictGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges);
    // One "u v" pair per line, 0-indexed; node count = max id + 1 unless given.
    static ConflictGraph parse_edge_list(std::istream& in, int n_nodes = -1);
};

// Induced subgraph on nodes with state >= 1.
ConflictGraph restrict_graph(const ConflictGraph& g, const std::vector<int>& states);
ConflictGraph restrict_graph(const ConflictGraph& g, uint32_t available_mask);

std::vector<std::vector<int>> components(const ConflictGraph& g);

enum class ISMode { All, Maximal, Maximum };

inline constexpr int kEnumCapMaximal = 25;
inline constexpr int kEnumCapAll = 20;

struct cap_exceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact enumeration, deterministic lexicographic order. `All` includes the
// empty set.
std::vector<std::vector<int>> independent_sets(const ConflictGraph& g, ISMode mode);

// Maximal cliques (used for clique-factored state models).
std::vector<std::vector<int>> maximal_cliques(const ConflictGraph& g);

struct Partition {
    std::vector<std::vector<int>> sets;  // cardinalities sorted descending
    std::vector<int> cardinalities() const;
};

struct MeanValidReport {
    bool valid = false;
    std::string reason;
    std::vector<int> witness;  // independent set violating the weight bound
};

// A partition into disjoint maximal independent sets I_1..I_d is accepted iff
// every independent set I satisfies sum_s m_s(I)/M_s <= 1.
MeanValidReport check_mean_valid(const ConflictGraph& g, const Partition& partition);

inline constexpr int kSymmetryCap = 10;

bool are_isomorphic(const ConflictGraph& a, const ConflictGraph& b);
bool is_vertex_transitive(const ConflictGraph& g);

}  // namespace oligo
