#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tropfan {

struct VertexData {
    std::string id;
    int genus = 0;
    std::vector<std::string> legs;
};

struct EdgeData {
    std::string id;
    std::string from;  // reference orientation: (from, to)
    std::string to;
};

// Connected labeled multigraph with genus and leg decorations. Loops and
// parallel edges allowed. Immutable after construction.
class Graph {
public:
    Graph() = default;
    Graph(std::vector<VertexData> vertices, std::vector<EdgeData> edges);

    const std::vector<VertexData>& vertices() const { return vertices_; }
    const std::vector<EdgeData>& edges() const { return edges_; }
    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    bool has_vertex(const std::string& id) const { return vindex_.count(id) > 0; }
    bool has_edge(const std::string& id) const { return eindex_.count(id) > 0; }
    const VertexData& vertex(const std::string& id) const;
    const EdgeData& edge(const std::string& id) const;
    int vertex_index(const std::string& id) const;
    int edge_index(const std::string& id) const;

    // Loops count twice.
    int valence(const std::string& vertex_id) const;
    int leg_count(const std::string& vertex_id) const { return static_cast<int>(vertex(vertex_id).legs.size()); }
    std::vector<std::string> leg_ids() const;  // in vertex order, then per-vertex order

    long long h1() const;     // |E| - |V| + 1
    long long genus() const;  // h1 + sum of vertex genera
    bool is_stable() const;   // 2g(v) - 2 + val(v) + legs(v) > 0 at every vertex

private:
    std::vector<VertexData> vertices_;
    std::vector<EdgeData> edges_;
    std::map<std::string, int> vindex_;
    std::map<std::string, int> eindex_;
};

std::pair<long long, long long> betti_and_genus(const Graph& g);

// Edge contraction. The target vertex of a merged component is named after
// the lexicographically smallest source vertex in it.
struct Contraction {
    Graph source;
    Graph target;
    std::map<std::string, std::string> vertex_map;  // V(source) -> V(target)
    std::map<std::string, std::string> edge_map;    // defined exactly off the contracted set
    std::set<std::string> contracted;
};

Contraction contract(const Graph& g, const std::set<std::string>& edges);
// second.source must equal first.target (same ids).
Contraction compose(const Contraction& first, const Contraction& second);

// A refinement source -> target. Edge fibers are paths, stored from the
// `from` endpoint of the target edge's reference orientation to `to`.
struct Subdivision {
    Graph source;
    Graph target;
    std::set<std::string> exceptional;                            // subset of V(source)
    std::map<std::string, std::vector<std::string>> edge_fibers;  // E(target) -> path in E(source)
};

Subdivision trivial_subdivision(const Graph& g);

// At most one exceptional vertex per target edge.
bool is_quasi_stable_model(const Subdivision& s);
// Target stable and s a quasi-stable model.
bool is_quasi_stable(const Subdivision& s);

// One model per subset of E(g), in subset-lex order over the edge list; the
// trivial model comes first. On a subdivided edge e the halves are named
// e' and e'', with e' the half incident to the lexicographically smaller
// endpoint of the reference orientation, and the exceptional vertex u@e.
std::vector<Subdivision> quasi_stable_models(const Graph& g);

// Removes the exceptional vertices again, concatenating fibers; used to check
// that subdividing and stabilizing round-trips.
Graph delete_exceptional(const Subdivision& s);

}  // namespace tropfan
