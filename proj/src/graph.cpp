#include "tropfan/graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace tropfan {

namespace {

// Union-find over vertex indices.
struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Graph::Graph(std::vector<VertexData> vertices, std::vector<EdgeData> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    if (vertices_.empty()) throw std::invalid_argument("graph needs at least one vertex");
    std::set<std::string> seen;
    for (int i = 0; i < static_cast<int>(vertices_.size()); ++i) {
        const auto& v = vertices_[i];
        if (v.genus < 0) throw std::invalid_argument("negative genus at " + v.id);
        if (!vindex_.emplace(v.id, i).second) throw std::invalid_argument("duplicate vertex id " + v.id);
        if (!seen.insert(v.id).second) throw std::invalid_argument("duplicate id " + v.id);
        for (const auto& leg : v.legs)
            if (!seen.insert(leg).second) throw std::invalid_argument("duplicate id " + leg);
    }
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
        const auto& e = edges_[i];
        if (!vindex_.count(e.from) || !vindex_.count(e.to))
            throw std::invalid_argument("edge " + e.id + " has unknown endpoint");
        if (!eindex_.emplace(e.id, i).second) throw std::invalid_argument("duplicate edge id " + e.id);
        if (!seen.insert(e.id).second) throw std::invalid_argument("duplicate id " + e.id);
    }
    DisjointSets ds(vertex_count());
    for (const auto& e : edges_) ds.unite(vindex_.at(e.from), vindex_.at(e.to));
    for (int i = 1; i < vertex_count(); ++i)
        if (ds.find(i) != ds.find(0)) throw std::invalid_argument("graph is not connected");
}

const VertexData& Graph::vertex(const std::string& id) const {
    auto it = vindex_.find(id);
    if (it == vindex_.end()) throw std::invalid_argument("unknown vertex id " + id);
    return vertices_[it->second];
}

const EdgeData& Graph::edge(const std::string& id) const {
    auto it = eindex_.find(id);
    if (it == eindex_.end()) throw std::invalid_argument("unknown edge id " + id);
    return edges_[it->second];
}

int Graph::vertex_index(const std::string& id) const {
    auto it = vindex_.find(id);
    if (it == vindex_.end()) throw std::invalid_argument("unknown vertex id " + id);
    return it->second;
}

int Graph::edge_index(const std::string& id) const {
    auto it = eindex_.find(id);
    if (it == eindex_.end()) throw std::invalid_argument("unknown edge id " + id);
    return it->second;
}

int Graph::valence(const std::string& vertex_id) const {
    (void)vertex(vertex_id);
    int val = 0;
    for (const auto& e : edges_) {
        if (e.from == vertex_id) ++val;
        if (e.to == vertex_id) ++val;
    }
    return val;
}

std::vector<std::string> Graph::leg_ids() const {
    std::vector<std::string> out;
    for (const auto& v : vertices_)
        for (const auto& leg : v.legs) out.push_back(leg);
    return out;
}

long long Graph::h1() const { return static_cast<long long>(edge_count()) - vertex_count() + 1; }

long long Graph::genus() const {
    long long g = h1();
    for (const auto& v : vertices_) g += v.genus;
    return g;
}

bool Graph::is_stable() const {
    for (const auto& v : vertices_)
        if (2LL * v.genus - 2 + valence(v.id) + static_cast<long long>(v.legs.size()) <= 0) return false;
    return true;
}

std::pair<long long, long long> betti_and_genus(const Graph& g) { return {g.h1(), g.genus()}; }

Contraction contract(const Graph& g, const std::set<std::string>& edges) {
    for (const auto& id : edges) (void)g.edge(id);

    DisjointSets ds(g.vertex_count());
    for (const auto& id : edges) {
        const auto& e = g.edge(id);
        ds.unite(g.vertex_index(e.from), g.vertex_index(e.to));
    }

    // Component representative: lexicographically smallest member id.
    std::map<int, std::string> rep;
    for (const auto& v : g.vertices()) {
        int root = ds.find(g.vertex_index(v.id));
        auto it = rep.find(root);
        if (it == rep.end() || v.id < it->second) rep[root] = v.id;
    }

    Contraction c;
    c.source = g;
    c.contracted = edges;
    for (const auto& v : g.vertices()) c.vertex_map[v.id] = rep.at(ds.find(g.vertex_index(v.id)));

    // Target genus per component: sum of genera plus h1 of the contracted piece.
    std::map<std::string, int> genus_of, contracted_edges_of, member_count;
    std::map<std::string, std::vector<std::string>> legs_of;
    std::vector<std::string> target_order;  // first-occurrence order
    for (const auto& v : g.vertices()) {
        const std::string& t = c.vertex_map.at(v.id);
        if (!genus_of.count(t)) {
            genus_of[t] = 0;
            contracted_edges_of[t] = 0;
            member_count[t] = 0;
            target_order.push_back(t);
        }
        genus_of[t] += v.genus;
        member_count[t] += 1;
        for (const auto& leg : v.legs) legs_of[t].push_back(leg);
    }
    for (const auto& id : edges) contracted_edges_of[c.vertex_map.at(g.edge(id).from)] += 1;

    std::vector<VertexData> tverts;
    for (const auto& t : target_order) {
        int h1_piece = contracted_edges_of[t] - member_count[t] + 1;
        tverts.push_back({t, genus_of[t] + h1_piece, legs_of[t]});
    }
    std::vector<EdgeData> tedges;
    for (const auto& e : g.edges()) {
        if (edges.count(e.id)) continue;
        tedges.push_back({e.id, c.vertex_map.at(e.from), c.vertex_map.at(e.to)});
        c.edge_map[e.id] = e.id;
    }
    c.target = Graph(std::move(tverts), std::move(tedges));
    return c;
}

Contraction compose(const Contraction& first, const Contraction& second) {
    Contraction c;
    c.source = first.source;
    c.target = second.target;
    for (const auto& [v, mid] : first.vertex_map) c.vertex_map[v] = second.vertex_map.at(mid);
    c.contracted = first.contracted;
    for (const auto& [e, mid] : first.edge_map) {
        if (second.contracted.count(mid))
            c.contracted.insert(e);
        else
            c.edge_map[e] = second.edge_map.at(mid);
    }
    return c;
}

Subdivision trivial_subdivision(const Graph& g) {
    Subdivision s;
    s.source = g;
    s.target = g;
    for (const auto& e : g.edges()) s.edge_fibers[e.id] = {e.id};
    return s;
}

bool is_quasi_stable_model(const Subdivision& s) {
    std::map<std::string, int> on_edge;
    for (const auto& [e, fiber] : s.edge_fibers) on_edge[e] = static_cast<int>(fiber.size()) - 1;
    for (const auto& [e, n] : on_edge)
        if (n > 1) return false;
    for (const auto& u : s.exceptional) {
        const auto& v = s.source.vertex(u);
        if (v.genus != 0 || !v.legs.empty() || s.source.valence(u) != 2) return false;
    }
    return true;
}

bool is_quasi_stable(const Subdivision& s) { return s.target.is_stable() && is_quasi_stable_model(s); }

std::vector<Subdivision> quasi_stable_models(const Graph& g) {
    const int m = g.edge_count();
    std::vector<Subdivision> out;
    for (unsigned long mask = 0; mask < (1UL << m); ++mask) {
        Subdivision s;
        s.target = g;
        std::vector<VertexData> verts = g.vertices();
        std::vector<EdgeData> edges;
        for (int i = 0; i < m; ++i) {
            const EdgeData& e = g.edges()[i];
            if (!(mask >> i & 1)) {
                edges.push_back(e);
                s.edge_fibers[e.id] = {e.id};
                continue;
            }
            std::string u = "u@" + e.id;
            std::string first = e.id + "'", second = e.id + "''";
            if (e.to < e.from) std::swap(first, second);  // e' sits at the lex-smaller endpoint
            verts.push_back({u, 0, {}});
            s.exceptional.insert(u);
            edges.push_back({first, e.from, u});
            edges.push_back({second, u, e.to});
            s.edge_fibers[e.id] = {first, second};
        }
        s.source = Graph(std::move(verts), std::move(edges));
        out.push_back(std::move(s));
    }
    return out;
}

Graph delete_exceptional(const Subdivision& s) {
    std::vector<VertexData> verts;
    for (const auto& v : s.source.vertices())
        if (!s.exceptional.count(v.id)) verts.push_back(v);
    std::vector<EdgeData> edges;
    for (const auto& e : s.target.edges()) {
        const auto& fiber = s.edge_fibers.at(e.id);
        if (fiber.empty()) throw std::logic_error("empty edge fiber for " + e.id);
        // Pieces are oriented along the path, so the outer endpoints are the
        // target endpoints.
        edges.push_back({e.id, s.source.edge(fiber.front()).from, s.source.edge(fiber.back()).to});
    }
    return Graph(std::move(verts), std::move(edges));
}

}  // namespace tropfan
