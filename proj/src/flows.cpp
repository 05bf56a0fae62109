#include "tropfan/flows.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace tropfan {

namespace {

struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Digraph on the quotient by slope-0 edges, arcs oriented by positive slope.
bool quotient_digraph_acyclic(const Graph& g, const Flow& f) {
    const int n = g.vertex_count();
    DisjointSets ds(n);
    for (const auto& e : g.edges())
        if (f.at(e.id) == 0) ds.unite(g.vertex_index(e.from), g.vertex_index(e.to));

    std::vector<std::vector<int>> out(n);
    std::vector<int> indeg(n, 0);
    for (const auto& e : g.edges()) {
        long long s = f.at(e.id);
        if (s == 0) continue;
        int a = ds.find(g.vertex_index(e.from));
        int b = ds.find(g.vertex_index(e.to));
        if (s < 0) std::swap(a, b);
        if (a == b) return false;  // closed up into a loop
        out[a].push_back(b);
        ++indeg[b];
    }
    // Kahn
    std::vector<int> queue;
    for (int v = 0; v < n; ++v)
        if (ds.find(v) == v && indeg[v] == 0) queue.push_back(v);
    int seen = 0, roots = 0;
    for (int v = 0; v < n; ++v)
        if (ds.find(v) == v) ++roots;
    while (!queue.empty()) {
        int v = queue.back();
        queue.pop_back();
        ++seen;
        for (int w : out[v])
            if (--indeg[w] == 0) queue.push_back(w);
    }
    return seen == roots;
}

}  // namespace

Divisor div_of_flow(const Graph& g, const Flow& f) {
    for (const auto& [e, _] : f.slope) (void)g.edge(e);
    Divisor d;
    for (const auto& v : g.vertices()) d.values[v.id] = 0;
    for (const auto& e : g.edges()) {
        long long s = f.at(e.id);
        d.values[e.to] += s;
        d.values[e.from] -= s;
    }
    return d.normalized();
}

std::vector<Flow> cycle_basis(const Graph& g) {
    const int n = g.vertex_count();
    std::vector<int> parent_edge(n, -1), parent_vertex(n, -1), depth(n, -1);
    std::vector<bool> in_tree(g.edge_count(), false);

    // BFS spanning tree from the first vertex, edges scanned in list order.
    std::vector<int> queue = {0};
    depth[0] = 0;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        int v = queue[qi];
        for (int ei = 0; ei < g.edge_count(); ++ei) {
            const auto& e = g.edges()[ei];
            int a = g.vertex_index(e.from), b = g.vertex_index(e.to);
            int other = -1;
            if (a == v) other = b;
            else if (b == v) other = a;
            else continue;
            if (other == v || depth[other] >= 0) continue;
            in_tree[ei] = true;
            parent_edge[other] = ei;
            parent_vertex[other] = v;
            depth[other] = depth[v] + 1;
            queue.push_back(other);
        }
    }

    std::vector<Flow> basis;
    for (int ei = 0; ei < g.edge_count(); ++ei) {
        if (in_tree[ei]) continue;
        const auto& e = g.edges()[ei];
        Flow f;
        f.slope[e.id] = 1;
        // Close the cycle with the tree path from `to` back to `from`.
        int a = g.vertex_index(e.from), b = g.vertex_index(e.to);
        while (a != b) {
            bool move_b = depth[b] >= depth[a];
            int* walker = move_b ? &b : &a;
            const auto& pe = g.edges()[parent_edge[*walker]];
            bool ref_points_down = g.vertex_index(pe.to) == *walker;
            // Walking b up traverses child -> parent; walking a up is the
            // reverse of the cycle direction there.
            long long val = move_b == ref_points_down ? -1 : 1;
            f.slope[pe.id] += val;
            *walker = parent_vertex[*walker];
        }
        basis.push_back(f.normalized());
    }
    return basis;
}

bool is_acyclic(const Graph& g, const Flow& f) { return quotient_digraph_acyclic(g, f); }

std::vector<Flow> enumerate_acyclic_flows(const Graph& g, const Divisor& target) {
    for (const auto& [v, _] : target.values) (void)g.vertex(v);
    if (target.degree() != 0) throw std::invalid_argument("enumerate_acyclic_flows: target degree must be 0");

    long long bound = 0;
    for (const auto& [_, x] : target.values) bound += std::max(0LL, x);

    const int m = g.edge_count();
    const int n = g.vertex_count();
    std::vector<long long> want(n);
    for (int v = 0; v < n; ++v) want[v] = target.at(g.vertices()[v].id);

    // Remaining incident edge slots per vertex, for balance pruning.
    std::vector<int> remaining(n, 0);
    for (const auto& e : g.edges()) {
        ++remaining[g.vertex_index(e.from)];
        ++remaining[g.vertex_index(e.to)];
    }

    std::vector<long long> ord(n, 0), slopes(m, 0);
    std::vector<Flow> out;

    std::function<void(int)> rec = [&](int ei) {
        if (ei == m) {
            for (int v = 0; v < n; ++v)
                if (ord[v] != want[v]) return;
            Flow f;
            for (int i = 0; i < m; ++i)
                if (slopes[i] != 0) f.slope[g.edges()[i].id] = slopes[i];
            if (is_acyclic(g, f)) out.push_back(std::move(f));
            return;
        }
        const auto& e = g.edges()[ei];
        int a = g.vertex_index(e.from), b = g.vertex_index(e.to);
        bool loop = a == b;
        --remaining[a];
        --remaining[b];
        long long lo = loop ? 0 : -bound, hi = loop ? 0 : bound;
        for (long long s = lo; s <= hi; ++s) {
            ord[a] -= s;
            ord[b] += s;
            slopes[ei] = s;
            bool feasible = true;
            for (int v : {a, b})
                if (std::llabs(ord[v] - want[v]) > bound * remaining[v]) feasible = false;
            if (feasible) rec(ei + 1);
            ord[a] += s;
            ord[b] -= s;
        }
        slopes[ei] = 0;
        ++remaining[a];
        ++remaining[b];
    };
    rec(0);
    std::sort(out.begin(), out.end());
    return out;
}

FlowPartialOrder flow_partial_order(const Graph& g, const Flow& f) {
    if (!is_acyclic(g, f)) throw std::invalid_argument("flow_partial_order: flow is cyclic");
    FlowPartialOrder po;
    std::set<std::string> vs;
    for (const auto& e : g.edges()) {
        if (f.at(e.id) == 0) continue;
        vs.insert(e.from);
        vs.insert(e.to);
    }
    po.vertices.assign(vs.begin(), vs.end());

    for (const auto& e : g.edges()) {
        long long s = f.at(e.id);
        if (s > 0) po.less.insert({e.from, e.to});
        if (s < 0) po.less.insert({e.to, e.from});
    }
    // Transitive closure (Floyd-Warshall style over the small vertex set).
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [a, b] : std::set<std::pair<std::string, std::string>>(po.less))
            for (const auto& [c, d] : std::set<std::pair<std::string, std::string>>(po.less))
                if (b == c && !po.less.count({a, d})) {
                    po.less.insert({a, d});
                    changed = true;
                }
    }
    return po;
}

std::pair<Subdivision, Flow> minimal_model(const Subdivision& s, const Flow& flow_on_source) {
    Divisor ord = div_of_flow(s.source, flow_on_source);
    std::set<std::string> keep;
    for (const auto& u : s.exceptional)
        if (ord.at(u) != 0) keep.insert(u);

    Subdivision t;
    t.target = s.target;
    t.exceptional = keep;
    Flow g;

    std::vector<VertexData> verts;
    for (const auto& v : s.source.vertices())
        if (!s.exceptional.count(v.id) || keep.count(v.id)) verts.push_back(v);

    std::vector<EdgeData> edges;
    for (const auto& e : s.target.edges()) {
        const auto& fiber = s.edge_fibers.at(e.id);
        std::vector<std::string> new_fiber;
        size_t i = 0;
        while (i < fiber.size()) {
            // Merge a maximal run of pieces joined at dropped vertices.
            size_t j = i;
            while (j + 1 < fiber.size()) {
                const std::string& mid = s.source.edge(fiber[j]).to;
                if (keep.count(mid)) break;
                ++j;
            }
            std::string from = s.source.edge(fiber[i]).from;
            std::string to = s.source.edge(fiber[j]).to;
            std::string id = (i == 0 && j + 1 == fiber.size()) ? e.id : fiber[i];
            edges.push_back({id, from, to});
            new_fiber.push_back(id);
            g.slope[id] = flow_on_source.at(fiber[i]);  // equal along the run since ord = 0 inside
            i = j + 1;
        }
        t.edge_fibers[e.id] = new_fiber;
    }
    t.source = Graph(std::move(verts), std::move(edges));
    return {t, g.normalized()};
}

Divisor a_divisor(const Graph& g, const std::map<std::string, long long>& a_by_leg, long long k) {
    std::set<std::string> legs_seen;
    for (const auto& v : g.vertices())
        for (const auto& leg : v.legs) legs_seen.insert(leg);
    long long total = 0;
    for (const auto& [leg, a] : a_by_leg) {
        if (!legs_seen.count(leg)) throw std::invalid_argument("a_divisor: unknown leg " + leg);
        total += a;
    }
    if (legs_seen.size() != a_by_leg.size()) throw std::invalid_argument("a_divisor: missing leg value");
    if (total != k * (2 * g.genus() - 2))
        throw std::invalid_argument("a_divisor: sum(a) must equal k(2g-2)");

    Divisor d;
    for (const auto& v : g.vertices()) {
        long long x = k * (2LL * v.genus - 2 + g.valence(v.id));
        for (const auto& leg : v.legs) x += a_by_leg.at(leg);
        d.values[v.id] = x;
    }
    return d.normalized();
}

Divisor specialize_divisor(const Divisor& d, const Contraction& c) {
    Divisor out;
    for (const auto& [v, x] : d.values) out.values[c.vertex_map.at(v)] += x;
    return out.normalized();
}

Flow specialize_flow(const Flow& f, const Contraction& c) {
    Flow out;
    for (const auto& [e, s] : f.slope) {
        auto it = c.edge_map.find(e);
        if (it != c.edge_map.end()) out.slope[it->second] = s;
    }
    return out.normalized();
}

}  // namespace tropfan
