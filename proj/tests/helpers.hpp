#pragma once

#include <random>
#include <string>
#include <vector>

#include "tropfan/flows.hpp"
#include "tropfan/graph.hpp"
#include "tropfan/stability.hpp"

namespace tf = tropfan;

// The triangular graph of the worked example: v1 (marking a1 = -4), v2 on the
// right (a3 = 1), v3 on top (a2 = 3); e1: v1-v2, e2: v1-v3, e3: v2-v3.
inline tf::Graph triangle() {
    return tf::Graph({{"v1", 0, {"h1"}}, {"v2", 0, {"h3"}}, {"v3", 0, {"h2"}}},
                     {{"e1", "v1", "v2"}, {"e2", "v1", "v3"}, {"e3", "v2", "v3"}});
}

inline tf::Divisor triangle_a() {
    return tf::a_divisor(triangle(), {{"h1", -4}, {"h2", 3}, {"h3", 1}}, 0);
}

inline tf::StabilityCondition triangle_theta() {
    tf::StabilityCondition t;
    t.values["v1"] = tf::parse_rat("-1/4");
    t.values["v2"] = tf::parse_rat("1/8");
    t.values["v3"] = tf::parse_rat("1/8");
    return t;
}

inline tf::Flow make_flow(std::initializer_list<std::pair<const char*, long long>> slopes) {
    tf::Flow f;
    for (const auto& [e, s] : slopes)
        if (s != 0) f.slope[e] = s;
    return f;
}

inline tf::Divisor make_divisor(std::initializer_list<std::pair<const char*, long long>> values) {
    tf::Divisor d;
    for (const auto& [v, x] : values)
        if (x != 0) d.values[v] = x;
    return d;
}

// Random connected multigraph with <= max_v vertices, <= max_e edges, padded
// with genus and legs until stable. Biased towards several vertices and at
// least two legs so the ramification vector can be nontrivial.
inline tf::Graph random_stable_graph(std::mt19937& rng, int max_v = 4, int max_e = 5) {
    std::uniform_int_distribution<int> nv_dist(std::min(2, max_v), max_v);
    int nv = rng() % 8 == 0 ? 1 : nv_dist(rng);
    int min_e = nv - 1;
    std::uniform_int_distribution<int> ne_dist(min_e, max_e);
    int ne = std::max(min_e, ne_dist(rng));

    std::vector<tf::VertexData> verts;
    for (int i = 0; i < nv; ++i) verts.push_back({"v" + std::to_string(i + 1), 0, {}});
    std::vector<tf::EdgeData> edges;
    // spanning tree first
    for (int i = 1; i < nv; ++i) {
        std::uniform_int_distribution<int> pick(0, i - 1);
        edges.push_back({"e" + std::to_string(edges.size() + 1), verts[pick(rng)].id, verts[i].id});
    }
    std::uniform_int_distribution<int> anyv(0, nv - 1);
    while (static_cast<int>(edges.size()) < ne) {
        int a = anyv(rng), b = anyv(rng);
        if (a == b && (nv == 1 || rng() % 4 != 0)) {
            if (nv > 1) continue;  // loops occasionally, except on a lone vertex
        }
        if (a > b) std::swap(a, b);
        edges.push_back({"e" + std::to_string(edges.size() + 1), verts[a].id, verts[b].id});
    }

    // decorate until stable, with at least two legs overall
    tf::Graph g(verts, edges);
    int next_leg = 1;
    for (auto& v : verts) {
        int r = static_cast<int>(rng() % 4);
        v.genus = r >= 2 ? r - 1 : 0;
        while (2 * v.genus - 2 + g.valence(v.id) + static_cast<int>(v.legs.size()) <= 0)
            v.legs.push_back("h" + std::to_string(next_leg++));
    }
    while (next_leg <= 2) verts[rng() % nv].legs.push_back("h" + std::to_string(next_leg++));
    return tf::Graph(verts, edges);
}

// Degree-0 ramification vector on the graph's legs, nonzero when possible.
inline std::map<std::string, long long> random_a(std::mt19937& rng, const tf::Graph& g) {
    std::uniform_int_distribution<long long> val(-3, 3);
    auto legs = g.leg_ids();
    for (int attempt = 0; attempt < 50; ++attempt) {
        std::map<std::string, long long> a;
        long long sum = 0;
        for (size_t i = 0; i + 1 < legs.size(); ++i) {
            a[legs[i]] = val(rng);
            sum += a[legs[i]];
        }
        a[legs.back()] = -sum;
        bool nonzero = false;
        for (const auto& [_, x] : a) nonzero |= x != 0;
        if (nonzero || legs.size() < 2) return a;
    }
    return {{legs.front(), 0}};
}

// Random generic theta with total 0 (rejection sampling).
inline tf::StabilityCondition random_generic_theta(std::mt19937& rng, const tf::Graph& g) {
    std::uniform_int_distribution<long long> num(-9, 9);
    for (int attempt = 0; attempt < 2000; ++attempt) {
        tf::StabilityCondition theta;
        long long sum = 0;
        const auto& vs = g.vertices();
        for (size_t i = 0; i + 1 < vs.size(); ++i) {
            long long x = num(rng);
            theta.values[vs[i].id] = tf::rat_of(x, 16);
            sum += x;
        }
        theta.values[vs.back().id] = tf::rat_of(-sum, 16);
        if (tf::is_generic(g, theta)) return theta;
    }
    throw std::runtime_error("no generic theta found");
}
