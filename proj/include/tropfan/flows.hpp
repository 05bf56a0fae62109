#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tropfan/graph.hpp"

namespace tropfan {

// Formal Z-combination of vertices; zero values may be omitted.
struct Divisor {
    std::map<std::string, long long> values;

    long long at(const std::string& v) const {
        auto it = values.find(v);
        return it == values.end() ? 0 : it->second;
    }
    long long degree() const {
        long long d = 0;
        for (const auto& [_, x] : values) d += x;
        return d;
    }
    Divisor normalized() const {
        Divisor d;
        for (const auto& [v, x] : values)
            if (x != 0) d.values[v] = x;
        return d;
    }
    bool operator==(const Divisor& o) const { return normalized().values == o.normalized().values; }
    bool operator<(const Divisor& o) const { return normalized().values < o.normalized().values; }
};

// Integer slopes on the reference orientation; the reversed orientation
// carries the negated value.
struct Flow {
    std::map<std::string, long long> slope;

    long long at(const std::string& e) const {
        auto it = slope.find(e);
        return it == slope.end() ? 0 : it->second;
    }
    Flow normalized() const {
        Flow f;
        for (const auto& [e, s] : slope)
            if (s != 0) f.slope[e] = s;
        return f;
    }
    bool operator==(const Flow& o) const { return normalized().slope == o.normalized().slope; }
    bool operator<(const Flow& o) const { return normalized().slope < o.normalized().slope; }
};

// ord_v = sum of slopes on edges oriented into v; total degree 0.
Divisor div_of_flow(const Graph& g, const Flow& f);

// h1 spanning-tree fundamental cycles, slopes in {-1,0,1}, each with zero divisor.
std::vector<Flow> cycle_basis(const Graph& g);

// Acyclic after contracting the slope-0 edges (contracting, not deleting:
// zero edges merge their endpoints, which can close up a cycle).
bool is_acyclic(const Graph& g, const Flow& f);

// Complete list of acyclic flows with div = target, deg(target) = 0 required.
// Slopes are bounded by P = sum of the positive part of target; loops are
// fixed to slope 0. Deterministic lex order over the edge list.
std::vector<Flow> enumerate_acyclic_flows(const Graph& g, const Divisor& target);

struct FlowPartialOrder {
    std::vector<std::string> vertices;  // endpoints of non-contracted edges, sorted
    std::set<std::pair<std::string, std::string>> less;  // transitive closure

    bool is_less(const std::string& v, const std::string& w) const { return less.count({v, w}) > 0; }
    bool comparable(const std::string& v, const std::string& w) const {
        return v == w || is_less(v, w) || is_less(w, v);
    }
};

// Requires is_acyclic(g, f).
FlowPartialOrder flow_partial_order(const Graph& g, const Flow& f);

// Keeps exactly the exceptional vertices with ord != 0; the flow descends.
std::pair<Subdivision, Flow> minimal_model(const Subdivision& s, const Flow& flow_on_source);

// value(v) = sum of a_i over legs at v, plus k(2g(v) - 2 + val(v)).
// Requires sum(a) = k(2 genus - 2).
Divisor a_divisor(const Graph& g, const std::map<std::string, long long>& a_by_leg, long long k);

Divisor specialize_divisor(const Divisor& d, const Contraction& c);
Flow specialize_flow(const Flow& f, const Contraction& c);

}  // namespace tropfan
