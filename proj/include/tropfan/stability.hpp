#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tropfan/flows.hpp"
#include "tropfan/graph.hpp"
#include "tropfan/rational.hpp"

namespace tropfan {

// Rational vertex weights theta.
struct StabilityCondition {
    std::map<std::string, Rat> values;

    Rat at(const std::string& v) const {
        auto it = values.find(v);
        return it == values.end() ? Rat(0) : it->second;
    }
    Rat total() const {
        Rat t = 0;
        for (const auto& [_, x] : values) t += x;
        return t;
    }
};

// Number of edges with exactly one endpoint in S (loops never cross).
long long cut_size(const Graph& g, const std::set<std::string>& S);

// theta(S) +- cut/2 non-integral for every nonempty proper vertex subset S.
bool is_generic(const Graph& g, const StabilityCondition& theta);

// Extend by 0 on exceptional vertices.
StabilityCondition lift_to_model(const Subdivision& model, const StabilityCondition& theta);

// Value 1 on every exceptional vertex.
bool is_admissible(const Subdivision& model, const Divisor& d);

// Sandwich theta(S) - cut/2 <= D(S) <= theta(S) + cut/2 over all nonempty
// proper S in V(source); stable requires strict inequalities. theta is given
// on the base graph and lifted by 0. On a subdivided model d must be
// admissible.
bool is_semistable(const Subdivision& model, const Divisor& d, const StabilityCondition& theta);
bool is_stable_divisor(const Subdivision& model, const Divisor& d, const StabilityCondition& theta);

// Complete list of admissible theta-semistable divisors of the given degree,
// in lex order. Requires theta generic on the base graph.
std::vector<Divisor> enumerate_theta_divisors(const Subdivision& model, const StabilityCondition& theta,
                                              long long degree);

StabilityCondition specialize_theta(const StabilityCondition& theta, const Contraction& c);

}  // namespace tropfan
