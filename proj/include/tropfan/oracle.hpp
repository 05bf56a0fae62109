#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tropfan/fan.hpp"

namespace tropfan {

// Brute-force evaluation of one (model, D, flow) triple at a base length
// vector, independent of the cone machinery: solves the cycle equations
// directly for the piece lengths and reads the PL function off path sums.
struct TripleAtPoint {
    bool feasible = false;                  // the flow lifts at this point
    std::map<std::string, Rat> lengths;     // model-source edge lengths
    std::map<std::string, Rat> alpha;       // PL values, 0 at the first-leg vertex
    std::optional<Ordering> induced;        // weak order at the point
};

TripleAtPoint evaluate_triple(const Subdivision& model, const Flow& flow, const QVec& base_point);

// Compares the fan's membership tests against the direct evaluation for every
// integer point in the box: a div cone must contain the point exactly when
// the twist system is feasible; a rub cone exactly when additionally its
// ordering refines the induced weak order.
VerificationReport oracle_equivalence(const Fan& fan, long long box);

}  // namespace tropfan
