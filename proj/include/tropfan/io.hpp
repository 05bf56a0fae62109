#pragma once

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

#include "tropfan/fan.hpp"
#include "tropfan/oracle.hpp"

namespace tropfan {

using json = nlohmann::json;

// Input problem: graph, ramification vector A (by leg), twist k, and an
// exact rational stability condition, validated generic on load.
struct ProblemSpec {
    Graph graph;
    std::map<std::string, long long> a_by_leg;
    long long k = 0;
    StabilityCondition theta;

    Divisor a() const { return a_divisor(graph, a_by_leg, k); }
};

ProblemSpec problem_from_json(const json& j);
json problem_to_json(const ProblemSpec& p);
ProblemSpec load_problem_file(const std::string& path);

// Flow census (Step 1): every (model, D, flow) triple in deterministic order.
json flows_document(const ProblemSpec& p, const Fan& fan);
std::string flows_pretty(const ProblemSpec& p, const Fan& fan);

// Full fan document; all rationals as exact strings, no floats.
json fan_document(const ProblemSpec& p, const Fan& fan, const VerificationReport* verification);
std::string fan_pretty(const json& doc);

// Cross-section of a 2- or 3-dimensional fan document with the hyperplane
// <weights, l> = 1; exact rational polygon vertices, polygons ordered as the
// cones are.
json slice_document(const json& fan_doc, const std::vector<Rat>& weights);
std::string slice_svg(const json& slice_doc);

// Small generic theta with the requested sign pattern ('+'/'-' per vertex in
// graph order) and total equal to deg A; throws when the search fails.
StabilityCondition suggest_theta(const Graph& g, const std::string& signs, const Rat& total);

json report_to_json(const VerificationReport& r);

}  // namespace tropfan
