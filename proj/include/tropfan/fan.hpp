#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tropfan/cone.hpp"
#include "tropfan/flows.hpp"
#include "tropfan/graph.hpp"
#include "tropfan/linform.hpp"
#include "tropfan/stability.hpp"

namespace tropfan {

// Coordinate name of an edge length: e7 -> l7, e7' -> l7', otherwise l_<id>.
std::string coord_name(const std::string& edge_id);
std::vector<std::string> base_coords(const Graph& g);
std::vector<std::string> extended_coords(const Graph& source);

// <s,t> = sum over edges of s(e) t(e) l_e; bilinear, symmetric.
LinearForm intersection_pairing(const Graph& g, const Flow& s, const Flow& t,
                                const std::map<std::string, LinearForm>& lengths);

// Path-sum values of the PL function lifting `flow`, as forms in the source
// edge coordinates, normalized to 0 at `root`. Well defined on the twist cone.
std::map<std::string, LinearForm> alpha_forms(const Graph& g, const Flow& flow, const std::string& root);

// Vertex carrying the lexicographically smallest leg.
std::string first_leg_vertex(const Graph& g);
// Lowest-id source of the flow order (fallback: lowest-id vertex).
std::string min_source_vertex(const Graph& g, const Flow& flow);

// Lengths for which the flow lifts to a PL function: cycle pairings vanish.
// `extended` lives in the model-source edge coordinates, `base` is its image
// in the target edge coordinates (halves summed).
struct TwistCone {
    Cone extended;
    Cone base;
};

TwistCone twist_cone(const Subdivision& model, const Flow& flow);

// Weak total order: consecutive blocks strictly ordered, ties inside blocks.
struct Ordering {
    std::vector<std::vector<std::string>> blocks;  // each block sorted

    bool strict() const {
        for (const auto& b : blocks)
            if (b.size() != 1) return false;
        return true;
    }
    int block_of(const std::string& v) const;
    bool operator==(const Ordering& o) const { return blocks == o.blocks; }
    bool operator<(const Ordering& o) const { return blocks < o.blocks; }
    std::string str() const;
};

// All weak total orders on the vertices of non-contracted edges refining the
// flow's partial order (positive-slope edges stay strict). Strict linear
// extensions are the maximal-cone labels.
std::vector<Ordering> enumerate_orderings(const Subdivision& model, const Flow& flow);

struct OrderingCone {
    Cone extended;
    Cone base;
};

// Twist constraints plus path-sum comparisons realizing the ordering.
OrderingCone ordering_cone(const Subdivision& model, const Flow& flow, const Ordering& ordering);
// Root override for the path sums (used to check base-point independence).
OrderingCone ordering_cone_rooted(const Subdivision& model, const Flow& flow, const Ordering& ordering,
                                  const std::string& root);

// Chain with two end legs embedded in R, vertex values gamma strictly
// increasing on the carrier interior.
struct CombinatorialLine {
    std::vector<std::string> vertex_ids;
    std::vector<LinearForm> gamma;
    std::vector<LinearForm> edge_lengths;  // gamma[i+1] - gamma[i]
};

// Cell-respecting lift G'' -> X of the flow realizing an ordering.
struct EquidimensionalLift {
    Subdivision refinement;                       // G'' over the model source
    CombinatorialLine line;                       // X
    std::map<std::string, int> vertex_to_line;    // V(G'') -> vertex index of X
    std::map<std::string, int> edge_to_line;      // E(G'') -> edge index of X; -1 for contracted
    std::map<std::string, LinearForm> positions;  // new vertex -> distance from the reference tail
    Flow flow_on_refinement;
};

// Requires carrier = ordering_cone(model, flow, ordering).base. Subdivides
// every non-contracted edge at the strictly intermediate block levels; the
// positions (gamma_block - alpha(tail))/slope may be non-integral forms.
EquidimensionalLift equidimensional_lift(const Subdivision& model, const Flow& flow, const Ordering& ordering,
                                         const Cone& carrier);

// Sublattice of Z^{E(base)} generated by the carrier's primitive rays, with
// the Step-5 cross-check: for each primitive ray x the minimal k making all
// lift positions integral at kx must give back the same lattice.
Sublattice rub_lattice(const EquidimensionalLift& lift, const Cone& carrier);

struct ThetaFlow {
    int model_index = 0;
    Divisor divisor;  // on the model source
    Flow flow;        // on the model source
};

struct FanConeLabel {
    int triple_index = -1;
    std::optional<Ordering> ordering;  // set on rub cones
};

struct FanCone {
    Cone cone;                         // base coordinates
    std::optional<Cone> extended;      // model-source coordinates, labeled cones only
    std::vector<FanConeLabel> labels;  // empty = derived face
    bool maximal = false;
    std::optional<EquidimensionalLift> lift;
    std::optional<Sublattice> lattice;
};

struct Fan {
    Graph base;
    Divisor a;
    StabilityCondition theta;
    std::vector<Subdivision> models;
    std::vector<ThetaFlow> triples;
    std::vector<FanCone> cones;                   // labeled cones plus full face closure
    std::vector<std::pair<int, int>> face_pairs;  // (i, j): cone i is a proper face of cone j
    bool rub = false;

    const Subdivision& model_of(const ThetaFlow& t) const { return models[t.model_index]; }
};

// Steps 1-2: one labeled cone per (quasi-stable model, admissible
// theta-semistable divisor, acyclic flow with div = A - D), plus all faces.
// skip_triple (when >= 0) drops that triple; negative-control hook.
Fan build_div_fan(const Graph& g, const Divisor& a, const StabilityCondition& theta, int skip_triple = -1);

// Steps 1-5: refines each div cone by its ordering cells; every maximal cone
// carries a lift and its sublattice and must be simplicial and unimodular
// against it.
Fan build_rub_fan(const Graph& g, const Divisor& a, const StabilityCondition& theta, int skip_triple = -1);

struct CheckResult {
    std::string name;
    bool pass = true;
    std::string witness;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    long long box = 0;
    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// (i) structural: every listed cone is a face of a maximal one, face closures
// are listed, maximal pairwise intersections are listed common faces;
// (ii) box scan: every integer point lies in some maximal cone, in exactly
// one maximal relative interior, or on a listed shared face;
// (iii) dimensions consistent.
VerificationReport verify_subdivision(const Fan& fan, long long box);

// Universal-family cones of the flow: per vertex the twist cone itself, per
// edge the cone with that edge split into two halves carrying the same slope.
struct UniversalFamilyCone {
    std::string cell;  // vertex or edge id of the base graph
    bool is_edge = false;
    Cone cone;
};
std::vector<UniversalFamilyCone> universal_family_cones(const Graph& g, const Flow& flow);

// Weak order induced on the flow-relevant vertices by a point of the twist
// cone (used for canonical labels and by callers of the oracle).
Ordering induced_ordering(const Subdivision& model, const Flow& flow, const std::map<std::string, Rat>& alpha_values);

// True when `fine` refines `coarse`: same vertex set, every block of `fine`
// inside one block of `coarse`, monotonically.
bool refines(const Ordering& fine, const Ordering& coarse);

}  // namespace tropfan
