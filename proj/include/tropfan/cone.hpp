#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tropfan/linalg.hpp"
#include "tropfan/linform.hpp"

namespace tropfan {

// Rational polyhedral cone inside the nonnegative orthant of its named
// coordinate space. Both descriptions are kept: canonical integer constraint
// rows (equations = 0, inequalities >= 0, orthant rows included) and the
// primitive extreme rays, sorted lex. Immutable.
class Cone {
public:
    Cone() = default;

    const std::vector<std::string>& coords() const { return coords_; }
    const ZMat& equations() const { return equations_; }
    const ZMat& inequalities() const { return inequalities_; }
    const ZMat& rays() const { return rays_; }
    int dim() const { return dim_; }
    bool is_zero_cone() const { return rays_.empty(); }

    bool contains(const QVec& point) const;
    bool contains(const ZVec& point) const;
    // Relative interior: the constraints tight at the point are exactly those
    // tight on the whole cone.
    bool relint_contains(const QVec& point) const;

    std::vector<LinearForm> equation_forms() const;
    std::vector<LinearForm> inequality_forms() const;

    friend Cone cone_from_rows(std::vector<std::string> coords, ZMat eqs, ZMat ineqs);

private:
    std::vector<std::string> coords_;
    ZMat equations_;
    ZMat inequalities_;
    ZMat rays_;
    int dim_ = 0;
};

// Orthant rows are added automatically; an inconsistent system yields the
// zero cone.
Cone cone_from_constraints(const std::vector<std::string>& coords, const std::vector<LinearForm>& equations,
                           const std::vector<LinearForm>& inequalities);
Cone cone_from_rows(std::vector<std::string> coords, ZMat eqs, ZMat ineqs);

// Same point set (pointed cones: equal sorted primitive ray lists).
bool same_cone(const Cone& a, const Cone& b);

Cone intersect(const Cone& a, const Cone& b);

// f is a face of c iff turning the constraints of c tight on f into equations
// recovers exactly f.
bool is_face(const Cone& f, const Cone& c);

// The face of c where the given constraint rows are tight.
Cone face_where_tight(const Cone& c, const ZMat& extra_equations);

// All faces of c (including c itself and the zero face), deduped by ray set.
std::vector<Cone> all_faces(const Cone& c);

// Fourier-Motzkin elimination of all coordinates not in `keep`; equations are
// used as substitutions where available. Result is in `keep` order.
Cone project_to(const Cone& c, const std::vector<std::string>& keep);

// Facet/equation reconstruction from generators, for the duality round-trip:
// cone_from_rows(constraints_from_rays(...)) has the same rays again.
std::pair<ZMat, ZMat> constraints_from_rays(size_t ambient_dim, const ZMat& rays);

std::vector<ZVec> integer_points_in_box(const Cone& c, long long bound);

struct Sublattice {
    int ambient = 0;
    ZMat gens;
};

// Index of the generated lattice inside its saturation (product of the
// elementary divisors); generators must be independent.
Int lattice_index(const Sublattice& s);
ZMat saturation_basis(const Sublattice& s);
bool lattice_contains(const Sublattice& s, const ZVec& v);
bool lattice_equal(const Sublattice& a, const Sublattice& b);

bool is_simplicial(const Cone& c);
// Simplicial and the primitive rays generate the given lattice.
bool is_unimodular(const Cone& c, const Sublattice& lattice);

std::string row_str(const std::vector<std::string>& coords, const ZVec& row);

}  // namespace tropfan
