#pragma once

#include <optional>
#include <vector>

#include "tropfan/rational.hpp"

namespace tropfan {

using QVec = std::vector<Rat>;
using QMat = std::vector<QVec>;
using ZVec = std::vector<Int>;
using ZMat = std::vector<ZVec>;

int rank_of(QMat m);
int rank_of_int(const ZMat& m);

// Any solution of A x = b with free variables pinned to 0; nullopt if
// inconsistent. Deterministic pivot choice (first usable column).
std::optional<QVec> solve_linear(QMat a, QVec b);

// Clears denominators and divides by the gcd; zero vector stays zero.
ZVec primitive(const QVec& v);
ZVec primitive_int(ZVec v);

QVec to_rational(const ZVec& v);

// Elementary divisors d1 | d2 | ... of an integer matrix (positive, zero rows
// of the diagonal dropped).
std::vector<Int> smith_diagonal(ZMat a);

// Basis of the saturation of the row span: Z^n intersected with the rational
// row space. Rows returned in a deterministic order.
ZMat saturation_of_rowspan(const ZMat& a);

}  // namespace tropfan
