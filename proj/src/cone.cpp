#include "tropfan/cone.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tropfan {

namespace {

ZVec canonical_ineq(ZVec row) { return primitive_int(std::move(row)); }

ZVec canonical_eq(ZVec row) {
    row = primitive_int(std::move(row));
    for (const auto& x : row) {
        if (x == 0) continue;
        if (x < 0)
            for (auto& y : row) y = -y;
        break;
    }
    return row;
}

bool is_zero_row(const ZVec& row) {
    for (const auto& x : row)
        if (x != 0) return false;
    return true;
}

ZMat dedupe_rows(ZMat rows) {
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    rows.erase(std::remove_if(rows.begin(), rows.end(), is_zero_row), rows.end());
    return rows;
}

Int dot(const ZVec& a, const ZVec& b) {
    Int s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Rat dot_q(const ZVec& a, const QVec& b) {
    Rat s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += b[i] * a[i];
    return s;
}

// Bitset over constraint indices.
struct TightSet {
    std::vector<uint64_t> words;
    void resize(size_t bits) { words.assign((bits + 63) / 64, 0); }
    void set(size_t i) { words[i / 64] |= 1ULL << (i % 64); }
    void push_bit(size_t i, bool v) {
        if (i / 64 >= words.size()) words.resize(i / 64 + 1, 0);
        if (v) words[i / 64] |= 1ULL << (i % 64);
    }
};

TightSet intersect_sets(const TightSet& a, const TightSet& b) {
    TightSet out;
    size_t n = std::min(a.words.size(), b.words.size());
    out.words.resize(n);
    for (size_t i = 0; i < n; ++i) out.words[i] = a.words[i] & b.words[i];
    return out;
}

bool superset_of(const TightSet& big, const TightSet& small) {
    for (size_t i = 0; i < small.words.size(); ++i) {
        uint64_t s = small.words[i];
        uint64_t b = i < big.words.size() ? big.words[i] : 0;
        if ((s & b) != s) return false;
    }
    return true;
}

// Incremental double description over a pointed cone. The ray list is kept as
// the exact extreme rays of the cone cut out by the processed rows.
class DoubleDescription {
public:
    DoubleDescription(size_t ambient, const ZMat& start_rays, const ZMat& start_rows)
        : n_(ambient), rays_(start_rays), rows_(start_rows) {
        tight_.resize(rays_.size());
        for (size_t r = 0; r < rays_.size(); ++r) {
            tight_[r].resize(rows_.size());
            for (size_t k = 0; k < rows_.size(); ++k)
                if (dot(rows_[k], rays_[r]) == 0) tight_[r].set(k);
        }
    }

    static DoubleDescription orthant(size_t ambient) {
        ZMat rays, rows;
        for (size_t i = 0; i < ambient; ++i) {
            ZVec unit(ambient, 0);
            unit[i] = 1;
            rays.push_back(unit);
            rows.push_back(unit);
        }
        return DoubleDescription(ambient, rays, rows);
    }

    void add(const ZVec& row, bool equation) {
        std::vector<Int> value(rays_.size());
        for (size_t r = 0; r < rays_.size(); ++r) value[r] = dot(row, rays_[r]);

        std::vector<size_t> pos, neg, zero;
        for (size_t r = 0; r < rays_.size(); ++r) {
            if (value[r] > 0) pos.push_back(r);
            else if (value[r] < 0) neg.push_back(r);
            else zero.push_back(r);
        }

        ZMat new_rays;
        std::vector<TightSet> new_tight;
        auto keep = [&](size_t r, bool tight_here) {
            new_rays.push_back(rays_[r]);
            TightSet t = tight_[r];
            t.push_bit(rows_.size(), tight_here);
            new_tight.push_back(std::move(t));
        };
        for (size_t r : zero) keep(r, true);
        if (!equation)
            for (size_t r : pos) keep(r, false);

        for (size_t p : pos)
            for (size_t m : neg) {
                if (!adjacent(p, m)) continue;
                ZVec w(n_);
                for (size_t i = 0; i < n_; ++i) w[i] = value[p] * rays_[m][i] - value[m] * rays_[p][i];
                w = primitive_int(std::move(w));
                TightSet t = intersect_sets(tight_[p], tight_[m]);
                t.push_bit(rows_.size(), true);
                new_rays.push_back(std::move(w));
                new_tight.push_back(std::move(t));
            }

        rays_ = std::move(new_rays);
        tight_ = std::move(new_tight);
        rows_.push_back(row);
    }

    ZMat rays() const { return rays_; }

private:
    bool adjacent(size_t p, size_t m) const {
        TightSet common = intersect_sets(tight_[p], tight_[m]);
        for (size_t r = 0; r < rays_.size(); ++r) {
            if (r == p || r == m) continue;
            if (superset_of(tight_[r], common)) return false;
        }
        return true;
    }

    size_t n_;
    ZMat rays_;
    ZMat rows_;
    std::vector<TightSet> tight_;
};

ZMat sorted_rays(ZMat rays) {
    std::sort(rays.begin(), rays.end());
    rays.erase(std::unique(rays.begin(), rays.end()), rays.end());
    return rays;
}

ZMat orthant_rows(size_t n) {
    ZMat rows;
    for (size_t i = 0; i < n; ++i) {
        ZVec unit(n, 0);
        unit[i] = 1;
        rows.push_back(unit);
    }
    return rows;
}

}  // namespace

bool Cone::contains(const QVec& point) const {
    if (point.size() != coords_.size()) throw std::invalid_argument("contains: dimension mismatch");
    for (const auto& row : equations_)
        if (dot_q(row, point) != 0) return false;
    for (const auto& row : inequalities_)
        if (dot_q(row, point) < 0) return false;
    return true;
}

bool Cone::contains(const ZVec& point) const {
    QVec q = to_rational(point);
    return contains(q);
}

bool Cone::relint_contains(const QVec& point) const {
    if (!contains(point)) return false;
    for (const auto& row : inequalities_) {
        if (dot_q(row, point) != 0) continue;
        // Tight at the point; must be tight on the whole cone.
        for (const auto& ray : rays_)
            if (dot(row, ray) != 0) return false;
    }
    return true;
}

std::vector<LinearForm> Cone::equation_forms() const {
    std::vector<LinearForm> out;
    for (const auto& row : equations_) out.push_back(form_from_dense(coords_, to_rational(row)));
    return out;
}

std::vector<LinearForm> Cone::inequality_forms() const {
    std::vector<LinearForm> out;
    for (const auto& row : inequalities_) out.push_back(form_from_dense(coords_, to_rational(row)));
    return out;
}

Cone cone_from_rows(std::vector<std::string> coords, ZMat eqs, ZMat ineqs) {
    const size_t n = coords.size();
    for (auto& r : eqs)
        if (r.size() != n) throw std::invalid_argument("cone_from_rows: bad row width");
    for (auto& r : ineqs)
        if (r.size() != n) throw std::invalid_argument("cone_from_rows: bad row width");

    ZMat ceqs, cineqs;
    for (auto& r : eqs) ceqs.push_back(canonical_eq(std::move(r)));
    for (auto& r : ineqs) cineqs.push_back(canonical_ineq(std::move(r)));
    for (auto& r : orthant_rows(n)) cineqs.push_back(std::move(r));
    ceqs = dedupe_rows(std::move(ceqs));
    cineqs = dedupe_rows(std::move(cineqs));

    DoubleDescription dd = DoubleDescription::orthant(n);
    for (const auto& r : ceqs) dd.add(r, true);
    for (const auto& r : cineqs) {
        bool is_orthant_row = false;  // already part of the start cone
        int nonzero = 0;
        for (const auto& x : r)
            if (x != 0) ++nonzero;
        if (nonzero == 1)
            for (const auto& x : r)
                if (x == 1) is_orthant_row = true;
        if (!is_orthant_row) dd.add(r, false);
    }

    Cone c;
    c.coords_ = std::move(coords);
    c.equations_ = std::move(ceqs);
    c.inequalities_ = std::move(cineqs);
    c.rays_ = sorted_rays(dd.rays());
    c.dim_ = rank_of_int(c.rays_);
    return c;
}

Cone cone_from_constraints(const std::vector<std::string>& coords, const std::vector<LinearForm>& equations,
                           const std::vector<LinearForm>& inequalities) {
    ZMat eqs, ineqs;
    for (const auto& f : equations) eqs.push_back(primitive(f.dense(coords)));
    for (const auto& f : inequalities) ineqs.push_back(primitive(f.dense(coords)));
    return cone_from_rows(coords, std::move(eqs), std::move(ineqs));
}

bool same_cone(const Cone& a, const Cone& b) { return a.coords() == b.coords() && a.rays() == b.rays(); }

Cone intersect(const Cone& a, const Cone& b) {
    if (a.coords() != b.coords()) throw std::invalid_argument("intersect: ambient coordinate mismatch");
    ZMat eqs = a.equations();
    for (const auto& r : b.equations()) eqs.push_back(r);
    ZMat ineqs = a.inequalities();
    for (const auto& r : b.inequalities()) ineqs.push_back(r);
    return cone_from_rows(a.coords(), std::move(eqs), std::move(ineqs));
}

Cone face_where_tight(const Cone& c, const ZMat& extra_equations) {
    ZMat eqs = c.equations();
    for (const auto& r : extra_equations) eqs.push_back(r);
    return cone_from_rows(c.coords(), std::move(eqs), c.inequalities());
}

bool is_face(const Cone& f, const Cone& c) {
    if (f.coords() != c.coords()) throw std::invalid_argument("is_face: ambient coordinate mismatch");
    for (const auto& ray : f.rays())
        if (!c.contains(ray)) return false;
    // Constraints of c tight on all of f.
    ZMat tight;
    for (const auto& row : c.inequalities()) {
        bool all_tight = true;
        for (const auto& ray : f.rays())
            if (dot(row, ray) != 0) {
                all_tight = false;
                break;
            }
        if (all_tight) tight.push_back(row);
    }
    Cone g = face_where_tight(c, tight);
    return g.rays() == f.rays();
}

std::vector<Cone> all_faces(const Cone& c) {
    auto key = [](const Cone& x) {
        std::ostringstream os;
        for (const auto& r : x.rays()) {
            for (const auto& v : r) os << v.get_str() << ",";
            os << ";";
        }
        return os.str();
    };
    std::vector<Cone> out = {c};
    std::set<std::string> seen = {key(c)};
    for (size_t i = 0; i < out.size(); ++i) {
        Cone cur = out[i];
        for (const auto& row : cur.inequalities()) {
            bool tight_everywhere = true;
            for (const auto& ray : cur.rays())
                if (dot(row, ray) != 0) {
                    tight_everywhere = false;
                    break;
                }
            if (tight_everywhere) continue;
            Cone f = face_where_tight(cur, {row});
            if (seen.insert(key(f)).second) out.push_back(std::move(f));
        }
    }
    return out;
}

Cone project_to(const Cone& c, const std::vector<std::string>& keep) {
    const auto& coords = c.coords();
    std::set<std::string> keep_set(keep.begin(), keep.end());
    for (const auto& k : keep)
        if (std::find(coords.begin(), coords.end(), k) == coords.end())
            throw std::invalid_argument("project_to: unknown coordinate " + k);

    ZMat eqs = c.equations();
    ZMat ineqs = c.inequalities();

    for (size_t i = 0; i < coords.size(); ++i) {
        if (keep_set.count(coords[i])) continue;
        // Prefer substitution via an equation containing the variable.
        int pivot = -1;
        for (size_t r = 0; r < eqs.size(); ++r)
            if (eqs[r][i] != 0) {
                pivot = static_cast<int>(r);
                break;
            }
        if (pivot >= 0) {
            ZVec p = eqs[pivot];
            if (p[i] < 0)
                for (auto& x : p) x = -x;
            eqs.erase(eqs.begin() + pivot);
            auto reduce = [&](ZVec& row) {
                if (row[i] == 0) return;
                Int a = row[i];
                for (size_t j = 0; j < row.size(); ++j) row[j] = p[i] * row[j] - a * p[j];
            };
            for (auto& r : eqs) reduce(r);
            for (auto& r : ineqs) reduce(r);
        } else {
            ZMat kept;
            std::vector<ZVec> pos, neg;
            for (auto& r : ineqs) {
                if (r[i] == 0) kept.push_back(std::move(r));
                else if (r[i] > 0) pos.push_back(std::move(r));
                else neg.push_back(std::move(r));
            }
            for (const auto& pr : pos)
                for (const auto& nr : neg) {
                    ZVec w(pr.size());
                    for (size_t j = 0; j < pr.size(); ++j) w[j] = pr[i] * nr[j] - nr[i] * pr[j];
                    kept.push_back(primitive_int(std::move(w)));
                }
            ineqs = std::move(kept);
        }
        for (auto& r : eqs) r = canonical_eq(std::move(r));
        for (auto& r : ineqs) r = canonical_ineq(std::move(r));
        eqs = dedupe_rows(std::move(eqs));
        ineqs = dedupe_rows(std::move(ineqs));
    }

    // Select kept columns in the requested order.
    std::vector<size_t> sel;
    for (const auto& k : keep) {
        for (size_t i = 0; i < coords.size(); ++i)
            if (coords[i] == k) sel.push_back(i);
    }
    auto shrink = [&](const ZMat& rows) {
        ZMat out;
        for (const auto& r : rows) {
            ZVec v;
            for (size_t i : sel) v.push_back(r[i]);
            out.push_back(std::move(v));
        }
        return out;
    };
    return cone_from_rows(keep, shrink(eqs), shrink(ineqs));
}

namespace {

// Deterministic kernel basis of a rational matrix (RREF free columns).
QMat nullspace_basis(QMat m, size_t cols) {
    std::vector<int> pivot_of_col(cols, -1);
    size_t row = 0;
    for (size_t col = 0; col < cols && row < m.size(); ++col) {
        size_t pivot = row;
        while (pivot < m.size() && m[pivot][col] == 0) ++pivot;
        if (pivot == m.size()) continue;
        std::swap(m[row], m[pivot]);
        Rat inv = m[row][col];
        for (size_t c2 = 0; c2 < cols; ++c2) m[row][c2] /= inv;
        for (size_t r = 0; r < m.size(); ++r) {
            if (r == row || m[r][col] == 0) continue;
            Rat f = m[r][col];
            for (size_t c2 = 0; c2 < cols; ++c2) m[r][c2] -= f * m[row][c2];
        }
        pivot_of_col[col] = static_cast<int>(row);
        ++row;
    }
    QMat basis;
    for (size_t col = 0; col < cols; ++col) {
        if (pivot_of_col[col] >= 0) continue;
        QVec v(cols, Rat(0));
        v[col] = 1;
        for (size_t c2 = 0; c2 < cols; ++c2)
            if (pivot_of_col[c2] >= 0) v[c2] = -m[pivot_of_col[c2]][col];
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace

std::pair<ZMat, ZMat> constraints_from_rays(size_t ambient_dim, const ZMat& rays) {
    ZMat eqs, ineqs;
    QMat rays_q;
    for (const auto& r : rays) rays_q.push_back(to_rational(r));

    // Equations: kernel of the ray matrix (the span's orthogonal complement).
    QMat ker = rays.empty() ? nullspace_basis(QMat{QVec(ambient_dim, Rat(0))}, ambient_dim)
                            : nullspace_basis(rays_q, ambient_dim);
    for (const auto& v : ker) eqs.push_back(canonical_eq(primitive(v)));

    int d = rays.empty() ? 0 : rank_of(rays_q);
    if (d == 0) return {dedupe_rows(std::move(eqs)), ineqs};

    // Facet normals: for each (d-1)-subset of rays spanning a ridge, the
    // kernel of [subset; equations] is one-dimensional; keep it when all rays
    // are on one side.
    std::vector<bool> pick(rays.size(), false);
    std::fill(pick.begin(), pick.begin() + (d - 1), true);

    std::set<ZVec> normals;
    do {
        QMat sys;
        for (size_t i = 0; i < rays.size(); ++i)
            if (pick[i]) sys.push_back(rays_q[i]);
        for (const auto& e : eqs) sys.push_back(to_rational(e));
        QMat sol = nullspace_basis(sys, ambient_dim);
        if (sol.size() != 1) continue;
        ZVec normal = primitive(sol[0]);
        int sign = 0;
        bool facet = true;
        for (const auto& r : rays) {
            Int v = dot(normal, r);
            if (v == 0) continue;
            int s = v > 0 ? 1 : -1;
            if (sign == 0) sign = s;
            else if (sign != s) {
                facet = false;
                break;
            }
        }
        if (!facet || sign == 0) continue;
        if (sign < 0)
            for (auto& x : normal) x = -x;
        normals.insert(std::move(normal));
    } while (std::prev_permutation(pick.begin(), pick.end()));

    for (const auto& nrm : normals) ineqs.push_back(nrm);
    return {dedupe_rows(std::move(eqs)), dedupe_rows(std::move(ineqs))};
}

std::vector<ZVec> integer_points_in_box(const Cone& c, long long bound) {
    if (bound < 0) throw std::invalid_argument("integer_points_in_box: bound must be >= 0");
    const size_t n = c.coords().size();
    std::vector<ZVec> out;
    ZVec point(n, 0);
    // Plain grid scan; desk-scale boxes only.
    while (true) {
        if (c.contains(point)) out.push_back(point);
        size_t i = 0;
        while (i < n && point[i] == int_of(bound)) point[i++] = 0;
        if (i == n) break;
        point[i] += 1;
    }
    return out;
}

Int lattice_index(const Sublattice& s) {
    if (rank_of_int(s.gens) != static_cast<int>(s.gens.size()))
        throw std::invalid_argument("lattice_index: generators are dependent");
    Int idx = 1;
    for (const auto& d : smith_diagonal(s.gens)) idx *= d;
    return idx;
}

ZMat saturation_basis(const Sublattice& s) { return saturation_of_rowspan(s.gens); }

bool lattice_contains(const Sublattice& s, const ZVec& v) {
    if (s.gens.empty()) return is_zero_row(v);
    // Solve x * gens = v, then check integrality.
    QMat a(v.size(), QVec(s.gens.size(), Rat(0)));
    for (size_t i = 0; i < s.gens.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j) a[j][i] = Rat(s.gens[i][j]);
    auto x = solve_linear(std::move(a), to_rational(v));
    if (!x) return false;
    for (const auto& q : *x)
        if (!is_integer(q)) return false;
    return true;
}

bool lattice_equal(const Sublattice& a, const Sublattice& b) {
    if (a.ambient != b.ambient) return false;
    for (const auto& g : a.gens)
        if (!lattice_contains(b, g)) return false;
    for (const auto& g : b.gens)
        if (!lattice_contains(a, g)) return false;
    return true;
}

bool is_simplicial(const Cone& c) { return static_cast<int>(c.rays().size()) == c.dim(); }

bool is_unimodular(const Cone& c, const Sublattice& lattice) {
    if (!is_simplicial(c)) return false;
    Sublattice rayspan{static_cast<int>(c.coords().size()), c.rays()};
    return lattice_equal(rayspan, lattice);
}

std::string row_str(const std::vector<std::string>& coords, const ZVec& row) {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < coords.size(); ++i) {
        if (row[i] == 0) continue;
        if (first) {
            if (row[i] < 0) os << "-";
        } else {
            os << (row[i] < 0 ? " - " : " + ");
        }
        Int a = abs(row[i]);
        if (a != 1) os << a.get_str() << "*";
        os << coords[i];
        first = false;
    }
    if (first) return "0";
    return os.str();
}

}  // namespace tropfan
