#include "tropfan/oracle.hpp"

#include <sstream>
#include <stdexcept>

namespace tropfan {

namespace {

// Fundamental cycles as signed edge-index lists, recomputed here directly so
// the oracle does not share the fan's constraint path.
std::vector<std::map<std::string, long long>> direct_cycles(const Graph& g) {
    std::vector<std::map<std::string, long long>> out;
    for (const auto& f : cycle_basis(g)) out.push_back(f.slope);
    return out;
}

}  // namespace

TripleAtPoint evaluate_triple(const Subdivision& model, const Flow& flow, const QVec& base_point) {
    const Graph& src = model.source;
    const Graph& tgt = model.target;
    if (base_point.size() != static_cast<size_t>(tgt.edge_count()))
        throw std::invalid_argument("evaluate_triple: point dimension mismatch");

    TripleAtPoint result;

    // Unknown piece lengths, one slot per source edge of a subdivided fiber.
    std::vector<std::string> unknowns;
    std::map<std::string, Rat> known;
    for (int i = 0; i < tgt.edge_count(); ++i) {
        const auto& e = tgt.edges()[i];
        const auto& fiber = model.edge_fibers.at(e.id);
        if (fiber.size() == 1 && fiber[0] == e.id)
            known[e.id] = base_point[i];
        else
            for (const auto& piece : fiber) unknowns.push_back(piece);
    }
    auto unknown_index = [&](const std::string& id) -> int {
        for (size_t i = 0; i < unknowns.size(); ++i)
            if (unknowns[i] == id) return static_cast<int>(i);
        return -1;
    };

    QMat a;
    QVec b;
    for (const auto& cyc : direct_cycles(src)) {
        QVec row(unknowns.size(), Rat(0));
        Rat rhs = 0;
        for (const auto& [eid, c] : cyc) {
            Rat coeff = rat_of(c) * rat_of(flow.at(eid));
            if (coeff == 0) continue;
            int idx = unknown_index(eid);
            if (idx >= 0)
                row[idx] += coeff;
            else
                rhs -= coeff * known.at(eid);
        }
        a.push_back(std::move(row));
        b.push_back(rhs);
    }
    for (int i = 0; i < tgt.edge_count(); ++i) {
        const auto& e = tgt.edges()[i];
        const auto& fiber = model.edge_fibers.at(e.id);
        if (fiber.size() == 1 && fiber[0] == e.id) continue;
        QVec row(unknowns.size(), Rat(0));
        for (const auto& piece : fiber) row[unknown_index(piece)] += 1;
        a.push_back(std::move(row));
        b.push_back(base_point[i]);
    }

    // Gaussian elimination; a free unknown never appears in any equation, so
    // its only constraints are the box 0 <= x <= fiber total, handled below.
    const size_t m = unknowns.size();
    std::vector<int> pivot_row(m, -1);
    size_t row = 0;
    for (size_t col = 0; col < m && row < a.size(); ++col) {
        size_t p = row;
        while (p < a.size() && a[p][col] == 0) ++p;
        if (p == a.size()) continue;
        std::swap(a[row], a[p]);
        std::swap(b[row], b[p]);
        Rat inv = a[row][col];
        for (size_t c2 = 0; c2 < m; ++c2) a[row][c2] /= inv;
        b[row] /= inv;
        for (size_t r = 0; r < a.size(); ++r) {
            if (r == row || a[r][col] == 0) continue;
            Rat f = a[r][col];
            for (size_t c2 = 0; c2 < m; ++c2) a[r][c2] -= f * a[row][c2];
            b[r] -= f * b[row];
        }
        pivot_row[col] = static_cast<int>(row);
        ++row;
    }
    for (size_t r = row; r < a.size(); ++r)
        if (b[r] != 0) return result;  // inconsistent: flow does not lift here

    std::map<std::string, Rat> lengths = known;
    for (size_t i = 0; i < m; ++i) {
        if (pivot_row[i] >= 0) {
            bool pure = true;
            for (size_t c2 = 0; c2 < m; ++c2)
                if (c2 != i && a[pivot_row[i]][c2] != 0) pure = false;
            if (!pure)
                throw std::logic_error("evaluate_triple: coupled free piece lengths");
            lengths[unknowns[i]] = b[pivot_row[i]];
        }
    }
    // Free unknowns: split the remaining fiber mass evenly (any nonnegative
    // choice works; feasibility only needs the box to be nonempty).
    for (int i = 0; i < tgt.edge_count(); ++i) {
        const auto& e = tgt.edges()[i];
        const auto& fiber = model.edge_fibers.at(e.id);
        if (fiber.size() == 1 && fiber[0] == e.id) continue;
        std::vector<std::string> free;
        Rat used = 0;
        for (const auto& piece : fiber) {
            auto it = lengths.find(piece);
            if (it == lengths.end())
                free.push_back(piece);
            else
                used += it->second;
        }
        if (free.empty()) continue;
        Rat rest = base_point[i] - used;
        if (rest < 0) return result;
        Rat share = rest / Rat(static_cast<long>(free.size()));
        for (const auto& piece : free) lengths[piece] = share;
    }
    for (const auto& [_, len] : lengths)
        if (len < 0) return result;

    result.feasible = true;
    result.lengths = lengths;

    // Path sums from the first-leg vertex.
    std::map<std::string, Rat> alpha;
    std::string root = first_leg_vertex(src);
    alpha[root] = 0;
    std::vector<std::string> queue = {root};
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        std::string v = queue[qi];
        for (const auto& e : src.edges()) {
            Rat step = rat_of(flow.at(e.id)) * lengths.at(e.id);
            if (e.from == v && !alpha.count(e.to)) {
                alpha[e.to] = alpha[v] + step;
                queue.push_back(e.to);
            } else if (e.to == v && !alpha.count(e.from)) {
                alpha[e.from] = alpha[v] - step;
                queue.push_back(e.from);
            }
        }
    }
    result.alpha = alpha;
    result.induced = induced_ordering(model, flow, alpha);
    return result;
}

VerificationReport oracle_equivalence(const Fan& fan, long long box) {
    VerificationReport report;
    report.box = box;
    CheckResult div_check{"oracle-div-membership", true, ""};
    CheckResult rub_check{"oracle-rub-membership", true, ""};

    const size_t n = fan.base.edge_count();

    auto point_str = [&](const ZVec& p) {
        std::ostringstream os;
        os << "(";
        for (size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i].get_str();
        os << ")";
        return os.str();
    };

    ZVec point(n, 0);
    bool done = false;
    while (!done) {
        QVec pq = to_rational(point);
        std::vector<TripleAtPoint> eval(fan.triples.size());
        std::vector<bool> have(fan.triples.size(), false);
        auto eval_of = [&](int t) -> const TripleAtPoint& {
            if (!have[t]) {
                eval[t] = evaluate_triple(fan.model_of(fan.triples[t]), fan.triples[t].flow, pq);
                have[t] = true;
            }
            return eval[t];
        };

        for (size_t ci = 0; ci < fan.cones.size(); ++ci) {
            const FanCone& fc = fan.cones[ci];
            if (fc.labels.empty()) continue;
            bool member = fc.cone.contains(pq);
            for (const auto& label : fc.labels) {
                const TripleAtPoint& ev = eval_of(label.triple_index);
                if (!label.ordering) {
                    if (member != ev.feasible && div_check.pass) {
                        div_check.pass = false;
                        div_check.witness = "triple " + std::to_string(label.triple_index) + " at " +
                                            point_str(point) + ": cone says " + (member ? "in" : "out") +
                                            ", direct evaluation says " + (ev.feasible ? "in" : "out");
                    }
                } else {
                    bool predicted = ev.feasible && refines(*label.ordering, *ev.induced);
                    if (member != predicted && rub_check.pass) {
                        rub_check.pass = false;
                        rub_check.witness = "triple " + std::to_string(label.triple_index) + " ordering " +
                                            label.ordering->str() + " at " + point_str(point);
                    }
                }
            }
        }

        size_t i = 0;
        while (i < n && point[i] == int_of(box)) point[i++] = 0;
        if (i == n)
            done = true;
        else
            point[i] += 1;
    }
    report.checks.push_back(div_check);
    report.checks.push_back(rub_check);
    return report;
}

}  // namespace tropfan
