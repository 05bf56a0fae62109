#include "tropfan/fan.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tropfan {

namespace {

std::string ray_key(const Cone& c) {
    std::ostringstream os;
    for (const auto& r : c.rays()) {
        for (const auto& v : r) os << v.get_str() << ",";
        os << ";";
    }
    return os.str();
}

struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::string coord_name(const std::string& edge_id) {
    if (edge_id.size() >= 2 && edge_id[0] == 'e') {
        size_t i = 1;
        while (i < edge_id.size() && std::isdigit(static_cast<unsigned char>(edge_id[i]))) ++i;
        size_t primes = 0;
        while (i + primes < edge_id.size() && edge_id[i + primes] == '\'') ++primes;
        if (i > 1 && i + primes == edge_id.size()) return "l" + edge_id.substr(1);
    }
    return "l_" + edge_id;
}

std::vector<std::string> base_coords(const Graph& g) {
    std::vector<std::string> out;
    for (const auto& e : g.edges()) out.push_back(coord_name(e.id));
    return out;
}

std::vector<std::string> extended_coords(const Graph& source) { return base_coords(source); }

LinearForm intersection_pairing(const Graph& g, const Flow& s, const Flow& t,
                                const std::map<std::string, LinearForm>& lengths) {
    for (const auto& [e, _] : s.slope) (void)g.edge(e);
    for (const auto& [e, _] : t.slope) (void)g.edge(e);
    LinearForm out;
    for (const auto& e : g.edges()) {
        long long c = s.at(e.id) * t.at(e.id);
        if (c == 0) continue;
        auto it = lengths.find(e.id);
        if (it == lengths.end()) throw std::invalid_argument("intersection_pairing: missing length for " + e.id);
        out += it->second * rat_of(c);
    }
    return out;
}

std::map<std::string, LinearForm> alpha_forms(const Graph& g, const Flow& flow, const std::string& root) {
    (void)g.vertex(root);
    std::map<std::string, LinearForm> alpha;
    alpha[root] = LinearForm{};
    std::vector<std::string> queue = {root};
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        std::string v = queue[qi];
        for (const auto& e : g.edges()) {
            LinearForm len = LinearForm::var(coord_name(e.id));
            if (e.from == v && !alpha.count(e.to)) {
                alpha[e.to] = alpha[v] + len * rat_of(flow.at(e.id));
                queue.push_back(e.to);
            } else if (e.to == v && !alpha.count(e.from)) {
                alpha[e.from] = alpha[v] - len * rat_of(flow.at(e.id));
                queue.push_back(e.from);
            }
        }
    }
    return alpha;
}

std::string first_leg_vertex(const Graph& g) {
    std::string best_leg, best_vertex;
    for (const auto& v : g.vertices())
        for (const auto& leg : v.legs)
            if (best_leg.empty() || leg < best_leg) {
                best_leg = leg;
                best_vertex = v.id;
            }
    if (best_vertex.empty()) throw std::invalid_argument("graph has no legs");
    return best_vertex;
}

std::string min_source_vertex(const Graph& g, const Flow& flow) {
    std::set<std::string> not_source;
    std::set<std::string> relevant;
    for (const auto& e : g.edges()) {
        long long s = flow.at(e.id);
        if (s == 0) continue;
        relevant.insert(e.from);
        relevant.insert(e.to);
        not_source.insert(s > 0 ? e.to : e.from);
    }
    for (const auto& v : relevant)
        if (!not_source.count(v)) return v;
    return g.vertices()[0].id;
}

namespace {

// Cycle-pairing equations of the flow in the source edge coordinates.
std::vector<LinearForm> twist_equations(const Graph& source, const Flow& flow) {
    std::map<std::string, LinearForm> lengths;
    for (const auto& e : source.edges()) lengths[e.id] = LinearForm::var(coord_name(e.id));
    std::vector<LinearForm> eqs;
    for (const auto& gamma : cycle_basis(source)) {
        LinearForm f = intersection_pairing(source, flow, gamma, lengths);
        if (!f.is_zero()) eqs.push_back(f);
    }
    return eqs;
}

// Projects a constraint system over the model-source coordinates down to the
// target edge coordinates, summing fibers.
Cone project_model_cone(const Subdivision& model, const std::vector<LinearForm>& eqs,
                        const std::vector<LinearForm>& ineqs) {
    std::vector<std::string> coords = extended_coords(model.source);
    std::vector<LinearForm> all_eqs = eqs;
    std::vector<std::string> keep;
    for (const auto& e : model.target.edges()) {
        const auto& fiber = model.edge_fibers.at(e.id);
        std::string base = coord_name(e.id);
        if (fiber.size() == 1 && fiber[0] == e.id) {
            keep.push_back(base);
            continue;
        }
        coords.push_back(base);
        keep.push_back(base);
        LinearForm sum;
        for (const auto& piece : fiber) sum += LinearForm::var(coord_name(piece));
        all_eqs.push_back(sum - LinearForm::var(base));
    }
    Cone combined = cone_from_constraints(coords, all_eqs, ineqs);
    return project_to(combined, keep);
}

}  // namespace

TwistCone twist_cone(const Subdivision& model, const Flow& flow) {
    if (!is_acyclic(model.source, flow)) throw std::invalid_argument("twist_cone: flow is cyclic");
    std::vector<LinearForm> eqs = twist_equations(model.source, flow);
    TwistCone tc;
    tc.extended = cone_from_constraints(extended_coords(model.source), eqs, {});
    tc.base = project_model_cone(model, eqs, {});
    return tc;
}

int Ordering::block_of(const std::string& v) const {
    for (size_t i = 0; i < blocks.size(); ++i)
        for (const auto& w : blocks[i])
            if (w == v) return static_cast<int>(i);
    return -1;
}

std::string Ordering::str() const {
    std::ostringstream os;
    for (const auto& b : blocks) {
        os << "[";
        for (size_t i = 0; i < b.size(); ++i) os << (i ? " " : "") << b[i];
        os << "]";
    }
    return os.str();
}

std::vector<Ordering> enumerate_orderings(const Subdivision& model, const Flow& flow) {
    FlowPartialOrder po = flow_partial_order(model.source, flow);
    const auto& verts = po.vertices;

    std::vector<Ordering> out;
    std::vector<std::vector<std::string>> blocks;
    std::set<std::string> placed;

    std::function<void()> rec = [&]() {
        if (placed.size() == verts.size()) {
            out.push_back(Ordering{blocks});
            return;
        }
        // Minimal elements of the remaining set.
        std::vector<std::string> minima;
        for (const auto& v : verts) {
            if (placed.count(v)) continue;
            bool minimal = true;
            for (const auto& w : verts)
                if (!placed.count(w) && po.is_less(w, v)) {
                    minimal = false;
                    break;
                }
            if (minimal) minima.push_back(v);
        }
        const size_t m = minima.size();
        for (unsigned long mask = 1; mask < (1UL << m); ++mask) {
            std::vector<std::string> block;
            for (size_t i = 0; i < m; ++i)
                if (mask >> i & 1) block.push_back(minima[i]);
            blocks.push_back(block);
            for (const auto& v : block) placed.insert(v);
            rec();
            for (const auto& v : block) placed.erase(v);
            blocks.pop_back();
        }
    };
    if (verts.empty()) return {Ordering{}};
    rec();
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void validate_ordering(const Subdivision& model, const Flow& flow, const Ordering& ordering) {
    FlowPartialOrder po = flow_partial_order(model.source, flow);
    std::set<std::string> in_blocks;
    for (const auto& b : ordering.blocks) {
        if (b.empty()) throw std::invalid_argument("ordering has an empty block");
        for (const auto& v : b)
            if (!in_blocks.insert(v).second) throw std::invalid_argument("ordering repeats vertex " + v);
    }
    std::set<std::string> expect(po.vertices.begin(), po.vertices.end());
    if (in_blocks != expect) throw std::invalid_argument("ordering does not cover the flow-relevant vertices");
    for (const auto& e : model.source.edges()) {
        long long s = flow.at(e.id);
        if (s == 0) continue;
        std::string tail = s > 0 ? e.from : e.to;
        std::string head = s > 0 ? e.to : e.from;
        if (ordering.block_of(tail) >= ordering.block_of(head))
            throw std::invalid_argument("ordering incompatible with the flow on edge " + e.id);
    }
}

std::vector<LinearForm> ordering_inequalities(const Subdivision& model, const Flow& flow,
                                              const Ordering& ordering, const std::string& root,
                                              std::vector<LinearForm>* equalities) {
    auto alpha = alpha_forms(model.source, flow, root);
    std::vector<LinearForm> ineqs;
    for (const auto& b : ordering.blocks)
        for (size_t i = 1; i < b.size(); ++i) equalities->push_back(alpha.at(b[i]) - alpha.at(b[0]));
    for (size_t i = 1; i < ordering.blocks.size(); ++i) {
        LinearForm step = alpha.at(ordering.blocks[i][0]) - alpha.at(ordering.blocks[i - 1][0]);
        if (!step.is_zero()) ineqs.push_back(step);
    }
    return ineqs;
}

}  // namespace

OrderingCone ordering_cone_rooted(const Subdivision& model, const Flow& flow, const Ordering& ordering,
                                  const std::string& root) {
    if (!is_acyclic(model.source, flow)) throw std::invalid_argument("ordering_cone: flow is cyclic");
    validate_ordering(model, flow, ordering);
    std::vector<LinearForm> eqs = twist_equations(model.source, flow);
    std::vector<LinearForm> ineqs = ordering_inequalities(model, flow, ordering, root, &eqs);
    OrderingCone oc;
    oc.extended = cone_from_constraints(extended_coords(model.source), eqs, ineqs);
    oc.base = project_model_cone(model, eqs, ineqs);
    return oc;
}

OrderingCone ordering_cone(const Subdivision& model, const Flow& flow, const Ordering& ordering) {
    return ordering_cone_rooted(model, flow, ordering, min_source_vertex(model.source, flow));
}

namespace {

// Solves the piece lengths of subdivided edges as forms in the base edge
// lengths, using the cycle equations and the fiber sums. Unique for
// theta-semistable data (each subdivided edge lies on a cycle and the two
// slopes differ); nullopt otherwise.
std::optional<std::map<std::string, LinearForm>> solve_primes(const Subdivision& model, const Flow& flow) {
    std::vector<std::string> unknowns;  // piece coordinates
    for (const auto& e : model.target.edges()) {
        const auto& fiber = model.edge_fibers.at(e.id);
        if (fiber.size() == 1 && fiber[0] == e.id) continue;
        for (const auto& piece : fiber) unknowns.push_back(coord_name(piece));
    }
    std::map<std::string, LinearForm> sub;
    if (unknowns.empty()) return sub;

    auto unknown_index = [&](const std::string& name) -> int {
        for (size_t i = 0; i < unknowns.size(); ++i)
            if (unknowns[i] == name) return static_cast<int>(i);
        return -1;
    };

    QMat a;
    std::vector<LinearForm> rhs;
    auto add_row = [&](const LinearForm& f) {
        QVec row(unknowns.size(), Rat(0));
        LinearForm rest;
        for (const auto& [name, c] : f.coeff) {
            int i = unknown_index(name);
            if (i >= 0)
                row[i] = c;
            else
                rest += LinearForm::var(name) * c;
        }
        a.push_back(std::move(row));
        rhs.push_back(-rest);
    };
    for (const auto& f : twist_equations(model.source, flow)) add_row(f);
    for (const auto& e : model.target.edges()) {
        const auto& fiber = model.edge_fibers.at(e.id);
        if (fiber.size() == 1 && fiber[0] == e.id) continue;
        LinearForm sum;
        for (const auto& piece : fiber) sum += LinearForm::var(coord_name(piece));
        add_row(sum - LinearForm::var(coord_name(e.id)));
    }

    // Symbolic Gaussian elimination; extra rows are relations on the base and
    // are dropped.
    const size_t m = unknowns.size();
    size_t row = 0;
    std::vector<int> pivot_row(m, -1);
    for (size_t col = 0; col < m && row < a.size(); ++col) {
        size_t p = row;
        while (p < a.size() && a[p][col] == 0) ++p;
        if (p == a.size()) continue;
        std::swap(a[row], a[p]);
        std::swap(rhs[row], rhs[p]);
        Rat inv = a[row][col];
        for (size_t c2 = 0; c2 < m; ++c2) a[row][c2] /= inv;
        rhs[row] *= Rat(1) / inv;
        for (size_t r = 0; r < a.size(); ++r) {
            if (r == row || a[r][col] == 0) continue;
            Rat f = a[r][col];
            for (size_t c2 = 0; c2 < m; ++c2) a[r][c2] -= f * a[row][c2];
            rhs[r] -= rhs[row] * f;
        }
        pivot_row[col] = static_cast<int>(row);
        ++row;
    }
    for (size_t i = 0; i < m; ++i) {
        if (pivot_row[i] < 0) return std::nullopt;
        sub[unknowns[i]] = rhs[pivot_row[i]];
    }
    return sub;
}

LinearForm substitute(const LinearForm& f, const std::map<std::string, LinearForm>& sub) {
    LinearForm out;
    for (const auto& [name, c] : f.coeff) {
        auto it = sub.find(name);
        if (it == sub.end())
            out += LinearForm::var(name) * c;
        else
            out += it->second * c;
    }
    return out;
}

}  // namespace

bool refines(const Ordering& fine, const Ordering& coarse) {
    std::map<std::string, int> fi, ci;
    for (size_t i = 0; i < fine.blocks.size(); ++i)
        for (const auto& v : fine.blocks[i]) fi[v] = static_cast<int>(i);
    for (size_t i = 0; i < coarse.blocks.size(); ++i)
        for (const auto& v : coarse.blocks[i]) ci[v] = static_cast<int>(i);
    if (fi.size() != ci.size()) return false;
    std::map<int, int> image;
    for (const auto& [v, k] : fi) {
        auto it = ci.find(v);
        if (it == ci.end()) return false;
        auto ins = image.emplace(k, it->second);
        if (!ins.second && ins.first->second != it->second) return false;
    }
    int prev = -1;
    for (const auto& [_, w] : image) {
        if (w < prev) return false;
        prev = w;
    }
    return true;
}

Ordering induced_ordering(const Subdivision& model, const Flow& flow,
                          const std::map<std::string, Rat>& alpha_values) {
    FlowPartialOrder po = flow_partial_order(model.source, flow);
    std::map<Rat, std::vector<std::string>> by_value;
    for (const auto& v : po.vertices) by_value[alpha_values.at(v)].push_back(v);
    Ordering out;
    for (auto& [_, block] : by_value) {
        std::sort(block.begin(), block.end());
        out.blocks.push_back(block);
    }
    return out;
}

EquidimensionalLift equidimensional_lift(const Subdivision& model, const Flow& flow, const Ordering& ordering,
                                         const Cone& carrier) {
    validate_ordering(model, flow, ordering);
    if (carrier.coords() != base_coords(model.target))
        throw std::invalid_argument("equidimensional_lift: carrier lives in the wrong coordinates");
    const Graph& src = model.source;

    auto primes = solve_primes(model, flow);
    if (!primes) throw std::logic_error("equidimensional_lift: piece lengths are not determined over the base");
    auto alpha_ext = alpha_forms(src, flow, first_leg_vertex(src));
    std::map<std::string, LinearForm> alpha;
    for (const auto& [v, f] : alpha_ext) alpha[v] = substitute(f, *primes);

    EquidimensionalLift lift;

    // Blocks of the line; a flow with no relevant vertices maps everything to
    // a single vertex at level 0.
    std::vector<std::vector<std::string>> blocks = ordering.blocks;
    if (blocks.empty()) blocks.push_back({});
    const int nblocks = static_cast<int>(blocks.size());
    for (int j = 0; j < nblocks; ++j) {
        lift.line.vertex_ids.push_back("x" + std::to_string(j));
        lift.line.gamma.push_back(blocks[j].empty() ? LinearForm{} : alpha.at(blocks[j][0]));
    }
    for (int j = 0; j + 1 < nblocks; ++j)
        lift.line.edge_lengths.push_back(lift.line.gamma[j + 1] - lift.line.gamma[j]);

    // Zero-slope components determine the level of vertices that touch no
    // non-contracted edge.
    DisjointSets comp(src.vertex_count());
    for (const auto& e : src.edges())
        if (flow.at(e.id) == 0) comp.unite(src.vertex_index(e.from), src.vertex_index(e.to));
    std::map<std::string, int> level;
    for (const auto& v : src.vertices()) {
        int b = ordering.block_of(v.id);
        if (b >= 0) level[v.id] = b;
    }
    for (const auto& v : src.vertices()) {
        if (level.count(v.id)) continue;
        int found = -1;
        for (const auto& w : src.vertices()) {
            if (comp.find(src.vertex_index(v.id)) != comp.find(src.vertex_index(w.id))) continue;
            auto it = level.find(w.id);
            if (it != level.end()) {
                found = it->second;
                break;
            }
        }
        level[v.id] = found < 0 ? 0 : found;
    }
    for (const auto& e : src.edges()) {
        if (flow.at(e.id) != 0) continue;
        if (level.at(e.from) != level.at(e.to))
            throw std::invalid_argument("ordering splits a contracted component");
    }

    // Refine each non-contracted edge at the strictly intermediate levels.
    lift.refinement.target = src;
    std::vector<VertexData> verts = src.vertices();
    std::vector<EdgeData> edges;
    for (const auto& e : src.edges()) {
        long long s = flow.at(e.id);
        int ja = level.at(e.from), jb = level.at(e.to);
        std::vector<int> between;
        if (s > 0)
            for (int j = ja + 1; j < jb; ++j) between.push_back(j);
        else if (s < 0)
            for (int j = ja - 1; j > jb; --j) between.push_back(j);
        if (between.empty()) {
            edges.push_back(e);
            lift.refinement.edge_fibers[e.id] = {e.id};
            lift.flow_on_refinement.slope[e.id] = s;
            lift.vertex_to_line[e.from] = ja;
            lift.vertex_to_line[e.to] = jb;
            lift.edge_to_line[e.id] = s == 0 ? -1 : std::min(ja, jb);
            continue;
        }
        std::vector<std::string> fiber;
        std::string prev = e.from;
        int prev_level = ja;
        for (size_t k = 0; k <= between.size(); ++k) {
            bool last = k == between.size();
            std::string next = last ? e.to : e.id + "@x" + std::to_string(between[k]);
            int next_level = last ? jb : between[k];
            std::string piece = e.id + "#" + std::to_string(k);
            if (!last) {
                verts.push_back({next, 0, {}});
                lift.refinement.exceptional.insert(next);
                lift.vertex_to_line[next] = next_level;
                lift.positions[next] =
                    (lift.line.gamma[next_level] - alpha.at(e.from)) * (Rat(1) / rat_of(s));
            }
            edges.push_back({piece, prev, next});
            fiber.push_back(piece);
            lift.flow_on_refinement.slope[piece] = s;
            lift.edge_to_line[piece] = std::min(prev_level, next_level);
            prev = next;
            prev_level = next_level;
        }
        lift.refinement.edge_fibers[e.id] = fiber;
        lift.vertex_to_line[e.from] = ja;
        lift.vertex_to_line[e.to] = jb;
    }
    for (const auto& v : src.vertices())
        if (!lift.vertex_to_line.count(v.id)) lift.vertex_to_line[v.id] = level.at(v.id);
    lift.refinement.source = Graph(std::move(verts), std::move(edges));
    lift.flow_on_refinement = lift.flow_on_refinement.normalized();
    return lift;
}

Sublattice rub_lattice(const EquidimensionalLift& lift, const Cone& carrier) {
    if (!is_simplicial(carrier)) throw std::invalid_argument("rub_lattice: carrier is not simplicial");
    Sublattice primal{static_cast<int>(carrier.coords().size()), carrier.rays()};

    // Step-5 cross-check: the minimal integral multiple of each primitive ray
    // making every lift position integral generates the same lattice.
    Sublattice multiples{primal.ambient, {}};
    for (const auto& ray : carrier.rays()) {
        Int k = 1;
        QVec rq = to_rational(ray);
        for (const auto& [_, pos] : lift.positions) {
            Rat v = pos.eval_dense(carrier.coords(), rq);
            k = int_lcm(k, v.get_den());
        }
        ZVec scaled = ray;
        for (auto& x : scaled) x *= k;
        multiples.gens.push_back(std::move(scaled));
    }
    if (!lattice_equal(primal, multiples))
        throw std::logic_error("rub_lattice: ray-span and k-multiple lattices disagree");
    return primal;
}

namespace {

struct LabeledBuild {
    Cone base;
    Cone extended;
    FanConeLabel label;
    std::optional<EquidimensionalLift> lift;
    std::optional<Sublattice> lattice;
};

Fan assemble_fan(Fan fan, std::vector<LabeledBuild> built) {
    struct Entry {
        FanCone fc;
        std::set<std::string> face_keys;
    };
    std::map<std::string, size_t> index_of;
    std::vector<Entry> entries;

    auto add_cone = [&](const Cone& c, std::optional<Cone> ext, std::vector<FanConeLabel> labels,
                        std::optional<EquidimensionalLift> lift, std::optional<Sublattice> lattice) {
        std::string key = ray_key(c);
        auto it = index_of.find(key);
        if (it == index_of.end()) {
            Entry e;
            e.fc.cone = c;
            e.fc.extended = std::move(ext);
            e.fc.labels = std::move(labels);
            e.fc.lift = std::move(lift);
            e.fc.lattice = std::move(lattice);
            index_of[key] = entries.size();
            entries.push_back(std::move(e));
            return entries.size() - 1;
        }
        Entry& e = entries[it->second];
        for (auto& l : labels) e.fc.labels.push_back(l);
        if (!e.fc.extended && ext) e.fc.extended = std::move(ext);
        if (!e.fc.lift && lift) e.fc.lift = std::move(lift);
        if (!e.fc.lattice && lattice) e.fc.lattice = std::move(lattice);
        return it->second;
    };

    for (auto& b : built)
        add_cone(b.base, std::move(b.extended), {b.label}, std::move(b.lift), std::move(b.lattice));

    // Face closure; the loop end grows as faces get appended, and faces of
    // faces are faces, so this terminates with the full closure.
    for (size_t i = 0; i < entries.size(); ++i) {
        Cone cone = entries[i].fc.cone;  // copy: entries may reallocate
        std::set<std::string> keys;
        for (const auto& f : all_faces(cone)) {
            keys.insert(ray_key(f));
            add_cone(f, std::nullopt, {}, std::nullopt, std::nullopt);
        }
        entries[i].face_keys = std::move(keys);
    }

    // Canonical order: dimension descending, then ray matrix lex.
    std::vector<size_t> order(entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (entries[a].fc.cone.dim() != entries[b].fc.cone.dim())
            return entries[a].fc.cone.dim() > entries[b].fc.cone.dim();
        return entries[a].fc.cone.rays() < entries[b].fc.cone.rays();
    });

    const int ambient = static_cast<int>(fan.base.edge_count());
    std::map<std::string, int> final_index;
    for (size_t pos = 0; pos < order.size(); ++pos) {
        Entry& e = entries[order[pos]];
        e.fc.maximal = e.fc.cone.dim() == ambient;
        final_index[ray_key(e.fc.cone)] = static_cast<int>(pos);
    }
    for (size_t pos = 0; pos < order.size(); ++pos) {
        const Entry& e = entries[order[pos]];
        for (const auto& fk : e.face_keys) {
            auto it = final_index.find(fk);
            if (it == final_index.end()) continue;
            if (it->second != static_cast<int>(pos)) fan.face_pairs.push_back({it->second, static_cast<int>(pos)});
        }
    }
    std::sort(fan.face_pairs.begin(), fan.face_pairs.end());
    for (size_t pos = 0; pos < order.size(); ++pos) fan.cones.push_back(std::move(entries[order[pos]].fc));
    return fan;
}

std::vector<ThetaFlow> enumerate_triples(const Graph& g, const Divisor& a, const StabilityCondition& theta,
                                         const std::vector<Subdivision>& models) {
    if (!g.is_stable()) throw std::invalid_argument("base graph is not stable");
    if (g.leg_ids().empty()) throw std::invalid_argument("base graph needs at least one leg");
    if (!is_generic(g, theta)) throw std::invalid_argument("theta is not generic");

    std::vector<ThetaFlow> triples;
    for (size_t mi = 0; mi < models.size(); ++mi) {
        const Subdivision& model = models[mi];
        for (const auto& d : enumerate_theta_divisors(model, theta, a.degree())) {
            Divisor target;
            for (const auto& v : model.source.vertices()) target.values[v.id] = a.at(v.id) - d.at(v.id);
            target = target.normalized();
            for (const auto& flow : enumerate_acyclic_flows(model.source, target))
                triples.push_back({static_cast<int>(mi), d, flow});
        }
    }
    return triples;
}

}  // namespace

Fan build_div_fan(const Graph& g, const Divisor& a, const StabilityCondition& theta, int skip_triple) {
    Fan fan;
    fan.base = g;
    fan.a = a;
    fan.theta = theta;
    fan.models = quasi_stable_models(g);
    fan.triples = enumerate_triples(g, a, theta, fan.models);
    fan.rub = false;

    std::vector<LabeledBuild> built;
    for (size_t t = 0; t < fan.triples.size(); ++t) {
        if (static_cast<int>(t) == skip_triple) continue;
        const ThetaFlow& tf = fan.triples[t];
        TwistCone tc = twist_cone(fan.models[tf.model_index], tf.flow);
        LabeledBuild b;
        b.base = std::move(tc.base);
        b.extended = std::move(tc.extended);
        b.label.triple_index = static_cast<int>(t);
        built.push_back(std::move(b));
    }
    return assemble_fan(std::move(fan), std::move(built));
}

Fan build_rub_fan(const Graph& g, const Divisor& a, const StabilityCondition& theta, int skip_triple) {
    Fan fan;
    fan.base = g;
    fan.a = a;
    fan.theta = theta;
    fan.models = quasi_stable_models(g);
    fan.triples = enumerate_triples(g, a, theta, fan.models);
    fan.rub = true;

    const int ambient = g.edge_count();
    std::vector<LabeledBuild> built;
    for (size_t t = 0; t < fan.triples.size(); ++t) {
        if (static_cast<int>(t) == skip_triple) continue;
        const ThetaFlow& tf = fan.triples[t];
        const Subdivision& model = fan.models[tf.model_index];
        TwistCone tc = twist_cone(model, tf.flow);
        const int cell_dim = tc.base.dim();

        // Strict extensions generate the cells; the canonical label of a cell
        // is the weak order its interior induces.
        std::map<std::string, std::pair<OrderingCone, Ordering>> cells;
        auto alpha_ext = alpha_forms(model.source, tf.flow, min_source_vertex(model.source, tf.flow));
        for (const auto& kappa : enumerate_orderings(model, tf.flow)) {
            if (!kappa.strict()) continue;
            OrderingCone oc = ordering_cone(model, tf.flow, kappa);
            if (oc.base.dim() != cell_dim) continue;

            // Interior point of the extended cone, then the induced weak order.
            QVec interior(oc.extended.coords().size(), Rat(0));
            for (const auto& ray : oc.extended.rays())
                for (size_t i = 0; i < interior.size(); ++i) interior[i] += Rat(ray[i]);
            std::map<std::string, Rat> values;
            for (const auto& [v, f] : alpha_ext) values[v] = f.eval_dense(oc.extended.coords(), interior);
            Ordering canonical = induced_ordering(model, tf.flow, values);
            std::string key = ray_key(oc.base);  // before the moves below
            cells.emplace(std::move(key), std::make_pair(std::move(oc), std::move(canonical)));
        }

        for (auto& [_, cell] : cells) {
            OrderingCone& oc = cell.first;
            const Ordering& canonical = cell.second;
            LabeledBuild b;
            b.label.triple_index = static_cast<int>(t);
            b.label.ordering = canonical;
            b.lift = equidimensional_lift(model, tf.flow, canonical, oc.base);
            if (is_simplicial(oc.base)) b.lattice = rub_lattice(*b.lift, oc.base);
            if (oc.base.dim() == ambient) {
                if (!b.lattice) throw std::logic_error("maximal rub cone is not simplicial");
                if (!is_unimodular(oc.base, *b.lattice))
                    throw std::logic_error("maximal rub cone is not unimodular against its sublattice");
                long long contracted = 0;
                for (const auto& e : b.lift->refinement.source.edges())
                    if (b.lift->flow_on_refinement.at(e.id) == 0) ++contracted;
                long long expect = static_cast<long long>(b.lift->line.edge_lengths.size()) + contracted;
                if (expect != oc.base.dim())
                    throw std::logic_error("maximal rub cone does not factor as N^E(X) x N^Ec");
            }
            b.base = std::move(oc.base);
            b.extended = std::move(oc.extended);
            built.push_back(std::move(b));
        }
    }
    return assemble_fan(std::move(fan), std::move(built));
}

namespace {

// int64 fast path for box scans; falls back to exact arithmetic when the
// coefficients are large.
struct FastRows {
    std::vector<std::vector<long long>> rows;
    bool ok = true;

    explicit FastRows(const ZMat& m) {
        for (const auto& r : m) {
            std::vector<long long> row;
            for (const auto& x : r) {
                if (!x.fits_slong_p() || std::llabs(x.get_si()) > (1LL << 40)) {
                    ok = false;
                    return;
                }
                row.push_back(x.get_si());
            }
            rows.push_back(std::move(row));
        }
    }
};

struct FastCone {
    const Cone* cone;
    FastRows eqs, ineqs;
    std::vector<bool> tight_on_cone;  // per inequality row

    explicit FastCone(const Cone& c) : cone(&c), eqs(c.equations()), ineqs(c.inequalities()) {
        for (const auto& row : c.inequalities()) {
            bool tight = true;
            for (const auto& ray : c.rays()) {
                Int s = 0;
                for (size_t i = 0; i < row.size(); ++i) s += row[i] * ray[i];
                if (s != 0) {
                    tight = false;
                    break;
                }
            }
            tight_on_cone.push_back(tight);
        }
    }

    // 0 = outside, 1 = boundary (some non-face row tight), 2 = relative interior
    int classify(const std::vector<long long>& p, const ZVec& pz) const {
        if (!eqs.ok || !ineqs.ok) return classify_exact(pz);
        for (const auto& row : eqs.rows) {
            long long s = 0;
            for (size_t i = 0; i < row.size(); ++i) s += row[i] * p[i];
            if (s != 0) return 0;
        }
        int cls = 2;
        for (size_t r = 0; r < ineqs.rows.size(); ++r) {
            long long s = 0;
            for (size_t i = 0; i < ineqs.rows[r].size(); ++i) s += ineqs.rows[r][i] * p[i];
            if (s < 0) return 0;
            if (s == 0 && !tight_on_cone[r]) cls = 1;
        }
        return cls;
    }

    int classify_exact(const ZVec& p) const {
        if (!cone->contains(p)) return 0;
        QVec q = to_rational(p);
        return cone->relint_contains(q) ? 2 : 1;
    }
};

}  // namespace

VerificationReport verify_subdivision(const Fan& fan, long long box) {
    VerificationReport report;
    report.box = box;
    const size_t n = fan.base.edge_count();

    std::map<std::string, int> listed;
    for (size_t i = 0; i < fan.cones.size(); ++i) listed[ray_key(fan.cones[i].cone)] = static_cast<int>(i);

    std::vector<std::set<std::string>> face_keys(fan.cones.size());
    std::vector<int> maximal_ids;
    for (size_t i = 0; i < fan.cones.size(); ++i) {
        for (const auto& f : all_faces(fan.cones[i].cone)) face_keys[i].insert(ray_key(f));
        if (fan.cones[i].maximal) maximal_ids.push_back(static_cast<int>(i));
    }

    // (i) structural checks.
    CheckResult closure{"face-closure", true, ""};
    for (size_t i = 0; i < fan.cones.size() && closure.pass; ++i)
        for (const auto& fk : face_keys[i])
            if (!listed.count(fk)) {
                closure.pass = false;
                closure.witness = "a face of cone " + std::to_string(i) + " is not listed";
                break;
            }
    report.checks.push_back(closure);

    CheckResult part_of_max{"cone-under-maximal", true, ""};
    for (size_t i = 0; i < fan.cones.size() && part_of_max.pass; ++i) {
        if (fan.cones[i].maximal) continue;
        bool found = false;
        std::string key = ray_key(fan.cones[i].cone);
        for (int m : maximal_ids)
            if (face_keys[m].count(key)) {
                found = true;
                break;
            }
        if (!found) {
            part_of_max.pass = false;
            part_of_max.witness = "cone " + std::to_string(i) + " is not a face of any maximal cone";
        }
    }
    report.checks.push_back(part_of_max);

    CheckResult pairwise{"maximal-pairwise-intersections", true, ""};
    for (size_t a = 0; a < maximal_ids.size() && pairwise.pass; ++a)
        for (size_t b = a + 1; b < maximal_ids.size(); ++b) {
            Cone inter = intersect(fan.cones[maximal_ids[a]].cone, fan.cones[maximal_ids[b]].cone);
            std::string key = ray_key(inter);
            bool ok = listed.count(key) && face_keys[maximal_ids[a]].count(key) &&
                      face_keys[maximal_ids[b]].count(key);
            if (!ok) {
                pairwise.pass = false;
                pairwise.witness = "cones " + std::to_string(maximal_ids[a]) + " and " +
                                   std::to_string(maximal_ids[b]) + " do not meet in a listed common face";
                break;
            }
        }
    report.checks.push_back(pairwise);

    // (iii) dimensions.
    CheckResult dims{"dimensions", true, ""};
    for (const auto& [i, j] : fan.face_pairs)
        if (fan.cones[i].cone.dim() >= fan.cones[j].cone.dim()) {
            dims.pass = false;
            dims.witness = "face pair (" + std::to_string(i) + "," + std::to_string(j) + ") has bad dims";
            break;
        }
    report.checks.push_back(dims);

    // (ii) box scan.
    CheckResult coverage{"coverage", true, ""};
    CheckResult unique{"interior-uniqueness", true, ""};
    CheckResult shared{"shared-face-listed", true, ""};

    std::vector<FastCone> fast;
    fast.reserve(maximal_ids.size());
    for (int m : maximal_ids) fast.emplace_back(fan.cones[m].cone);
    std::vector<FastCone> fast_all;
    fast_all.reserve(fan.cones.size());
    for (const auto& fc : fan.cones) fast_all.emplace_back(fc.cone);

    auto point_str = [&](const ZVec& p) {
        std::ostringstream os;
        os << "(";
        for (size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i].get_str();
        os << ")";
        return os.str();
    };

    ZVec point(n, 0);
    std::vector<long long> pll(n, 0);
    bool done = n == 0;
    bool first_pass = true;
    while (!done || first_pass) {
        first_pass = false;
        std::vector<int> containing, interior;
        for (size_t k = 0; k < fast.size(); ++k) {
            int cls = fast[k].classify(pll, point);
            if (cls > 0) containing.push_back(maximal_ids[k]);
            if (cls == 2) interior.push_back(maximal_ids[k]);
        }
        if (containing.empty() && coverage.pass) {
            coverage.pass = false;
            coverage.witness = "point " + point_str(point) + " is in no maximal cone";
        }
        if (interior.size() >= 2 && unique.pass) {
            unique.pass = false;
            unique.witness = "point " + point_str(point) + " is interior to two maximal cones";
        }
        if (interior.size() == 1 && containing.size() > 1 && unique.pass) {
            unique.pass = false;
            unique.witness = "point " + point_str(point) + " is interior to a maximal cone but lies in another";
        }
        if (interior.empty() && containing.size() > 1 && shared.pass) {
            bool found = false;
            for (size_t i = 0; i < fan.cones.size() && !found; ++i) {
                if (fan.cones[i].maximal) continue;
                if (fast_all[i].classify(pll, point) == 0) continue;
                std::string key = ray_key(fan.cones[i].cone);
                bool face_of_all = true;
                for (int m : containing)
                    if (!face_keys[m].count(key)) {
                        face_of_all = false;
                        break;
                    }
                if (face_of_all) found = true;
            }
            if (!found) {
                shared.pass = false;
                shared.witness = "point " + point_str(point) + " lies on an unlisted shared face";
            }
        }
        // advance the counter
        size_t i = 0;
        while (i < n && point[i] == int_of(box)) {
            point[i] = 0;
            pll[i] = 0;
            ++i;
        }
        if (i == n) {
            done = true;
        } else {
            point[i] += 1;
            pll[i] += 1;
        }
    }
    report.checks.push_back(coverage);
    report.checks.push_back(unique);
    report.checks.push_back(shared);
    return report;
}

std::vector<UniversalFamilyCone> universal_family_cones(const Graph& g, const Flow& flow) {
    if (!is_acyclic(g, flow)) throw std::invalid_argument("universal_family_cones: flow is cyclic");
    std::vector<UniversalFamilyCone> out;
    TwistCone base = twist_cone(trivial_subdivision(g), flow);
    for (const auto& v : g.vertices()) out.push_back({v.id, false, base.base});

    for (const auto& e : g.edges()) {
        // Split e once, same slope on both halves.
        Subdivision model;
        model.target = g;
        std::vector<VertexData> verts = g.vertices();
        std::vector<EdgeData> edges;
        Flow lifted;
        for (const auto& e2 : g.edges()) {
            if (e2.id != e.id) {
                edges.push_back(e2);
                model.edge_fibers[e2.id] = {e2.id};
                lifted.slope[e2.id] = flow.at(e2.id);
                continue;
            }
            std::string u = "u@" + e2.id;
            std::string first = e2.id + "'", second = e2.id + "''";
            if (e2.to < e2.from) std::swap(first, second);
            verts.push_back({u, 0, {}});
            model.exceptional.insert(u);
            edges.push_back({first, e2.from, u});
            edges.push_back({second, u, e2.to});
            model.edge_fibers[e2.id] = {first, second};
            lifted.slope[first] = flow.at(e2.id);
            lifted.slope[second] = flow.at(e2.id);
        }
        model.source = Graph(std::move(verts), std::move(edges));
        out.push_back({e.id, true, twist_cone(model, lifted.normalized()).extended});
    }
    return out;
}

}  // namespace tropfan
