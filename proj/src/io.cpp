#include "tropfan/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tropfan {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

bool plain_id(const std::string& s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

}  // namespace

ProblemSpec problem_from_json(const json& j) {
    require(j.is_object(), "problem: expected an object");
    require(j.contains("graph"), "problem: missing graph");
    const json& jg = j.at("graph");

    std::vector<VertexData> verts;
    for (const auto& jv : jg.at("vertices")) {
        VertexData v;
        v.id = jv.at("id").get<std::string>();
        require(plain_id(v.id), "problem: vertex id must be alphanumeric: " + v.id);
        v.genus = jv.value("genus", 0);
        for (const auto& leg : jv.value("legs", json::array())) {
            std::string lid = leg.get<std::string>();
            require(plain_id(lid), "problem: leg id must be alphanumeric: " + lid);
            v.legs.push_back(lid);
        }
        verts.push_back(std::move(v));
    }
    std::vector<EdgeData> edges;
    for (const auto& je : jg.value("edges", json::array())) {
        EdgeData e;
        e.id = je.at("id").get<std::string>();
        require(plain_id(e.id), "problem: edge id must be alphanumeric: " + e.id);
        e.from = je.at("from").get<std::string>();
        e.to = je.at("to").get<std::string>();
        edges.push_back(std::move(e));
    }

    ProblemSpec p;
    p.graph = Graph(std::move(verts), std::move(edges));
    p.k = j.value("k", 0LL);
    json ja = j.value("A", json::object());  // keep alive: items() on a temporary dangles
    for (const auto& [leg, val] : ja.items()) p.a_by_leg[leg] = val.get<long long>();
    for (const auto& [vid, val] : j.at("theta").items()) {
        require(p.graph.has_vertex(vid), "problem: theta names unknown vertex " + vid);
        p.theta.values[vid] = parse_rat(val.get<std::string>());
    }
    (void)p.a();  // validates the leg set and the degree condition
    require(is_generic(p.graph, p.theta), "problem: theta is not generic");
    return p;
}

json problem_to_json(const ProblemSpec& p) {
    json jverts = json::array();
    for (const auto& v : p.graph.vertices()) {
        json jv;
        jv["id"] = v.id;
        jv["genus"] = v.genus;
        jv["legs"] = v.legs;
        jverts.push_back(jv);
    }
    json jedges = json::array();
    for (const auto& e : p.graph.edges()) jedges.push_back({{"id", e.id}, {"from", e.from}, {"to", e.to}});
    json ja = json::object();
    for (const auto& [leg, val] : p.a_by_leg) ja[leg] = val;
    json jtheta = json::object();
    for (const auto& [v, q] : p.theta.values) jtheta[v] = rat_str(q);
    return json{{"graph", {{"vertices", jverts}, {"edges", jedges}}},
                {"A", ja},
                {"k", p.k},
                {"theta", jtheta}};
}

ProblemSpec load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    json j;
    in >> j;
    return problem_from_json(j);
}

namespace {

json divisor_json(const Divisor& d) {
    json out = json::object();
    for (const auto& [v, x] : d.normalized().values) out[v] = x;
    return out;
}

json flow_json(const Flow& f) {
    json out = json::object();
    for (const auto& [e, s] : f.normalized().slope) out[e] = s;
    return out;
}

std::vector<std::string> model_edges(const Subdivision& model) {
    std::vector<std::string> out;
    for (const auto& e : model.target.edges())
        if (model.edge_fibers.at(e.id).size() > 1) out.push_back(e.id);
    return out;
}

json triple_json(const Fan& fan, int index) {
    const ThetaFlow& t = fan.triples[index];
    json out;
    out["index"] = index;
    out["model"] = model_edges(fan.model_of(t));
    out["divisor"] = divisor_json(t.divisor);
    out["flow"] = flow_json(t.flow);
    return out;
}

json rows_json(const std::vector<std::string>& coords, const ZMat& rows) {
    json out = json::array();
    for (const auto& r : rows) out.push_back(row_str(coords, r));
    return out;
}

json rays_json(const ZMat& rays) {
    json out = json::array();
    for (const auto& r : rays) {
        json row = json::array();
        for (const auto& v : r) row.push_back(to_ll(v));
        out.push_back(row);
    }
    return out;
}

json ordering_json(const Ordering& o) {
    json out = json::array();
    for (const auto& b : o.blocks) out.push_back(b);
    return out;
}

json lift_json(const EquidimensionalLift& lift) {
    json out;
    json gamma = json::array(), lens = json::array();
    for (const auto& f : lift.line.gamma) gamma.push_back(f.str());
    for (const auto& f : lift.line.edge_lengths) lens.push_back(f.str());
    out["line_vertices"] = lift.line.vertex_ids;
    out["line_gamma"] = gamma;
    out["line_lengths"] = lens;
    json vmap = json::object();
    for (const auto& [v, i] : lift.vertex_to_line) vmap[v] = i;
    out["vertex_map"] = vmap;
    json pos = json::object();
    for (const auto& [v, f] : lift.positions) pos[v] = f.str();
    out["positions"] = pos;
    json sub = json::object();
    for (const auto& [e, fiber] : lift.refinement.edge_fibers)
        if (fiber.size() > 1) sub[e] = fiber;
    out["subdivided"] = sub;
    return out;
}

}  // namespace

json flows_document(const ProblemSpec& p, const Fan& fan) {
    json out;
    out["schema"] = "tropfan.flows/1";
    out["problem"] = problem_to_json(p);
    json triples = json::array();
    long long on_base = 0, on_models = 0;
    for (size_t i = 0; i < fan.triples.size(); ++i) {
        triples.push_back(triple_json(fan, static_cast<int>(i)));
        if (model_edges(fan.model_of(fan.triples[i])).empty())
            ++on_base;
        else
            ++on_models;
    }
    out["triples"] = triples;
    out["counts"] = {{"on_base", on_base}, {"on_proper_models", on_models}};
    return out;
}

std::string flows_pretty(const ProblemSpec& p, const Fan& fan) {
    (void)p;
    std::ostringstream os;
    for (size_t i = 0; i < fan.triples.size(); ++i) {
        const ThetaFlow& t = fan.triples[i];
        os << "#" << i << "  model{";
        auto me = model_edges(fan.model_of(t));
        for (size_t k = 0; k < me.size(); ++k) os << (k ? "," : "") << me[k];
        os << "}  D{";
        bool first = true;
        for (const auto& [v, x] : t.divisor.normalized().values) {
            os << (first ? "" : ", ") << v << ":" << x;
            first = false;
        }
        os << "}  s{";
        first = true;
        for (const auto& [e, s] : t.flow.normalized().slope) {
            os << (first ? "" : ", ") << e << ":" << s;
            first = false;
        }
        os << "}\n";
    }
    long long on_base = 0, on_models = 0;
    for (const auto& t : fan.triples)
        (model_edges(fan.model_of(t)).empty() ? on_base : on_models)++;
    os << "total " << fan.triples.size() << " (on the base graph: " << on_base
       << ", on proper quasi-stable models: " << on_models << ")\n";
    return os.str();
}

json fan_document(const ProblemSpec& p, const Fan& fan, const VerificationReport* verification) {
    json out;
    out["schema"] = "tropfan.fan/1";
    out["kind"] = fan.rub ? "rub" : "div";
    out["problem"] = problem_to_json(p);
    out["ambient"] = base_coords(fan.base);
    out["triples"] = json::array();
    for (size_t i = 0; i < fan.triples.size(); ++i) out["triples"].push_back(triple_json(fan, static_cast<int>(i)));

    json cones = json::array();
    for (size_t ci = 0; ci < fan.cones.size(); ++ci) {
        const FanCone& fc = fan.cones[ci];
        json jc;
        jc["id"] = ci;
        jc["dim"] = fc.cone.dim();
        jc["maximal"] = fc.maximal;
        jc["rays"] = rays_json(fc.cone.rays());
        jc["equations"] = rows_json(fc.cone.coords(), fc.cone.equations());
        jc["inequalities"] = rows_json(fc.cone.coords(), fc.cone.inequalities());
        json labels = json::array();
        for (const auto& l : fc.labels) {
            json jl;
            jl["triple"] = l.triple_index;
            jl["model"] = model_edges(fan.model_of(fan.triples[l.triple_index]));
            jl["divisor"] = divisor_json(fan.triples[l.triple_index].divisor);
            jl["flow"] = flow_json(fan.triples[l.triple_index].flow);
            if (l.ordering) jl["ordering"] = ordering_json(*l.ordering);
            labels.push_back(jl);
        }
        jc["labels"] = labels;
        if (fc.extended) {
            jc["extended"] = {{"coords", fc.extended->coords()},
                              {"equations", rows_json(fc.extended->coords(), fc.extended->equations())},
                              {"inequalities", rows_json(fc.extended->coords(), fc.extended->inequalities())},
                              {"rays", rays_json(fc.extended->rays())}};
        }
        if (fc.lattice) {
            jc["sublattice"] = {{"generators", rays_json(fc.lattice->gens)},
                                {"index", lattice_index(*fc.lattice).get_str()}};
        }
        if (fc.lift) jc["lift"] = lift_json(*fc.lift);
        cones.push_back(jc);
    }
    out["cones"] = cones;
    json faces = json::array();
    for (const auto& [i, j] : fan.face_pairs) faces.push_back({i, j});
    out["faces"] = faces;
    if (verification) out["verification"] = report_to_json(*verification);
    return out;
}

std::string fan_pretty(const json& doc) {
    std::ostringstream os;
    os << doc.at("kind").get<std::string>() << " fan, ambient [";
    const auto& amb = doc.at("ambient");
    for (size_t i = 0; i < amb.size(); ++i) os << (i ? "," : "") << amb[i].get<std::string>();
    os << "]\n";
    for (const auto& jc : doc.at("cones")) {
        os << "cone " << jc.at("id") << "  dim " << jc.at("dim") << (jc.at("maximal").get<bool>() ? "  maximal" : "")
           << "\n";
        for (const auto& eq : jc.at("equations")) os << "    " << eq.get<std::string>() << " = 0\n";
        if (jc.contains("sublattice"))
            os << "    lattice index " << jc.at("sublattice").at("index").get<std::string>() << "\n";
        for (const auto& jl : jc.at("labels")) {
            os << "    label: triple " << jl.at("triple");
            if (jl.contains("ordering")) {
                os << "  ordering ";
                for (const auto& b : jl.at("ordering")) {
                    os << "[";
                    for (size_t i = 0; i < b.size(); ++i) os << (i ? " " : "") << b[i].get<std::string>();
                    os << "]";
                }
            }
            os << "\n";
        }
    }
    if (doc.contains("verification"))
        os << "verification: " << (doc.at("verification").at("pass").get<bool>() ? "pass" : "FAIL") << "\n";
    return os.str();
}

json report_to_json(const VerificationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        json jc;
        jc["name"] = c.name;
        jc["pass"] = c.pass;
        jc["witness"] = c.witness;
        checks.push_back(jc);
    }
    return json{{"box", r.box}, {"pass", r.pass()}, {"checks", checks}};
}

namespace {

// Exact counterclockwise sort of convex-position points around their mean,
// projecting a 3d slice to the last two coordinates.
void sort_polygon(std::vector<QVec>& pts) {
    if (pts.size() <= 2) {
        std::sort(pts.begin(), pts.end());
        return;
    }
    const size_t n = pts[0].size();
    size_t ix = n >= 2 ? n - 2 : 0, iy = n - 1;
    QVec center(pts[0].size(), Rat(0));
    for (const auto& p : pts)
        for (size_t i = 0; i < p.size(); ++i) center[i] += p[i];
    for (auto& c : center) c /= Rat(static_cast<long>(pts.size()));

    auto half = [&](const QVec& p) {
        Rat dx = p[ix] - center[ix], dy = p[iy] - center[iy];
        return (dy > 0 || (dy == 0 && dx > 0)) ? 0 : 1;
    };
    std::sort(pts.begin(), pts.end(), [&](const QVec& a, const QVec& b) {
        int ha = half(a), hb = half(b);
        if (ha != hb) return ha < hb;
        Rat ax = a[ix] - center[ix], ay = a[iy] - center[iy];
        Rat bx = b[ix] - center[ix], by = b[iy] - center[iy];
        Rat cross = ax * by - ay * bx;
        if (cross != 0) return cross > 0;
        return a < b;
    });
}

}  // namespace

json slice_document(const json& fan_doc, const std::vector<Rat>& weights) {
    const auto& ambient = fan_doc.at("ambient");
    const size_t n = ambient.size();
    if (n != 2 && n != 3) throw std::invalid_argument("slice: ambient dimension must be 2 or 3");
    if (weights.size() != n) throw std::invalid_argument("slice: need one positive weight per coordinate");
    for (const auto& w : weights)
        if (w <= 0) throw std::invalid_argument("slice: weights must be positive");

    json regions = json::array();
    for (const auto& jc : fan_doc.at("cones")) {
        int dim = jc.at("dim").get<int>();
        if (dim < 1) continue;
        std::vector<QVec> pts;
        for (const auto& jr : jc.at("rays")) {
            QVec r;
            Rat scale = 0;
            for (size_t i = 0; i < n; ++i) {
                Rat v = rat_of(jr[i].get<long long>());
                r.push_back(v);
                scale += v * weights[i];
            }
            for (auto& v : r) v /= scale;
            pts.push_back(std::move(r));
        }
        sort_polygon(pts);
        json jverts = json::array();
        for (const auto& p : pts) {
            json row = json::array();
            for (const auto& v : p) row.push_back(rat_str(v));
            jverts.push_back(row);
        }
        json region;
        region["cone"] = jc.at("id");
        region["dim"] = dim;
        region["maximal"] = jc.at("maximal");
        region["vertices"] = jverts;
        regions.push_back(region);
    }
    json out;
    out["schema"] = "tropfan.slice/1";
    out["ambient"] = ambient;
    json jw = json::array();
    for (const auto& w : weights) jw.push_back(rat_str(w));
    out["weights"] = jw;
    out["regions"] = regions;
    return out;
}

namespace {

std::string decimal(const Rat& q, int digits) {
    Int scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    Rat scaled = q * Rat(scale);
    Int rounded = rat_floor(scaled + Rat(1, 2));
    bool neg = rounded < 0;
    Int a = abs(rounded);
    std::string s = a.get_str();
    while (static_cast<int>(s.size()) <= digits) s = "0" + s;
    s.insert(s.size() - digits, ".");
    return (neg ? "-" : "") + s;
}

}  // namespace

std::string slice_svg(const json& slice_doc) {
    const size_t n = slice_doc.at("ambient").size();
    const int W = 640;
    // Affine chart: 3d barycentric (a,b,c) -> (b + c/2, c); 2d -> (b, 0..1 strip).
    auto place = [&](const std::vector<Rat>& p) {
        Rat x, y;
        if (n == 3) {
            x = p[1] + p[2] / 2;
            y = p[2];
        } else {
            x = p[1];
            y = 0;
        }
        Rat px = Rat(40) + x * Rat(W - 80);
        Rat py = Rat(W - 60) - y * Rat(W - 120);
        return std::make_pair(px, py);
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << W << "\">\n";
    const char* fills[] = {"#dbeafe", "#dcfce7", "#fef9c3", "#fde2e2", "#ede9fe", "#d1fae5", "#fce7f3", "#e0f2fe"};
    int fill_idx = 0;
    // Maximal regions first (polygons), then lower cells as strokes.
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& region : slice_doc.at("regions")) {
            bool maximal = region.at("maximal").get<bool>();
            if ((pass == 0) != maximal) continue;
            std::vector<std::vector<Rat>> pts;
            for (const auto& jv : region.at("vertices")) {
                std::vector<Rat> p;
                for (const auto& c : jv) p.push_back(parse_rat(c.get<std::string>()));
                pts.push_back(std::move(p));
            }
            if (pts.empty()) continue;
            std::ostringstream path;
            for (size_t i = 0; i < pts.size(); ++i) {
                auto [x, y] = place(pts[i]);
                path << (i ? " L " : "M ") << decimal(x, 3) << " " << decimal(y, 3);
            }
            path << " Z";
            if (maximal) {
                os << "  <path d=\"" << path.str() << "\" fill=\"" << fills[fill_idx % 8]
                   << "\" stroke=\"#333\" stroke-width=\"0.6\"/>\n";
                ++fill_idx;
            } else if (pts.size() >= 2) {
                os << "  <path d=\"" << path.str() << "\" fill=\"none\" stroke=\"#b91c1c\" stroke-width=\"1.4\"/>\n";
            }
        }
    }
    os << "</svg>\n";
    return os.str();
}

StabilityCondition suggest_theta(const Graph& g, const std::string& signs, const Rat& total) {
    const int n = g.vertex_count();
    if (static_cast<int>(signs.size()) != n)
        throw std::invalid_argument("suggest-theta: need one sign per vertex");
    std::vector<int> sgn(n);
    long long pos = 0, neg = 0;
    for (int i = 0; i < n; ++i) {
        if (signs[i] == '+') sgn[i] = 1, ++pos;
        else if (signs[i] == '-') sgn[i] = -1, ++neg;
        else throw std::invalid_argument("suggest-theta: signs must be '+' or '-'");
    }
    if (n > 1 && (pos == 0 || neg == 0))
        throw std::invalid_argument("suggest-theta: pattern needs both signs to preserve the total");

    // Perturbation around total/n: odd multiples within each sign class are
    // scaled so the two classes cancel exactly and the total is preserved.
    for (int attempt = 0; attempt < 40; ++attempt) {
        Rat q(Int(1), Int(4) << attempt);
        q.canonicalize();
        long long odd_pos = 0, odd_neg = 0, next_odd = 1;
        std::vector<long long> odd(n);
        for (int i = 0; i < n; ++i) {
            odd[i] = next_odd;
            next_odd += 2;
            (sgn[i] > 0 ? odd_pos : odd_neg) += odd[i];
        }
        StabilityCondition theta;
        for (int i = 0; i < n; ++i) {
            Rat x = q * rat_of(odd[i]);
            if (n > 1) x /= rat_of(sgn[i] > 0 ? odd_pos : odd_neg);
            theta.values[g.vertices()[i].id] = total / Rat(n) + Rat(sgn[i]) * x;
        }
        if (n == 1) theta.values[g.vertices()[0].id] = total + Rat(sgn[0]) * q;
        if (is_generic(g, theta)) return theta;
    }
    throw std::runtime_error("suggest-theta: no generic vector found for this pattern");
}

}  // namespace tropfan
