#include "tropfan/stability.hpp"

#include <functional>
#include <stdexcept>

namespace tropfan {

namespace {

// Applies fn to every nonempty proper vertex subset, given as a bitmask over
// the vertex list; stops early when fn returns false.
bool for_each_proper_subset(const Graph& g, const std::function<bool(unsigned long)>& fn) {
    const int n = g.vertex_count();
    if (n > 24) throw std::invalid_argument("vertex subset scan limited to 24 vertices");
    const unsigned long full = (1UL << n) - 1;
    for (unsigned long mask = 1; mask < full; ++mask)
        if (!fn(mask)) return false;
    return true;
}

long long cut_of_mask(const Graph& g, unsigned long mask) {
    long long cut = 0;
    for (const auto& e : g.edges()) {
        bool a = mask >> g.vertex_index(e.from) & 1;
        bool b = mask >> g.vertex_index(e.to) & 1;
        if (a != b) ++cut;
    }
    return cut;
}

}  // namespace

long long cut_size(const Graph& g, const std::set<std::string>& S) {
    unsigned long mask = 0;
    for (const auto& v : S) mask |= 1UL << g.vertex_index(v);
    return cut_of_mask(g, mask);
}

bool is_generic(const Graph& g, const StabilityCondition& theta) {
    for (const auto& [v, _] : theta.values) (void)g.vertex(v);
    return for_each_proper_subset(g, [&](unsigned long mask) {
        Rat ts = 0;
        for (int i = 0; i < g.vertex_count(); ++i)
            if (mask >> i & 1) ts += theta.at(g.vertices()[i].id);
        Rat half = rat_of(cut_of_mask(g, mask), 2);
        return !is_integer(ts + half) && !is_integer(ts - half);
    });
}

StabilityCondition lift_to_model(const Subdivision& model, const StabilityCondition& theta) {
    StabilityCondition out;
    for (const auto& v : model.source.vertices())
        out.values[v.id] = model.exceptional.count(v.id) ? Rat(0) : theta.at(v.id);
    return out;
}

bool is_admissible(const Subdivision& model, const Divisor& d) {
    for (const auto& u : model.exceptional)
        if (d.at(u) != 1) return false;
    return true;
}

namespace {

// 0 = fails the sandwich, 1 = semistable with some equality, 2 = strict.
int sandwich_class(const Subdivision& model, const Divisor& d, const StabilityCondition& theta) {
    for (const auto& [v, _] : d.values) (void)model.source.vertex(v);
    if (!model.exceptional.empty() && !is_admissible(model, d))
        throw std::invalid_argument("divisor is not admissible on the subdivided model");
    StabilityCondition th = lift_to_model(model, theta);
    const Graph& g = model.source;
    int cls = 2;
    bool ok = for_each_proper_subset(g, [&](unsigned long mask) {
        Rat ts = 0;
        long long ds = 0;
        for (int i = 0; i < g.vertex_count(); ++i)
            if (mask >> i & 1) {
                ts += th.at(g.vertices()[i].id);
                ds += d.at(g.vertices()[i].id);
            }
        Rat half = rat_of(cut_of_mask(g, mask), 2);
        Rat lo = ts - half, hi = ts + half;
        Rat dv = rat_of(ds);
        if (dv < lo || dv > hi) return false;
        if (dv == lo || dv == hi) cls = 1;
        return true;
    });
    return ok ? cls : 0;
}

}  // namespace

bool is_semistable(const Subdivision& model, const Divisor& d, const StabilityCondition& theta) {
    return sandwich_class(model, d, theta) >= 1;
}

bool is_stable_divisor(const Subdivision& model, const Divisor& d, const StabilityCondition& theta) {
    return sandwich_class(model, d, theta) == 2;
}

std::vector<Divisor> enumerate_theta_divisors(const Subdivision& model, const StabilityCondition& theta,
                                              long long degree) {
    if (!is_generic(model.target, theta))
        throw std::invalid_argument("enumerate_theta_divisors: theta is not generic on the base graph");

    const Graph& g = model.source;
    StabilityCondition th = lift_to_model(model, theta);

    std::vector<Divisor> out;
    if (g.vertex_count() == 1) {
        Divisor d;
        d.values[g.vertices()[0].id] = degree;
        if (is_semistable(model, d, theta)) out.push_back(d.normalized());
        return out;
    }

    // Singleton sandwich bounds give a finite box per vertex; exceptional
    // vertices are pinned to 1 by admissibility.
    std::vector<long long> lo(g.vertex_count()), hi(g.vertex_count());
    for (int i = 0; i < g.vertex_count(); ++i) {
        const auto& v = g.vertices()[i];
        if (model.exceptional.count(v.id)) {
            lo[i] = hi[i] = 1;
            continue;
        }
        Rat half = rat_of(g.valence(v.id), 2);
        lo[i] = to_ll(rat_ceil(th.at(v.id) - half));
        hi[i] = to_ll(rat_floor(th.at(v.id) + half));
    }

    std::vector<long long> vals(g.vertex_count());
    std::function<void(int, long long)> rec = [&](int i, long long sum) {
        if (i == g.vertex_count()) {
            if (sum != degree) return;
            Divisor d;
            for (int j = 0; j < g.vertex_count(); ++j) d.values[g.vertices()[j].id] = vals[j];
            if (is_semistable(model, d, theta)) out.push_back(d.normalized());
            return;
        }
        long long rest_lo = 0, rest_hi = 0;
        for (int j = i; j < g.vertex_count(); ++j) {
            rest_lo += lo[j];
            rest_hi += hi[j];
        }
        if (sum + rest_lo > degree || sum + rest_hi < degree) return;
        for (long long x = lo[i]; x <= hi[i]; ++x) {
            vals[i] = x;
            rec(i + 1, sum + x);
        }
    };
    rec(0, 0);
    return out;
}

StabilityCondition specialize_theta(const StabilityCondition& theta, const Contraction& c) {
    StabilityCondition out;
    for (const auto& [v, x] : theta.values) {
        auto& slot = out.values[c.vertex_map.at(v)];
        slot += x;
    }
    return out;
}

}  // namespace tropfan
