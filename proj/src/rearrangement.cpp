#include "aniso/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aniso {

Profile distribution(const GridFunction& u, int levels) {
    const Grid& g = u.grid;
    double e = essinf(u);
    double mx = *std::max_element(u.v.begin(), u.v.end());
    // boundary constancy: a trial function must sit at essinf near the rim,
    // otherwise it does not decay and has no finite distribution function
    const int nz = g.dim > 2 ? g.nodes(2) : 1;
    double range = std::max(mx - e, 1e-300);
    for (int i = 0; i < g.nodes(0); ++i)
        for (int j = 0; j < g.nodes(1); ++j)
            for (int k = 0; k < nz; ++k) {
                bool rim = i == 0 || i == g.nodes(0) - 1 || j == 0 || j == g.nodes(1) - 1;
                if (g.dim > 2) rim = rim || k == 0 || k == nz - 1;
                if (rim && std::fabs(u.v[g.flat(i, j, k)] - e) > 1e-9 * range)
                    throw Error("not-decaying",
                                "function is not constant on the grid boundary ring");
            }
    Profile mu;
    mu.nonincreasing = true;
    mu.dup_take_last = true;
    if (mx <= e) {
        mu.x = {e};
        mu.y = {0.0};
        return mu;
    }
    std::vector<double> vals = u.v;
    std::sort(vals.begin(), vals.end());
    const double cellvol = g.cell_volume();
    mu.x.resize(levels);
    mu.y.resize(levels);
    for (int j = 0; j < levels; ++j) {
        double t = e + (mx - e) * j / (levels - 1);
        auto it = std::upper_bound(vals.begin(), vals.end(), t);
        mu.x[j] = t;
        mu.y[j] = static_cast<double>(vals.end() - it) * cellvol;
    }
    return mu;
}

Profile decreasing_rearrangement(const Profile& mu) {
    if (!is_monotone(mu) || !mu.nonincreasing)
        throw Error("argument", "distribution profile must be nonincreasing");
    return generalized_inverse(mu, /*sup_flavor=*/false);
}

namespace {

// gauge value and the active facet gradient of the gauge
struct GaugeEval {
    double value = 0.0;
    Vec grad{};
};

GaugeEval gauge_with_grad(const ConvexBody& K, const Vec& x, int dim) {
    GaugeEval out;
    for (const Facet& f : K.facets) {
        double v = dot(f.normal, x, dim) / f.offset;
        if (v > out.value) {
            out.value = v;
            out.grad = scale(1.0 / f.offset, f.normal);
        }
    }
    return out;
}

Profile midpoint_rearrangement(const GridFunction& u) {
    const double cellvol = u.grid.cell_volume();
    std::vector<double> vals = u.v;
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    Profile us;
    us.nonincreasing = true;
    us.dup_take_last = true;
    for (std::size_t i = 0; i < vals.size();) {
        std::size_t j = i;
        while (j + 1 < vals.size() && vals[j + 1] == vals[i]) ++j;
        // interior plateaus sit at their midpoint rank; the extreme classes
        // anchor at their inner edge so the max plateau keeps its full
        // measure and the field reaches essinf exactly at the support volume
        double anchor = (static_cast<double>(i + j + 1) / 2.0);
        if (i == 0) anchor = static_cast<double>(j + 1);
        if (j + 1 == vals.size()) anchor = static_cast<double>(i);
        us.x.push_back(anchor * cellvol);
        us.y.push_back(vals[i]);
        i = j + 1;
    }
    return us;
}

void check_symmetral_fits(const GridFunction& u, const ConvexBody& K, double kappa) {
    const Grid& g = u.grid;
    double e = essinf(u);
    std::size_t nsupp = 0;
    for (double v : u.v)
        if (v > e) ++nsupp;
    double v0 = static_cast<double>(nsupp) * g.cell_volume();
    if (v0 <= 0) return;
    double c = std::pow(v0 / kappa, 1.0 / g.dim);
    for (const Vec& vtx : K.vertices) {
        Vec p = scale(c, vtx);
        for (int a = 0; a < g.dim; ++a)
            if (p[a] < g.lo[a] || p[a] > g.hi[a])
                throw Error("argument", "symmetral support would be clipped by the grid box");
    }
}

}  // namespace

GridFunction symmetral(const GridFunction& u, const ConvexBody& K) {
    return symmetral_with_gradient(u, K).field;
}

SymmetralField symmetral_with_gradient(const GridFunction& u, const ConvexBody& K) {
    const Grid& g = u.grid;
    if (!K.contains_origin_interior)
        throw Error("degenerate-gauge", "0 must be interior to the symmetrization body");
    distribution(u, 2);  // decay check only
    Profile us = midpoint_rearrangement(u);
    const double kappa = K.volume;
    check_symmetral_fits(u, K, kappa);
    const int dim = g.dim;
    SymmetralField out;
    out.field.grid = g;
    out.field.v.resize(u.v.size());
    out.grad.grid = g;
    for (int a = 0; a < 3; ++a) out.grad.comp[a].assign(u.v.size(), 0.0);
    const int nz = dim > 2 ? g.nodes(2) : 1;
    const double cellvol = g.cell_volume();
    for (int i = 0; i < g.nodes(0); ++i)
        for (int j = 0; j < g.nodes(1); ++j)
            for (int k = 0; k < nz; ++k) {
                std::size_t f = g.flat(i, j, k);
                GaugeEval ge = gauge_with_grad(K, g.node(i, j, k), dim);
                double v = kappa * std::pow(ge.value, dim);
                out.field.v[f] = eval(us, v);
                // profile slope over a window of about two level rings,
                // capped so the secant never reaches across half the volume
                // to either profile end
                double ring = dim * std::pow(kappa, 1.0 / dim) *
                              std::pow(std::max(v, cellvol), (dim - 1.0) / dim) *
                              std::min(g.h(0), g.h(1));
                double delta = std::clamp(2.0 * ring, 4.0 * cellvol,
                                          std::max(0.5 * v, 4.0 * cellvol));
                double slope = (eval(us, v + delta) - eval(us, std::max(v - delta, 0.0))) /
                               (delta + std::min(v, delta));
                double factor = slope * kappa * dim * std::pow(ge.value, dim - 1);
                for (int a = 0; a < dim; ++a) out.grad.comp[a][f] = factor * ge.grad[a];
            }
    return out;
}

YoungND integrand_symmetral(const YoungND& phi, const ConvexBody& K, int res) {
    if (!K.contains_origin_interior)
        throw Error("degenerate-gauge", "0 must be interior to the symmetrization body");
    YoungND s = is_sampled(phi) ? phi : sample(phi, preferred_grid(phi, res));
    SortedSamples ss = sort_samples(s);
    if (ss.sorted.empty()) throw Error("argument", "integrand has empty effective domain");
    YoungND out;
    out.kind = YoungND::Kind::Symmetral;
    out.dim = s.dim;
    out.spec = phi.spec.empty() ? "symmetral" : phi.spec + ":sym";
    out.sym_body = K;
    out.kappa = K.volume;
    out.src_cellvol = ss.cellvol;
    out.dom_volume = static_cast<double>(ss.sorted.size()) * ss.cellvol;
    // collapse tied values into classes anchored at their midpoint volume:
    // boundary rings of sampled level sets share one node value, and full
    // weighting would inflate sub-level volumes by half a cell layer
    std::size_t i = 0;
    while (i < ss.sorted.size()) {
        std::size_t j = i;
        while (j + 1 < ss.sorted.size() && ss.sorted[j + 1] == ss.sorted[i]) ++j;
        // extreme classes anchor at their inner edge (the zero class of an
        // indicator must carry its full volume), interior ties at midpoint
        double anchor = (static_cast<double>(i + j + 1) / 2.0);
        if (i == 0) anchor = static_cast<double>(j + 1);
        if (j + 1 == ss.sorted.size()) anchor = static_cast<double>(i);
        out.quantiles.push_back(ss.sorted[i]);
        out.quantile_vols.push_back(anchor * ss.cellvol);
        i = j + 1;
    }
    out.grid = s.grid;  // carries the natural sampling box along
    return out;
}

TripleSymmetral triple_symmetral(const YoungND& phi, const ConvexBody& K,
                                 const TripleConfig& cfg) {
    Grid gin;
    if (is_sampled(phi)) {
        gin = phi.grid;
    } else if (cfg.halfwidth > 0) {
        gin = make_grid2(-cfg.halfwidth, cfg.halfwidth, cfg.res);
    } else {
        gin = preferred_grid(phi, cfg.res);
    }
    TripleSymmetral out;
    YoungND s = sample(phi, gin);
    Grid dual = auto_conjugate_grid(s);
    out.conj = conjugate_fast(s, dual);
    out.sym = integrand_symmetral(out.conj, K);
    out.sym_sampled = sample(out.sym, dual);
    out.triple = conjugate_fast(out.sym_sampled, gin);
    Rng rng(cfg.seed);
    out.check = validate_young(out.triple, rng);
    return out;
}

}  // namespace aniso
