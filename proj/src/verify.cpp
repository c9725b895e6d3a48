#include "aniso/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>

namespace aniso {

namespace {

struct ValueOrder {
    std::vector<std::uint32_t> idx;  // node indices sorted by value ascending
    std::vector<double> val;         // the values in that order
    std::vector<double> cumx, cumy;  // prefix coordinate sums (for barycenters)
};

ValueOrder value_order(const Grid& g, const std::vector<double>& v) {
    ValueOrder vo;
    vo.idx.resize(v.size());
    std::iota(vo.idx.begin(), vo.idx.end(), 0u);
    std::sort(vo.idx.begin(), vo.idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        return v[a] < v[b] || (v[a] == v[b] && a < b);
    });
    vo.val.resize(v.size());
    vo.cumx.resize(v.size() + 1, 0.0);
    vo.cumy.resize(v.size() + 1, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        vo.val[i] = v[vo.idx[i]];
        Vec p = g.node_from_flat(vo.idx[i]);
        vo.cumx[i + 1] = vo.cumx[i] + p[0];
        vo.cumy[i + 1] = vo.cumy[i] + p[1];
    }
    return vo;
}

std::size_t first_geq(const ValueOrder& vo, double t) {
    return std::lower_bound(vo.val.begin(), vo.val.end(), t) - vo.val.begin();
}

// node indices with value in (t - dt/2, t + dt/2]
std::pair<std::size_t, std::size_t> band_range(const ValueOrder& vo, double t, double dt) {
    std::size_t lo = std::upper_bound(vo.val.begin(), vo.val.end(), t - 0.5 * dt) - vo.val.begin();
    std::size_t hi = std::upper_bound(vo.val.begin(), vo.val.end(), t + 0.5 * dt) - vo.val.begin();
    return {lo, hi};
}

// support of the hat kernel (t - dt, t + dt); used with hat_weight below
std::pair<std::size_t, std::size_t> hat_range(const ValueOrder& vo, double t, double dt) {
    std::size_t lo = std::upper_bound(vo.val.begin(), vo.val.end(), t - dt) - vo.val.begin();
    std::size_t hi = std::upper_bound(vo.val.begin(), vo.val.end(), t + dt) - vo.val.begin();
    return {lo, hi};
}

inline double hat_weight(double val, double t, double dt) {
    return std::max(0.0, 1.0 - std::fabs(val - t) / dt);
}

double cross2(const Vec& o, const Vec& a, const Vec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Convex hull of the filtered node stream; nodes arrive in (x,y) lexicographic
// order, keep(i) decides membership. Returns CCW hull.
std::vector<Vec> hull_filtered(const std::vector<Vec>& pts,
                               const std::function<bool(std::size_t)>& keep) {
    std::vector<Vec> low, up;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!keep(i)) continue;
        const Vec& p = pts[i];
        while (low.size() >= 2 && cross2(low[low.size() - 2], low.back(), p) <= 0) low.pop_back();
        low.push_back(p);
        while (up.size() >= 2 && cross2(up[up.size() - 2], up.back(), p) >= 0) up.pop_back();
        up.push_back(p);
    }
    if (low.size() <= 1) return low;
    std::vector<Vec> hull(low.begin(), low.end() - 1);
    for (std::size_t i = up.size() - 1; i > 0; --i) hull.push_back(up[i]);
    return hull;
}

double hull_area(const std::vector<Vec>& h) {
    if (h.size() < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const Vec& a = h[i];
        const Vec& b = h[(i + 1) % h.size()];
        s += a[0] * b[1] - b[0] * a[1];
    }
    return 0.5 * s;
}

double hull_support(const std::vector<Vec>& h, const Vec& dir) {
    double best = -kInf;
    for (const Vec& v : h) best = std::max(best, dir[0] * v[0] + dir[1] * v[1]);
    return best;
}

// coordinates of all nodes in lexicographic order, with the value permuted in
struct XOrder {
    std::vector<Vec> pts;
    std::vector<double> vals;
};

XOrder x_order(const Grid& g, const std::vector<double>& v) {
    XOrder xo;
    std::vector<std::uint32_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        Vec pa = g.node_from_flat(a), pb = g.node_from_flat(b);
        return pa[0] < pb[0] || (pa[0] == pb[0] && pa[1] < pb[1]);
    });
    xo.pts.reserve(v.size());
    xo.vals.reserve(v.size());
    for (auto i : idx) {
        xo.pts.push_back(g.node_from_flat(i));
        xo.vals.push_back(v[i]);
    }
    return xo;
}

double lipschitz_on_range(const YoungND& phi, const VectorField& grad, int dim) {
    double worst = 0.0;
    std::size_t n = grad.comp[0].size();
    std::size_t stride = std::max<std::size_t>(1, n / 4096);
    for (std::size_t i = 0; i < n; i += stride) {
        Vec g = grad.at(i);
        double step = 1e-4 * (1.0 + norm2(g, dim));
        for (int a = 0; a < dim; ++a) {
            Vec gp = g, gm = g;
            gp[a] += step;
            gm[a] -= step;
            double vp = eval(phi, gp), vm = eval(phi, gm);
            if (!std::isfinite(vp) || !std::isfinite(vm)) continue;
            worst = std::max(worst, std::fabs(vp - vm) / (2 * step));
        }
    }
    return worst;
}

constexpr double kGradFloor = 1e-8;

}  // namespace

Pipeline build_pipeline(const GridFunction& u, const YoungND& phi, const ConvexBody& K,
                        const VerifyConfig& cfg) {
    Pipeline P;
    P.u = u;
    P.gu = gradient(u);
    SymmetralField sf = symmetral_with_gradient(u, K);
    P.uK = std::move(sf.field);
    P.guK = std::move(sf.grad);
    P.phi = phi;

    Grid gin;
    if (is_sampled(phi)) {
        gin = phi.grid;
    } else if (cfg.young_halfwidth > 0) {
        gin = make_grid2(-cfg.young_halfwidth, cfg.young_halfwidth, cfg.young_res);
    } else {
        gin = preferred_grid(phi, cfg.young_res);
    }
    // the gradient ranges must live inside the integrand box
    for (const VectorField* gf : {&P.gu, &P.guK}) {
        for (std::size_t i = 0; i < u.v.size(); ++i) {
            Vec g = gf->at(i);
            for (int a = 0; a < u.grid.dim; ++a)
                if (g[a] < gin.lo[a] || g[a] > gin.hi[a])
                    throw Error("precondition", "gradient component " + fmt_g17(g[a]) +
                                                    " leaves the integrand box");
        }
    }
    P.phi_s = sample(phi, gin);
    Grid dual = auto_conjugate_grid(P.phi_s);
    P.conj = conjugate_fast(P.phi_s, dual);
    P.sym = integrand_symmetral(P.conj, K);
    P.sym_sampled = sample(P.sym, dual);
    P.triple = conjugate_fast(P.sym_sampled, gin);
    double smax = P.sym.quantiles.back();
    P.level_grid = geometric_levels(smax, 200);
    // beyond the largest sampled value the sub-level volume saturates, so the
    // profile max is always bracketed
    P.level_grid.push_back(1.25 * smax);
    P.level_grid.push_back(1.5 * smax);
    P.rhs = dirichlet_functional(u, phi, &P.gu);
    P.lhs = dirichlet_functional(P.uK, P.triple, &P.guK);
    return P;
}

namespace {

struct LevelWork {
    ValueOrder u_vo, uK_vo;
    XOrder u_xo, conj_xo;
    SortedSamples conj_sorted, sym_sorted;
    std::vector<double> conj_cumx, conj_cumy;  // prefix sums over conj_sorted
};

LevelWork make_level_work(const Pipeline& P) {
    LevelWork W;
    W.u_vo = value_order(P.u.grid, P.u.v);
    W.uK_vo = value_order(P.uK.grid, P.uK.v);
    W.u_xo = x_order(P.u.grid, P.u.v);
    W.conj_xo = x_order(P.conj.grid, P.conj.values);
    W.conj_sorted = sort_samples(P.conj);
    W.sym_sorted = sort_samples(P.sym_sampled);
    W.conj_cumx.assign(W.conj_sorted.order.size() + 1, 0.0);
    W.conj_cumy.assign(W.conj_sorted.order.size() + 1, 0.0);
    for (std::size_t i = 0; i < W.conj_sorted.order.size(); ++i) {
        Vec p = P.conj.grid.node_from_flat(W.conj_sorted.order[i]);
        W.conj_cumx[i + 1] = W.conj_cumx[i] + p[0];
        W.conj_cumy[i + 1] = W.conj_cumy[i] + p[1];
    }
    return W;
}

// median maximizer of the concave profile over a subsample of the band
struct LevelS {
    double s = 0, spread = 0;
    bool ok = false;
};

LevelS level_s(const Pipeline& P, const LevelWork& W, double t, double dt) {
    auto [lo, hi] = band_range(W.uK_vo, t, dt);
    LevelS out;
    if (hi <= lo) return out;
    std::vector<double> ss;
    std::size_t count = hi - lo;
    std::size_t stride = std::max<std::size_t>(1, count / 32);
    for (std::size_t i = lo; i < hi; i += stride) {
        std::uint32_t node = W.uK_vo.idx[i];
        Vec g = P.guK.at(node);
        if (norm2(g, P.u.grid.dim) < kGradFloor) continue;
        MaximizerResult mr = maximizer_profile(P.sym, g, P.level_grid);
        ss.push_back(mr.s);
    }
    if (ss.empty()) return out;
    std::sort(ss.begin(), ss.end());
    out.s = ss[ss.size() / 2];
    out.spread = ss.back() - ss.front();
    out.ok = true;
    return out;
}

}  // namespace

Report verify_inequality(const GridFunction& u, const YoungND& phi, const ConvexBody& K,
                         const VerifyConfig& cfg) {
    Report R;
    R.seed = cfg.seed;
    Pipeline P = build_pipeline(u, phi, K, cfg);
    R.lhs = P.lhs;
    R.rhs = P.rhs;

    const int dim = u.grid.dim;
    double hmax = 0.0;
    for (int a = 0; a < dim; ++a) hmax = std::max(hmax, u.grid.h(a));
    double dt = cfg.band_dt > 0 ? cfg.band_dt : default_band_width(u, P.gu);
    R.band_dt = dt;
    R.lip_phi = lipschitz_on_range(phi, P.gu, dim);
    std::size_t nsupp = 0;
    for (std::size_t i = 0; i < u.v.size(); ++i)
        if (P.gu.magnitude(i) > 1e-9) ++nsupp;
    R.supp_grad = static_cast<double>(nsupp) * u.grid.cell_volume();
    R.err_estimate = cfg.err_c1 * hmax * R.lip_phi * R.supp_grad +
                     cfg.err_c2 * dt * cfg.levels;

    // content hash over the trial data and the catalog identifiers
    {
        std::string bytes(reinterpret_cast<const char*>(u.v.data()), u.v.size() * sizeof(double));
        bytes += phi.spec;
        for (const Vec& v : K.vertices)
            bytes.append(reinterpret_cast<const char*>(v.data()), 2 * sizeof(double));
        R.input_hash = fnv1a_hex(bytes);
    }

    double e = essinf(u);
    double mx = *std::max_element(u.v.begin(), u.v.end());
    double range = mx - e;
    const double cellvol = u.grid.cell_volume();

    LevelWork W;
    if (dim == 2 && range > 0) W = make_level_work(P);
    for (int li = 0; dim == 2 && range > 0 && li < cfg.levels; ++li) {
        ChainLevel row;
        row.t = e + range * (0.05 + 0.90 * li / std::max(1, cfg.levels - 1));
        row.dt = dt;
        LevelS ls = level_s(P, W, row.t, dt);
        if (!ls.ok) {
            R.chain.push_back(row);
            continue;
        }
        row.s_t = ls.s;
        row.s_spread = ls.spread;
        double s_t = ls.s;

        auto [ulo, uhi] = hat_range(W.u_vo, row.t, dt);
        auto [klo, khi] = hat_range(W.uK_vo, row.t, dt);

        std::vector<Vec> hull_conj = hull_filtered(
            W.conj_xo.pts, [&](std::size_t i) { return W.conj_xo.vals[i] <= s_t; });

        std::vector<double> t1, t2, t5, t6, bK;
        for (std::size_t i = ulo; i < uhi; ++i) {
            std::uint32_t node = W.u_vo.idx[i];
            Vec g = P.gu.at(node);
            if (norm2(g, dim) < kGradFloor) continue;
            double w = hat_weight(W.u_vo.val[i], row.t, dt);
            t1.push_back(w * eval(phi, g));
            t2.push_back(w * (hull_support(hull_conj, g) - s_t));
        }
        double Vsym_st = symmetral_level_volume(P.sym, s_t);
        double c_sym = std::pow(Vsym_st / P.sym.kappa, 1.0 / dim);
        for (std::size_t i = klo; i < khi; ++i) {
            std::uint32_t node = W.uK_vo.idx[i];
            Vec g = P.guK.at(node);
            if (norm2(g, dim) < kGradFloor) continue;
            double w = hat_weight(W.uK_vo.val[i], row.t, dt);
            bK.push_back(w);
            t5.push_back(w * (c_sym * support_function(K, scale(-1.0, g)) - s_t));
            t6.push_back(w * interpolate_extended(P.triple.grid, P.triple.values, g));
        }
        double wu = cellvol / dt;
        double Vu = static_cast<double>(W.u_vo.val.size() - first_geq(W.u_vo, row.t)) * cellvol;
        double VuK = static_cast<double>(W.uK_vo.val.size() - first_geq(W.uK_vo, row.t)) * cellvol;
        double Vconj = sublevel_volume(W.conj_sorted, s_t);
        double BuK = tree_sum(bK) * wu;
        row.chain[0] = tree_sum(t1) * wu;
        row.chain[1] = tree_sum(t2) * wu;
        row.chain[2] = dim * std::pow(Vu, (dim - 1.0) / dim) * std::pow(Vconj, 1.0 / dim) -
                       s_t * BuK;
        row.chain[3] = dim * std::pow(VuK, (dim - 1.0) / dim) * std::pow(Vsym_st, 1.0 / dim) -
                       s_t * BuK;
        row.chain[4] = tree_sum(t5) * wu;
        row.chain[5] = tree_sum(t6) * wu;
        // quadrature noise plus the half-cell-layer uncertainty that the
        // counted volumes carry into the isoperimetric terms
        double scale_lvl = std::fabs(row.chain[0]) + std::fabs(row.chain[5]) + 1e-12;
        row.tol = 0.08 * scale_lvl +
                  2.0 * dim * hmax * std::max(1.0, s_t) *
                      (std::pow(Vu, (dim - 1.0) / dim) + std::pow(Vconj, (dim - 1.0) / dim));
        row.valid = true;
        R.chain.push_back(row);
    }

    if (cfg.diagnostics) {
        Diagnostics D = extremality_diagnostics(u, phi, K, [&] {
            VerifyConfig c2 = cfg;
            c2.diagnostics = false;
            c2.refine = false;
            return c2;
        }());
        R.diag = D.rows;
    }

    // refinement trace: one coarse pass by node decimation
    bool can_refine = cfg.refine;
    for (int a = 0; a < dim; ++a)
        if (u.grid.res[a] % 2 != 0 || u.grid.res[a] < 64) can_refine = false;
    if (can_refine && cfg.young_res >= 64) {
        VerifyConfig c2 = cfg;
        c2.refine = false;
        c2.diagnostics = false;
        c2.young_res = cfg.young_res / 2;
        c2.band_dt = 0.0;
        Report coarse = verify_inequality(decimate(u), phi, K, c2);
        R.refinement.push_back(
            {u.grid.res[0] / 2, coarse.lhs, coarse.rhs, coarse.lhs - coarse.rhs,
             coarse.err_estimate});
    }
    R.refinement.push_back({u.grid.res[0], R.lhs, R.rhs, R.lhs - R.rhs, R.err_estimate});

    // verdict
    if (!std::isfinite(R.lhs) && !std::isfinite(R.rhs)) {
        R.verdict = "indeterminate";
    } else if (!std::isfinite(R.rhs)) {
        R.verdict = "inequality-holds";
    } else if (!std::isfinite(R.lhs)) {
        R.verdict = "violation";
    } else {
        double gap = R.lhs - R.rhs;
        if (std::fabs(gap) <= R.err_estimate) {
            R.verdict = "equality-within-tol";
        } else if (gap < 0) {
            R.verdict = "inequality-holds";
        } else {
            bool grows = false;
            if (R.refinement.size() >= 2) {
                const RefineEntry& c = R.refinement[R.refinement.size() - 2];
                double excess_c = c.gap - c.err;
                grows = gap - R.err_estimate > excess_c;
            }
            R.verdict = grows ? "violation" : "inequality-holds";
        }
    }
    return R;
}

Diagnostics extremality_diagnostics(const GridFunction& u, const YoungND& phi,
                                    const ConvexBody& K, const VerifyConfig& cfg) {
    if (u.grid.dim != 2)
        throw Error("argument", "extremality diagnostics are implemented for dim 2");
    Pipeline P = build_pipeline(u, phi, K, cfg);
    LevelWork W = make_level_work(P);
    Diagnostics D;
    const int dim = u.grid.dim;
    const double cellvol = u.grid.cell_volume();
    double dt = cfg.band_dt > 0 ? cfg.band_dt : default_band_width(u, P.gu);
    double e = essinf(u);
    double mx = *std::max_element(u.v.begin(), u.v.end());
    double range = mx - e;

    const double dual_cellvol = P.conj.grid.cell_volume();
    int na = 0, nb = 0, nc = 0, nd = 0, ne = 0, nq = 0, nrows = 0;

    for (int li = 0; li < cfg.levels; ++li) {
        double t = e + range * (0.05 + 0.90 * li / std::max(1, cfg.levels - 1));
        LevelS ls = level_s(P, W, t, dt);
        if (!ls.ok) continue;
        double s_t = ls.s;
        DiagLevel row;
        row.t = t;
        row.s_t = s_t;

        // (a) interior of {conj <= s_t}
        std::size_t nconj = std::upper_bound(W.conj_sorted.sorted.begin(),
                                             W.conj_sorted.sorted.end(), s_t) -
                            W.conj_sorted.sorted.begin();
        row.interior_volume = static_cast<double>(nconj) * dual_cellvol;

        // (b) homothety fit {u>=t} vs -{conj<=s_t}
        std::size_t ufirst = first_geq(W.u_vo, t);
        std::size_t nu = W.u_vo.val.size() - ufirst;
        double Vu = static_cast<double>(nu) * cellvol;
        double Vconj = static_cast<double>(nconj) * dual_cellvol;
        if (nu == 0 || nconj == 0) continue;
        Vec bu = {(W.u_vo.cumx.back() - W.u_vo.cumx[ufirst]) / nu,
                  (W.u_vo.cumy.back() - W.u_vo.cumy[ufirst]) / nu, 0};
        Vec bc = {W.conj_cumx[nconj] / nconj, W.conj_cumy[nconj] / nconj, 0};
        row.a_t = std::pow(Vu / Vconj, 1.0 / dim);
        row.x_t = add(bu, scale(row.a_t, bc));

        std::vector<Vec> hull_u =
            hull_filtered(W.u_xo.pts, [&](std::size_t i) { return W.u_xo.vals[i] >= t; });
        std::vector<Vec> hull_c = hull_filtered(
            W.conj_xo.pts, [&](std::size_t i) { return W.conj_xo.vals[i] <= s_t; });
        double mism = 0.0, hscale = 1e-300;
        for (int d = 0; d < 128; ++d) {
            double th = 2 * M_PI * d / 128;
            Vec nu_dir = vec2(std::cos(th), std::sin(th));
            double hE = (hull_support(hull_u, nu_dir) - dot(nu_dir, bu, 2)) /
                        std::pow(Vu, 1.0 / dim);
            Vec neg = scale(-1.0, nu_dir);
            double hS = (hull_support(hull_c, neg) + dot(nu_dir, bc, 2)) /
                        std::pow(Vconj, 1.0 / dim);
            mism = std::max(mism, std::fabs(hE - hS));
            hscale = std::max(hscale, std::fabs(hE));
        }
        row.shape_mismatch = mism / hscale;

        // (c)/(d) Fenchel defects across the band
        auto fenchel = [&](const ValueOrder& vo, const VectorField& gf,
                           const SortedSamples& slice_src, const Grid& slice_grid,
                           const std::vector<double>& slice_vals,
                           const std::function<double(const Vec&)>& phi_of_grad,
                           double* spread_out) {
            auto [blo, bhi] = band_range(vo, t, dt);
            if (bhi <= blo) return kInf;
            // slice of nodes near the s_t level
            double delta = 0.0;
            {
                auto it = std::upper_bound(P.level_grid.begin(), P.level_grid.end(), s_t);
                std::size_t k = it - P.level_grid.begin();
                double up = k < P.level_grid.size() ? P.level_grid[k] : s_t * 1.05;
                double dn = k >= 2 ? P.level_grid[k - 2] : 0.0;
                delta = std::max(up - dn, 1e-12);
            }
            std::vector<std::uint32_t> slice;
            for (int widen = 0; widen < 4 && slice.empty(); ++widen) {
                double dd = delta * (1 << widen);
                auto a = std::lower_bound(slice_src.sorted.begin(), slice_src.sorted.end(),
                                          s_t - dd) -
                         slice_src.sorted.begin();
                auto b = std::upper_bound(slice_src.sorted.begin(), slice_src.sorted.end(),
                                          s_t + dd) -
                         slice_src.sorted.begin();
                std::size_t stride = std::max<std::size_t>(1, (b - a) / 1024);
                for (std::size_t i = a; i < static_cast<std::size_t>(b); i += stride)
                    slice.push_back(slice_src.order[i]);
            }
            if (slice.empty()) return kInf;
            std::vector<double> defects;
            double spread = 0.0;
            std::size_t stride = std::max<std::size_t>(1, (bhi - blo) / 64);
            for (std::size_t i = blo; i < bhi; i += stride) {
                std::uint32_t node = vo.idx[i];
                Vec g = gf.at(node);
                if (norm2(g, dim) < kGradFloor) continue;
                double pg = phi_of_grad(g);
                if (!std::isfinite(pg)) continue;
                double best = kInf;
                Vec best_xi{0, 0, 0};
                for (std::uint32_t sn : slice) {
                    Vec xi = slice_grid.node_from_flat(sn);
                    double pv = slice_vals[sn];
                    double defect = std::fabs(pg + pv - dot(g, xi, dim));
                    double scale_d = std::fabs(pg) + std::fabs(pv) + std::fabs(dot(g, xi, dim));
                    double rel = defect / std::max(scale_d, 1e-12);
                    if (rel < best) {
                        best = rel;
                        best_xi = xi;
                    }
                }
                // near-minimizer spread for the uniqueness probe
                for (std::uint32_t sn : slice) {
                    Vec xi = slice_grid.node_from_flat(sn);
                    double pv = slice_vals[sn];
                    double defect = std::fabs(pg + pv - dot(g, xi, dim));
                    double scale_d = std::fabs(pg) + std::fabs(pv) + std::fabs(dot(g, xi, dim));
                    double rel = defect / std::max(scale_d, 1e-12);
                    if (rel <= 2 * best + 1e-3)
                        spread = std::max(spread, norm2(sub(xi, best_xi), dim));
                }
                defects.push_back(best);
            }
            if (defects.empty()) return kInf;
            std::sort(defects.begin(), defects.end());
            if (spread_out) *spread_out = std::max(*spread_out, spread);
            return defects[defects.size() / 2];
        };

        row.fenchel_u = fenchel(
            W.u_vo, P.gu, W.conj_sorted, P.conj.grid, P.conj.values,
            [&](const Vec& g) { return eval(phi, g); }, &row.minimizer_spread);
        row.fenchel_uK = fenchel(
            W.uK_vo, P.guK, W.sym_sorted, P.sym_sampled.grid, P.sym_sampled.values,
            [&](const Vec& g) {
                return interpolate_extended(P.triple.grid, P.triple.values, g);
            },
            nullptr);

        // (e) the two level integrals of 1/|grad|
        {
            auto [blo, bhi] = hat_range(W.u_vo, t, dt);
            auto [klo, khi] = hat_range(W.uK_vo, t, dt);
            double Bu = 0, BK = 0;
            for (std::size_t i = blo; i < bhi; ++i)
                if (P.gu.magnitude(W.u_vo.idx[i]) >= kGradFloor)
                    Bu += hat_weight(W.u_vo.val[i], t, dt);
            for (std::size_t i = klo; i < khi; ++i)
                if (P.guK.magnitude(W.uK_vo.idx[i]) >= kGradFloor)
                    BK += hat_weight(W.uK_vo.val[i], t, dt);
            Bu *= cellvol / dt;
            BK *= cellvol / dt;
            row.flux_gap = std::fabs(Bu - BK) / std::max(BK, 1e-12);
        }

        row.qconvex = Vu / std::max(hull_area(hull_u), 1e-300);
        D.rows.push_back(row);

        ++nrows;
        if (row.interior_volume >= D.thresholds.min_interior_cells * dual_cellvol) ++na;
        if (row.shape_mismatch <= D.thresholds.shape) ++nb;
        if (row.fenchel_u <= D.thresholds.fenchel) ++nc;
        if (row.fenchel_uK <= D.thresholds.fenchel) ++nd;
        if (row.flux_gap <= D.thresholds.flux) ++ne;
        if (row.qconvex >= D.thresholds.qconvex) ++nq;
    }
    if (nrows > 0) {
        D.frac_pass_a = double(na) / nrows;
        D.frac_pass_b = double(nb) / nrows;
        D.frac_pass_c = double(nc) / nrows;
        D.frac_pass_d = double(nd) / nrows;
        D.frac_pass_e = double(ne) / nrows;
        D.frac_quasiconvex = double(nq) / nrows;
    }
    return D;
}

SandwichConstants sandwich_constants(const YoungND& phi, const ConvexBody& K,
                                     const VerifyConfig& cfg) {
    Grid gin;
    if (is_sampled(phi))
        gin = phi.grid;
    else if (cfg.young_halfwidth > 0)
        gin = make_grid2(-cfg.young_halfwidth, cfg.young_halfwidth, cfg.young_res);
    else
        gin = preferred_grid(phi, cfg.young_res);
    YoungND phi_s = sample(phi, gin);
    YoungND phiK = integrand_symmetral(phi_s, K);
    Grid dual = auto_conjugate_grid(phi_s);
    YoungND conj = conjugate_fast(phi_s, dual);
    YoungND sym = integrand_symmetral(conj, K);
    YoungND triple = conjugate_fast(sample(sym, dual), gin);

    // inner-half nodes
    std::vector<std::pair<Vec, double>> probes;  // (xi, triple value)
    const Grid& g = gin;
    for (int i = 0; i < g.nodes(0); ++i)
        for (int j = 0; j < g.nodes(1); ++j) {
            Vec p = g.node(i, j);
            bool inner = true;
            for (int a = 0; a < g.dim; ++a) {
                double blo = g.lo[a] + 0.25 * (g.hi[a] - g.lo[a]);
                double bhi = g.hi[a] - 0.25 * (g.hi[a] - g.lo[a]);
                if (p[a] < blo || p[a] > bhi) inner = false;
            }
            if (inner) probes.emplace_back(p, triple.values[g.flat(i, j)]);
        }
    auto frac_le = [&](double c, bool phiK_left) {
        std::size_t pass = 0;
        for (auto& [p, tv] : probes) {
            double pk = eval(phiK, scale(c, p));
            double tol = 1e-9 + 1e-6 * (std::isfinite(tv) ? std::fabs(tv) : 0.0);
            bool ok;
            if (phiK_left)
                ok = pk <= tv + tol || (!std::isfinite(pk) && !std::isfinite(tv));
            else
                ok = tv <= pk + tol || (!std::isfinite(pk) && !std::isfinite(tv)) ||
                     !std::isfinite(pk);
            if (ok) ++pass;
        }
        return static_cast<double>(pass) / probes.size();
    };
    SandwichConstants out;
    // largest c1 with phiK(c1 xi) <= triple(xi) at >= 99% of probes
    double lo = 1e-3, hi = 1e3;
    if (frac_le(lo, true) < 0.99) {
        out.c1 = lo;
    } else {
        for (int it = 0; it < 60; ++it) {
            double mid = std::sqrt(lo * hi);
            if (frac_le(mid, true) >= 0.99)
                lo = mid;
            else
                hi = mid;
        }
        out.c1 = lo;
    }
    // smallest c2 with triple(xi) <= phiK(c2 xi) at >= 99% of probes
    lo = 1e-3;
    hi = 1e3;
    if (frac_le(hi, false) < 0.99) {
        out.c2 = hi;
    } else {
        for (int it = 0; it < 60; ++it) {
            double mid = std::sqrt(lo * hi);
            if (frac_le(mid, false) >= 0.99)
                hi = mid;
            else
                lo = mid;
        }
        out.c2 = hi;
    }
    if (out.c1 > out.c2) std::swap(out.c1, out.c2);
    return out;
}

PolarPair generate_prop51(const ConvexBody& L, const Young1D& A, const Profile& b,
                          const Vec& x0, const Grid& g) {
    if (!L.contains_origin_interior)
        throw Error("degenerate-gauge", "0 must be interior to L");
    if (!is_monotone(b) || !b.nonincreasing)
        throw Error("argument", "the level-radius profile must be nonincreasing");
    PolarPair out;
    out.phi.kind = YoungND::Kind::RadialBody;
    out.phi.dim = g.dim;
    out.phi.A = A;
    out.phi.body = dilate_translate(L, -1.0, {0, 0, 0});
    out.phi.spec = "polar-pair";
    Profile binv = generalized_inverse(b, /*sup_flavor=*/true);
    out.u = make_function(
        g, [&](const Vec& x) { return eval(binv, gauge(L, sub(x, x0))); });
    return out;
}

GridFunction generate_prop52(const YoungND& phi, double a, double t1, double t2, double t3,
                             const Vec& x0, const Grid& g, const VerifyConfig& cfg) {
    if (!(t1 < t2 && t2 <= t3)) throw Error("argument", "need t1 < t2 <= t3");
    if (a <= 0) throw Error("argument", "the dilation factor must be positive");
    Grid gin;
    if (is_sampled(phi))
        gin = phi.grid;
    else if (cfg.young_halfwidth > 0)
        gin = make_grid2(-cfg.young_halfwidth, cfg.young_halfwidth, cfg.young_res);
    else
        gin = preferred_grid(phi, cfg.young_res);
    // superlinear growth probe on two boundary shells
    {
        double w = 0.0;
        for (int ax = 0; ax < gin.dim; ++ax) w = std::max(w, gin.hi[ax]);
        auto min_ratio = [&](double r) {
            double worst = kInf;
            for (int d = 0; d < 64; ++d) {
                double th = 2 * M_PI * d / 64;
                Vec dir = vec2(r * std::cos(th), r * std::sin(th));
                double v = eval(phi, dir);
                worst = std::min(worst, v / r);
            }
            return worst;
        };
        double r1 = min_ratio(0.6 * w), r2 = min_ratio(0.95 * w);
        bool superlinear = !std::isfinite(r2) || r2 >= 1.4 * std::max(r1, 1e-12);
        if (!superlinear)
            throw Error("precondition",
                        "integrand growth is not superlinear; the conjugate profile "
                        "construction needs phi(xi)/|xi| -> inf");
    }
    YoungND phi_s = sample(phi, gin);
    Grid dual = auto_conjugate_grid(phi_s);
    YoungND conj = conjugate_fast(phi_s, dual);
    // the rescaled grid points must stay inside the dual box
    for (int a2 = 0; a2 < g.dim; ++a2) {
        double need = std::max(std::fabs(g.lo[a2] - x0[a2]), std::fabs(g.hi[a2] - x0[a2])) / a;
        if (need > dual.hi[a2])
            throw Error("precondition", "conjugate box too small for the requested cap; "
                                        "increase the integrand resolution or box");
    }
    return make_function(g, [&](const Vec& x) {
        Vec arg = scale(1.0 / a, sub(x0, x));
        double v = interpolate_extended(conj.grid, conj.values, arg);
        double val = std::isfinite(v) ? t3 - a * v : t1;
        return std::clamp(val, t1, t2);
    });
}

Grid suggest_cap_grid(const YoungND& phi, double a, double t1, double t3, const Vec& x0,
                      int res, const VerifyConfig& cfg) {
    Grid gin;
    if (is_sampled(phi))
        gin = phi.grid;
    else if (cfg.young_halfwidth > 0)
        gin = make_grid2(-cfg.young_halfwidth, cfg.young_halfwidth, cfg.young_res);
    else
        gin = preferred_grid(phi, cfg.young_res);
    YoungND phi_s = sample(phi, gin);
    Grid dual = auto_conjugate_grid(phi_s);
    YoungND conj = conjugate_fast(phi_s, dual);
    double s_cap = (t3 - t1) / a;
    double extent[2] = {0.0, 0.0};
    for (int i = 0; i <= dual.res[0]; ++i)
        for (int j = 0; j <= dual.res[1]; ++j) {
            if (conj.values[dual.flat(i, j)] > s_cap) continue;
            Vec p = dual.node(i, j);
            extent[0] = std::max(extent[0], std::fabs(p[0]));
            extent[1] = std::max(extent[1], std::fabs(p[1]));
        }
    double wx = 1.15 * a * extent[0] + std::fabs(x0[0]);
    double wy = 1.15 * a * extent[1] + std::fabs(x0[1]);
    double w = std::max({wx, wy, 0.5});
    return make_grid2(-w, w, res);
}

namespace {

void chain_csv(const std::string& path, const Report& r) {
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot write " + path);
    out << "t,dt,s_t,s_spread,valid,term1,term2,term3,term4,term5,term6\n";
    for (const ChainLevel& c : r.chain) {
        out << fmt_g17(c.t) << ',' << fmt_g17(c.dt) << ',' << fmt_g17(c.s_t) << ','
            << fmt_g17(c.s_spread) << ',' << (c.valid ? 1 : 0);
        for (double v : c.chain) out << ',' << fmt_g17(v);
        out << "\n";
    }
}

}  // namespace

std::string report_to_json(const Report& r) {
    JsonWriter w;
    w.begin_object();
    w.key("schema_version");
    w.value(1);
    w.key("seed");
    w.value(static_cast<std::size_t>(r.seed));
    w.key("input_hash");
    w.value(r.input_hash);
    w.key("config");
    w.begin_object();
    for (auto& [k, v] : r.config_echo) {
        w.key(k);
        w.value(v);
    }
    w.end_object();
    w.key("lhs");
    w.value(r.lhs);
    w.key("rhs");
    w.value(r.rhs);
    w.key("gap");
    w.value(r.lhs - r.rhs);
    w.key("verdict");
    w.value(r.verdict);
    w.key("error_model");
    w.begin_object();
    w.key("estimate");
    w.value(r.err_estimate);
    w.key("lip_phi");
    w.value(r.lip_phi);
    w.key("supp_grad");
    w.value(r.supp_grad);
    w.key("band_dt");
    w.value(r.band_dt);
    w.end_object();
    w.key("refinement");
    w.begin_array();
    for (const RefineEntry& e : r.refinement) {
        w.begin_object();
        w.key("res");
        w.value(e.res);
        w.key("lhs");
        w.value(e.lhs);
        w.key("rhs");
        w.value(e.rhs);
        w.key("gap");
        w.value(e.gap);
        w.key("err");
        w.value(e.err);
        w.end_object();
    }
    w.end_array();
    w.key("chain");
    w.begin_array();
    for (const ChainLevel& c : r.chain) {
        w.begin_object();
        w.key("t");
        w.value(c.t);
        w.key("dt");
        w.value(c.dt);
        w.key("s_t");
        w.value(c.s_t);
        w.key("s_spread");
        w.value(c.s_spread);
        w.key("valid");
        w.value(c.valid);
        w.key("terms");
        w.begin_array();
        for (double v : c.chain) w.value(v);
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.key("diagnostics");
    w.begin_array();
    for (const DiagLevel& d : r.diag) {
        w.begin_object();
        w.key("t");
        w.value(d.t);
        w.key("s_t");
        w.value(d.s_t);
        w.key("a_t");
        w.value(d.a_t);
        w.key("x_t");
        w.begin_array();
        w.value(d.x_t[0]);
        w.value(d.x_t[1]);
        w.end_array();
        w.key("interior_volume");
        w.value(d.interior_volume);
        w.key("shape_mismatch");
        w.value(d.shape_mismatch);
        w.key("fenchel_u");
        w.value(d.fenchel_u);
        w.key("fenchel_uK");
        w.value(d.fenchel_uK);
        w.key("flux_gap");
        w.value(d.flux_gap);
        w.key("qconvex");
        w.value(d.qconvex);
        w.key("minimizer_spread");
        w.value(d.minimizer_spread);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

void write_report(const std::string& dir, const Report& r) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir + "/report.json");
        if (!out) throw Error("io", "cannot write report.json under " + dir);
        out << report_to_json(r) << "\n";
    }
    chain_csv(dir + "/levels.csv", r);
}

}  // namespace aniso
