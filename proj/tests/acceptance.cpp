// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "aniso/calculus.hpp"
#include "aniso/convex_geometry.hpp"
#include "aniso/fixtures.hpp"
#include "aniso/rearrangement.hpp"
#include "aniso/verify.hpp"
#include "aniso/young.hpp"

using namespace aniso;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::isinf(a[i]) && std::isinf(b[i]) && a[i] == b[i]) continue;
        w = std::max(w, std::fabs(a[i] - b[i]));
    }
    return w;
}

double wall_seconds(const std::function<void()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

// --- 1: fast transform == oracle on all catalog entries, and 20x faster ----
Outcome criterion_oracle_equivalence() {
    double worst = 0.0;
    std::string worst_spec;
    for (const std::string& spec : catalog_phi_specs()) {
        YoungND phi = parse_young(spec);
        YoungND s = sample(phi, preferred_grid(phi, 128));
        Grid dual = auto_conjugate_grid(s);
        YoungND fast = conjugate_fast(s, dual);
        YoungND oracle = conjugate_oracle(s, dual);
        double dev = max_abs(fast.values, oracle.values);
        if (dev > worst) {
            worst = dev;
            worst_spec = spec;
        }
    }
    // runtime ratio at 256^2
    YoungND s = sample(parse_young("quad"), preferred_grid(parse_young("quad"), 256));
    Grid dual = auto_conjugate_grid(s);
    double t_fast = wall_seconds([&] { conjugate_fast(s, dual); });
    double t_oracle = wall_seconds([&] { conjugate_oracle(s, dual); });
    bool pass = worst <= 1e-10 && t_fast <= t_oracle / 20.0;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "max node deviation %.3g (worst %s), fast %.3fs vs oracle %.3fs (ratio 1/%.0f)",
                  worst, worst_spec.empty() ? "-" : worst_spec.c_str(), t_fast, t_oracle,
                  t_fast > 0 ? t_oracle / t_fast : 1e9);
    return {pass, buf};
}

// --- 2: self-conjugacy of the half quadratic ------------------------------
Outcome criterion_self_conjugacy() {
    auto deviation = [](int res) {
        YoungND quad = parse_young("quad");
        YoungND s = sample(quad, preferred_grid(quad, res));
        Grid dual = auto_conjugate_grid(s);
        YoungND c = conjugate_fast(s, dual);
        Rng rng(2026);
        double worst = 0.0;
        for (int k = 0; k < 2000; ++k) {
            // inner half of the dual box
            Vec xi = vec2(uniform(rng, -0.5, 0.5) * dual.hi[0],
                          uniform(rng, -0.5, 0.5) * dual.hi[1]);
            double got = interpolate_extended(c.grid, c.values, xi);
            worst = std::max(worst, std::fabs(got - 0.5 * dot(xi, xi, 2)));
        }
        return worst;
    };
    double d128 = deviation(128), d256 = deviation(256);
    bool pass = d256 <= 1e-3 && d256 <= std::max(0.5 * d128, 5e-12);
    char buf[160];
    std::snprintf(buf, sizeof buf, "|conj - phi| = %.3g at 256 (%.3g at 128)", d256, d128);
    return {pass, buf};
}

// --- 3: involution deviation shrinks across 64/128/256 ---------------------
Outcome criterion_involution() {
    bool pass = true;
    std::string detail;
    for (const std::string& spec : catalog_phi_specs()) {
        YoungND phi = parse_young(spec);
        double d64 = involution_check(phi, 64);
        double d128 = involution_check(phi, 128);
        double d256 = involution_check(phi, 256);
        bool mono = (d128 <= d64 + 1e-12 && d256 <= d128 + 1e-12) ||
                    (d128 < 1e-12 && d256 < 1e-12);
        if (!mono) pass = false;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s%s %.2g/%.2g/%.2g", mono ? "" : "[not monotone] ",
                      spec.c_str(), d64, d128, d256);
        if (!detail.empty()) detail += "; ";
        detail += buf;
    }
    return {pass, detail};
}

// --- 4: conjugate through level sets matches the oracle --------------------
Outcome criterion_levelset_conjugate() {
    Rng rng(404);
    int bad = 0, total = 0;
    double worst_excess = 0.0;
    for (const char* spec : {"quad", "pnorm:2,4", "pnorm:3,3", "powerlog:2,1,3"}) {
        YoungND phi = parse_young(spec);
        YoungND s = sample(phi, preferred_grid(phi, 128));
        Grid dual = auto_conjugate_grid(s);
        YoungND oracle = conjugate_oracle(s, dual);
        double smax = 0.0;
        for (double v : s.values)
            if (std::isfinite(v)) smax = std::max(smax, v);
        std::vector<double> levels = geometric_levels(smax, 200);
        std::vector<Vec> dirs;
        std::vector<double> expect;
        for (int k = 0; k < 100; ++k) {
            int i = static_cast<int>(std::lround((0.25 + 0.5 * uniform(rng, 0, 1)) * dual.res[0]));
            int j = static_cast<int>(std::lround((0.25 + 0.5 * uniform(rng, 0, 1)) * dual.res[1]));
            dirs.push_back(dual.node(i, j));
            expect.push_back(oracle.values[dual.flat(i, j)]);
        }
        std::vector<double> got = conjugate_via_levelsets(s, dirs, levels);
        double h = std::max(s.grid.h(0), s.grid.h(1));
        for (int k = 0; k < 100; ++k) {
            ++total;
            double ds = levels.back() - levels[levels.size() - 2];
            for (std::size_t L = 1; L < levels.size(); ++L)
                if (levels[L] >= got[k]) {
                    ds = levels[L] - levels[L - 1];
                    break;
                }
            double tol = 5.0 * (ds + h * (norm2(dirs[k], 2) + 1e-3));
            double err = std::fabs(got[k] - expect[k]);
            if (err > tol) {
                ++bad;
                worst_excess = std::max(worst_excess, err / tol);
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d/%d directions within 5(ds + h|xi|)", total - bad, total);
    return {bad == 0, buf};
}

// --- 5: radial factorization against the closed-form conjugate -------------
Outcome criterion_radial_factorization() {
    bool pass = true;
    std::string detail;
    for (const char* aspec : {"power:2", "power:3"}) {
        for (const char* lspec : {"square", "hexagon", "disc"}) {
            Young1D A = parse_young1(aspec);
            ConvexBody L = parse_body(lspec);
            RadialFactorization rf = radial_factorization(A, L);
            YoungND s = sample(rf.phi, preferred_grid(rf.phi, 256));
            Grid dual = auto_conjugate_grid(s);
            YoungND c = conjugate_fast(s, dual);
            // analytic conjugate A_conj(gauge_L); closed form for t^2, t^3
            double p = A.p;
            double pc = p / (p - 1);
            double coef = (p - 1.0) / p * std::pow(p, -1.0 / (p - 1.0));
            double scale_floor = 0.0;
            std::vector<std::pair<Vec, double>> probes;
            for (int i = dual.res[0] / 4; i <= 3 * dual.res[0] / 4; i += 3)
                for (int j = dual.res[1] / 4; j <= 3 * dual.res[1] / 4; j += 3) {
                    Vec xi = dual.node(i, j);
                    double expect = coef * std::pow(gauge(L, xi), pc);
                    probes.emplace_back(xi, expect);
                    scale_floor = std::max(scale_floor, expect);
                }
            scale_floor *= 0.05;
            double worst_rel = 0.0;
            for (auto& [xi, expect] : probes) {
                int i = static_cast<int>(std::lround((xi[0] - dual.lo[0]) / dual.h(0)));
                int j = static_cast<int>(std::lround((xi[1] - dual.lo[1]) / dual.h(1)));
                double got = c.values[dual.flat(i, j)];
                worst_rel = std::max(worst_rel,
                                     std::fabs(got - expect) / std::max(expect, scale_floor));
            }
            if (worst_rel > 0.02) pass = false;
            char buf[96];
            std::snprintf(buf, sizeof buf, "%s/%s %.2f%%", aspec, lspec, 100 * worst_rel);
            if (!detail.empty()) detail += " ";
            detail += buf;
        }
    }
    return {pass, detail};
}

// --- 6: isoperimetric equality cases ---------------------------------------
Outcome criterion_isoperimetric() {
    ConvexBody sq = parse_body("square");
    CellMask m = rasterize(sq, 2, vec2(-2, -2), vec2(2, 2), {256, 256, 0});
    double per_sq = anisotropic_perimeter(m, sq, PerimeterMode::CellInterface);
    ConvexBody disc = parse_body("disc");
    CellMask md = rasterize(disc, 2, vec2(-2, -2), vec2(2, 2), {256, 256, 0});
    double per_disc = anisotropic_perimeter(md, disc, PerimeterMode::Smooth);
    bool pass = per_sq == 8.0 && std::fabs(per_disc - 2 * M_PI) <= 0.02 * 2 * M_PI;
    char buf[128];
    std::snprintf(buf, sizeof buf, "square %.17g (exact 8), disc %.5f vs 2pi (%.2f%% off)",
                  per_sq, per_disc, 100 * std::fabs(per_disc - 2 * M_PI) / (2 * M_PI));
    return {pass, buf};
}

// --- 7: equimeasurability of the symmetral ---------------------------------
Outcome criterion_equimeasurability() {
    const char* bodies[5] = {"square", "disc", "cross", "hexagon", "simplex"};
    int bad = 0, total = 0;
    double worst_ratio = 0.0;
    for (int f = 0; f < 5; ++f) {
        Grid g = default_trial_grid(256);
        GridFunction u = make_trial("bumps:" + std::to_string(2 + f % 3), g, 100 + f);
        ConvexBody K = parse_body(bodies[f]);
        GridFunction uK = symmetral(u, K);
        Profile mu = distribution(u), muK = distribution(uK);
        double cellvol = g.cell_volume();
        double h = g.h(0);
        for (std::size_t j = 0; j < mu.x.size(); ++j) {
            ++total;
            double m0 = mu.y[j], m1 = eval(muK, mu.x[j]);
            double layer = 4 * std::sqrt(std::max(m0, cellvol)) * h + 4 * cellvol;
            double d = std::fabs(m0 - m1);
            worst_ratio = std::max(worst_ratio, d / layer);
            if (d > layer) ++bad;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d/%d levels inside one cell layer (worst %.2f of a layer)",
                  total - bad, total, worst_ratio);
    return {bad == 0, buf};
}

// --- 8: the inequality on randomized triples --------------------------------
Outcome criterion_randomized_inequality() {
    std::vector<std::string> phis = catalog_phi_specs();
    const char* bodies[5] = {"square", "cross", "hexagon", "disc:64", "simplex"};
    int bad = 0;
    double worst_excess = -kInf;
    for (int k = 0; k < 20; ++k) {
        Grid g = default_trial_grid(256);
        GridFunction u = make_trial("bumps:" + std::to_string(2 + k % 4), g, 1000 + k);
        YoungND phi = parse_young(phis[k % phis.size()]);
        ConvexBody K = parse_body(bodies[k % 5]);
        VerifyConfig c;
        c.young_res = 256;
        c.levels = 32;
        c.seed = 1000 + k;
        Report r = verify_inequality(u, phi, K, c);
        bool ok = r.verdict != "violation" &&
                  (!std::isfinite(r.rhs) || r.lhs <= r.rhs + r.err_estimate);
        if (!ok) ++bad;
        if (std::isfinite(r.lhs) && std::isfinite(r.rhs))
            worst_excess = std::max(worst_excess, r.lhs - r.rhs - r.err_estimate);
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d/20 triples hold, worst lhs-rhs-err = %.3g", 20 - bad,
                  worst_excess);
    return {bad == 0, buf};
}

// --- 9: triple-symmetral fixed points ---------------------------------------
Outcome criterion_fixed_points() {
    bool pass = true;
    std::string detail;
    struct Case {
        const char* phi;
        const char* K;
        const char* u;
    } cases[2] = {{"quad", "disc", "tent:disc"},
                  {"radial:power:2:square", "square", "tent:square"}};
    for (const Case& cs : cases) {
        YoungND phi = parse_young(cs.phi);
        ConvexBody K = parse_body(cs.K);
        TripleConfig tc;
        tc.res = 256;
        TripleSymmetral ts = triple_symmetral(phi, K, tc);
        const Grid& g = ts.triple.grid;
        double h = std::max(g.h(0), g.h(1));
        // Lipschitz bound of phi over the inner box
        double lip = 0.0;
        for (int i = g.res[0] / 4; i <= 3 * g.res[0] / 4; i += 4)
            for (int j = g.res[1] / 4; j <= 3 * g.res[1] / 4; j += 4) {
                Vec xi = g.node(i, j);
                double step = 1e-4;
                Vec dx = vec2(step, 0), dy = vec2(0, step);
                double gx = (eval(phi, add(xi, dx)) - eval(phi, sub(xi, dx))) / (2 * step);
                double gy = (eval(phi, add(xi, dy)) - eval(phi, sub(xi, dy))) / (2 * step);
                lip = std::max(lip, norm2(vec2(gx, gy), 2));
            }
        double worst = 0.0;
        for (int i = g.res[0] / 4; i <= 3 * g.res[0] / 4; ++i)
            for (int j = g.res[1] / 4; j <= 3 * g.res[1] / 4; ++j) {
                Vec xi = g.node(i, j);
                worst = std::max(worst, std::fabs(ts.triple.values[g.flat(i, j)] - eval(phi, xi)));
            }
        bool fp = worst <= 3 * h * lip;
        // and the inequality is an equality on the matching trial function
        Grid ug = default_trial_grid(256);
        GridFunction u = make_trial(cs.u, ug, 0);
        VerifyConfig c;
        c.young_res = 256;
        c.levels = 24;
        Report r = verify_inequality(u, phi, K, c);
        double rel = std::fabs(r.lhs - r.rhs) / r.rhs;
        bool eq = rel <= 0.03 && r.verdict != "violation";
        if (!(fp && eq)) pass = false;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s/%s: |triple-phi| %.3g (tol %.3g), |gap|/rhs %.2f%%",
                      cs.phi, cs.K, worst, 3 * h * lip, 100 * rel);
        if (!detail.empty()) detail += "; ";
        detail += buf;
    }
    return {pass, detail};
}

// --- 10: homothetic-level equality cases ------------------------------------
Outcome criterion_polar_pair_equality() {
    Profile b;
    b.nonincreasing = true;
    b.x = {0.0, 1.0};
    b.y = {1.0, 0.0};
    Young1D A = parse_young1("power:2");
    bool pass = true;
    std::string detail;
    for (const char* lspec : {"square", "hexagon"}) {
        for (const char* kspec : {"square", "disc", "cross"}) {
            double rel[2];
            for (int ri = 0; ri < 2; ++ri) {
                int res = ri == 0 ? 128 : 256;
                Grid g = default_trial_grid(res);
                PolarPair pp = generate_prop51(parse_body(lspec), A, b, vec2(0, 0), g);
                VerifyConfig c;
                c.young_res = res;
                c.levels = 16;
                c.refine = false;
                Report r = verify_inequality(pp.u, pp.phi, parse_body(kspec), c);
                rel[ri] = std::fabs(r.lhs - r.rhs) / r.rhs;
                if (r.verdict == "violation") pass = false;
            }
            bool ok = rel[1] <= 0.03 && rel[1] <= rel[0] + 1e-12;
            if (!ok) pass = false;
            char buf[96];
            std::snprintf(buf, sizeof buf, "%s/%s %.2f%%->%.2f%%", lspec, kspec, 100 * rel[0],
                          100 * rel[1]);
            if (!detail.empty()) detail += " ";
            detail += buf;
        }
    }
    return {pass, detail};
}

// --- 11: conjugate-cap equality cases ----------------------------------------
Outcome criterion_conjugate_cap_equality() {
    bool pass = true;
    std::string detail;
    struct Case {
        const char* phi;
        double boxw;
    } cases[2] = {{"quad", 1.5}, {"pnorm:2,4", 2.5}};
    for (const Case& cs : cases) {
        double rel[2];
        for (int ri = 0; ri < 2; ++ri) {
            int res = ri == 0 ? 128 : 256;
            Grid g = make_grid2(-cs.boxw, cs.boxw, res);
            VerifyConfig c;
            c.young_res = res;
            c.levels = 16;
            c.refine = false;
            YoungND phi = parse_young(cs.phi);
            GridFunction u = generate_prop52(phi, 1.0, 0.0, 1.0, 1.0, vec2(0, 0), g, c);
            Report r = verify_inequality(u, phi, parse_body("square"), c);
            rel[ri] = std::fabs(r.lhs - r.rhs) / r.rhs;
            if (r.verdict == "violation") pass = false;
        }
        bool ok = rel[1] <= 0.03 && rel[1] <= rel[0] + 1e-12;
        if (!ok) pass = false;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s %.2f%%->%.2f%%", cs.phi, 100 * rel[0], 100 * rel[1]);
        if (!detail.empty()) detail += "; ";
        detail += buf;
    }
    // non-homothety of extreme level sets in the anisotropic case
    {
        Grid g = make_grid2(-2.5, 2.5, 256);
        VerifyConfig c;
        c.young_res = 256;
        GridFunction u = generate_prop52(parse_young("pnorm:2,4"), 1.0, 0.0, 1.0, 1.0,
                                         vec2(0, 0), g, c);
        auto support_of = [&](double t, std::vector<double>& hs) {
            // centered unit-volume support function of {u >= t} on 128 rays
            std::vector<Vec> pts;
            for (int i = 0; i <= g.res[0]; ++i)
                for (int j = 0; j <= g.res[1]; ++j)
                    if (u.at(i, j) >= t) pts.push_back(g.node(i, j));
            Vec bary{0, 0, 0};
            for (const Vec& p : pts) bary = add(bary, p);
            bary = scale(1.0 / pts.size(), bary);
            double vol = static_cast<double>(pts.size()) * g.cell_volume();
            hs.resize(128);
            for (int d = 0; d < 128; ++d) {
                double th = 2 * M_PI * d / 128;
                Vec nu = vec2(std::cos(th), std::sin(th));
                double best = -kInf;
                for (const Vec& p : pts) best = std::max(best, dot(nu, sub(p, bary), 2));
                hs[d] = best / std::sqrt(vol);
            }
        };
        std::vector<double> h1, h2;
        support_of(0.15, h1);
        support_of(0.85, h2);
        double mism = 0.0, scale_h = 0.0;
        for (int d = 0; d < 128; ++d) {
            mism = std::max(mism, std::fabs(h1[d] - h2[d]));
            scale_h = std::max(scale_h, std::fabs(h1[d]));
        }
        double rel_mism = mism / scale_h;
        bool nh = rel_mism > 0.05;
        if (!nh) pass = false;
        char buf[96];
        std::snprintf(buf, sizeof buf, "; level-shape drift %.3f (needs > 0.05)", rel_mism);
        detail += buf;
    }
    return {pass, detail};
}

// --- 12: per-level chain on the distribution derivative ---------------------
Outcome criterion_mu_prime_chain() {
    Grid g = default_trial_grid(256);
    GridFunction tent =
        make_function(g, [](const Vec& x) { return std::max(0.0, 1.0 - norm2(x, 2)); });
    std::vector<double> tgrid;
    for (int k = 0; k < 17; ++k) tgrid.push_back(0.1 + 0.05 * k);
    MuChain chain = mu_prime_chain(tent, parse_body("disc"), tgrid, 0.05);
    double worst = 0.0;
    for (std::size_t i = 0; i < tgrid.size(); ++i) {
        double expect = 2 * M_PI * (1 - tgrid[i]);
        worst = std::max({worst, std::fabs(chain.int_u[i] - expect) / expect,
                          std::fabs(chain.int_uK[i] - expect) / expect,
                          std::fabs(chain.neg_mu_prime[i] - expect) / expect});
    }
    // asymmetric fixture: inequality direction at >= 95% of levels
    GridFunction bumps = make_trial("bumps:3", g, 17);
    double mx = *std::max_element(bumps.v.begin(), bumps.v.end());
    std::vector<double> tg2;
    for (int k = 0; k < 32; ++k) tg2.push_back(mx * (0.08 + 0.84 * k / 31.0));
    MuChain c2 = mu_prime_chain(bumps, parse_body("square"), tg2);
    int hold = 0, total = 0;
    for (std::size_t i = 0; i < tg2.size(); ++i) {
        if (c2.int_uK[i] <= 0) continue;
        ++total;
        if (c2.int_u[i] <= c2.int_uK[i] * 1.10) ++hold;
    }
    bool pass = worst <= 0.05 && total >= 20 && hold >= static_cast<int>(0.95 * total);
    char buf[128];
    std::snprintf(buf, sizeof buf, "radial worst %.2f%% of 2pi(1-t); direction holds %d/%d",
                  100 * worst, hold, total);
    return {pass, buf};
}

// --- 13: extremality diagnostics ---------------------------------------------
Outcome criterion_diagnostics() {
    bool pass = true;
    std::string detail;
    struct Case {
        const char* phi;
        double boxw;
    } cases[2] = {{"quad", 1.5}, {"pnorm:2,4", 2.5}};
    for (const Case& cs : cases) {
        Grid g = make_grid2(-cs.boxw, cs.boxw, 256);
        VerifyConfig c;
        c.young_res = 256;
        c.levels = 24;
        c.refine = false;
        YoungND phi = parse_young(cs.phi);
        GridFunction u = generate_prop52(phi, 1.0, 0.0, 1.0, 1.0, vec2(0, 0), g, c);
        Diagnostics d = extremality_diagnostics(u, phi, parse_body("square"), c);
        int good_a = 0, good_x = 0, n = 0;
        for (const DiagLevel& row : d.rows) {
            ++n;
            if (std::fabs(row.a_t - 1.0) <= 0.03) ++good_a;
            if (norm2(row.x_t, 2) <= g.h(0)) ++good_x;
        }
        bool ok = d.frac_pass_a >= 0.95 && d.frac_pass_b >= 0.95 && d.frac_pass_c >= 0.95 &&
                  d.frac_pass_d >= 0.95 && d.frac_pass_e >= 0.95 && n > 0 &&
                  good_a >= static_cast<int>(std::ceil(0.95 * n)) &&
                  good_x >= static_cast<int>(std::ceil(0.95 * n));
        if (!ok) pass = false;
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "%s: a/b/c/d/e = %.2f/%.2f/%.2f/%.2f/%.2f, a_t %d/%d, x_t %d/%d",
                      cs.phi, d.frac_pass_a, d.frac_pass_b, d.frac_pass_c, d.frac_pass_d,
                      d.frac_pass_e, good_a, n, good_x, n);
        if (!detail.empty()) detail += "; ";
        detail += buf;
    }
    // the two-bump field is not quasi-convex and must trip the flag
    {
        Grid g = default_trial_grid(256);
        GridFunction u = make_trial("twobump", g, 0);
        VerifyConfig c;
        c.young_res = 128;
        c.levels = 24;
        c.refine = false;
        Diagnostics d = extremality_diagnostics(u, parse_young("quad"), parse_body("square"), c);
        bool tripped = d.frac_quasiconvex < 0.5;
        if (!tripped) pass = false;
        char buf[64];
        std::snprintf(buf, sizeof buf, "; two-bump quasi-convex fraction %.2f",
                      d.frac_quasiconvex);
        detail += buf;
    }
    return {pass, detail};
}

// --- 14: determinism ----------------------------------------------------------
Outcome criterion_determinism() {
    auto run = [] {
        Grid g = default_trial_grid(256);
        GridFunction u = make_trial("bumps:3", g, 1007);
        VerifyConfig c;
        c.young_res = 256;
        c.levels = 32;
        c.seed = 1007;
        Report r = verify_inequality(u, parse_young("pnorm:2,4"), parse_body("hexagon"), c);
        r.config_echo = {{"fixture", "criterion-14"}};
        return report_to_json(r);
    };
    std::string a = run(), b = run();
    bool pass = a == b && !a.empty();
    char buf[96];
    std::snprintf(buf, sizeof buf, "reports %s (%zu bytes)",
                  pass ? "byte-identical" : "DIFFER", a.size());
    return {pass, buf};
}

}  // namespace

int main(int argc, char** argv) {
    int only = argc > 1 ? std::atoi(argv[1]) : 0;
    struct Entry {
        int id;
        const char* name;
        std::function<Outcome()> fn;
    };
    std::vector<Entry> entries = {
        {1, "conjugation oracle equivalence and speed", criterion_oracle_equivalence},
        {2, "self-conjugacy of the half quadratic", criterion_self_conjugacy},
        {3, "involution deviation shrinks under refinement", criterion_involution},
        {4, "level-set reformulation of the conjugate", criterion_levelset_conjugate},
        {5, "radial factorization of body-norm entries", criterion_radial_factorization},
        {6, "isoperimetric equality cases", criterion_isoperimetric},
        {7, "equimeasurability of the symmetral", criterion_equimeasurability},
        {8, "inequality on randomized triples", criterion_randomized_inequality},
        {9, "triple-symmetral fixed points", criterion_fixed_points},
        {10, "homothetic-level equality cases", criterion_polar_pair_equality},
        {11, "conjugate-cap equality cases", criterion_conjugate_cap_equality},
        {12, "level integrals against the distribution derivative", criterion_mu_prime_chain},
        {13, "extremality diagnostics", criterion_diagnostics},
        {14, "determinism of reports", criterion_determinism},
    };
    int failures = 0;
    for (const Entry& e : entries) {
        if (only && e.id != only) continue;
        Outcome o;
        try {
            o = e.fn();
        } catch (const std::exception& ex) {
            o.pass = false;
            o.detail = std::string("exception: ") + ex.what();
        }
        if (!o.pass) ++failures;
        std::printf("criterion %02d [%s] %s -- %s\n", e.id, o.pass ? "PASS" : "FAIL", e.name,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
