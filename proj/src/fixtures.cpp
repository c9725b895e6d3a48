#include "aniso/fixtures.hpp"

#include <algorithm>
#include <cmath>

namespace aniso {

namespace {

double bump(double r2) {  // C^1 compact bump of unit radius
    if (r2 >= 1.0) return 0.0;
    double t = 1.0 - r2;
    return t * t;
}

GridFunction scale_gradient(GridFunction u, double target) {
    VectorField g = gradient(u);
    double mx = 0.0;
    for (std::size_t i = 0; i < u.v.size(); ++i) mx = std::max(mx, g.magnitude(i));
    if (mx > 0) {
        double s = target / mx;
        for (double& v : u.v) v *= s;
    }
    return u;
}

}  // namespace

GridFunction make_trial(const std::string& spec, const Grid& g, std::uint64_t seed) {
    if (spec.rfind("tent:", 0) == 0) {
        ConvexBody body = parse_body(spec.substr(5));
        return make_function(g, [&](const Vec& x) {
            return std::max(0.0, 1.0 - gauge(body, x));
        });
    }
    if (spec == "twobump") {
        Vec c1 = vec2(-0.55, -0.25), c2 = vec2(0.55, 0.3);
        double r = 0.38;
        GridFunction u = make_function(g, [&](const Vec& x) {
            double a = dot(sub(x, c1), sub(x, c1), 2) / (r * r);
            double b = dot(sub(x, c2), sub(x, c2), 2) / (r * r);
            return bump(a) + 0.8 * bump(b);
        });
        return scale_gradient(std::move(u), 1.0);
    }
    if (spec.rfind("bumps:", 0) == 0) {
        int k = std::atoi(spec.c_str() + 6);
        if (k < 1) throw Error("config", "bumps needs a positive count: " + spec);
        Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
        struct B {
            Vec c;
            double r, amp;
        };
        std::vector<B> bs;
        double wx = 0.5 * (g.hi[0] - g.lo[0]), cx = 0.5 * (g.hi[0] + g.lo[0]);
        double wy = 0.5 * (g.hi[1] - g.lo[1]), cy = 0.5 * (g.hi[1] + g.lo[1]);
        for (int i = 0; i < k; ++i) {
            B b;
            b.c = vec2(cx + uniform(rng, -0.45, 0.45) * wx, cy + uniform(rng, -0.45, 0.45) * wy);
            b.r = uniform(rng, 0.2, 0.4) * std::min(wx, wy);
            b.amp = uniform(rng, 0.4, 1.0);
            bs.push_back(b);
        }
        GridFunction u = make_function(g, [&](const Vec& x) {
            double acc = 0.0;
            for (const B& b : bs)
                acc += b.amp * bump(dot(sub(x, b.c), sub(x, b.c), 2) / (b.r * b.r));
            return acc;
        });
        return scale_gradient(std::move(u), 1.0);
    }
    if (spec.rfind("csv:", 0) == 0) return read_grid_csv(spec.substr(4));
    throw Error("config", "unknown trial-function entry: " + spec);
}

std::vector<std::string> catalog_phi_specs() {
    return {"quad",
            "pnorm:2,4",
            "pnorm:3,3",
            "powerlog:2,1,3",
            "exp:1.5",
            "trud1:2,2",
            "radial:power:3:hexagon",
            "indicator:square"};
}

Grid default_trial_grid(int res) { return make_grid2(-1.5, 1.5, res); }

}  // namespace aniso
