#include "aniso/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace aniso {

double dirichlet_functional(const GridFunction& u, const YoungND& phi, const VectorField* grad) {
    VectorField local;
    if (!grad) {
        local = gradient(u);
        grad = &local;
    }
    const std::size_t n = u.v.size();
    std::vector<double> terms(n);
    bool hit_inf = false;
    for (std::size_t i = 0; i < n; ++i) {
        Vec gi = grad->at(i);
        double val;
        if (phi.kind == YoungND::Kind::Sampled) {
            bool outside = false;
            val = interpolate_extended(phi.grid, phi.values, gi, &outside);
            if (outside)
                throw Error("range-overflow", "gradient magnitude " +
                                                  fmt_g17(norm2(gi, u.grid.dim)) +
                                                  " leaves the integrand sampling box");
        } else {
            val = eval(phi, gi);
        }
        if (!std::isfinite(val)) {
            hit_inf = true;
            break;
        }
        terms[i] = val;
    }
    if (hit_inf) return kInf;
    return tree_sum(terms) * u.grid.cell_volume();
}

double default_band_width(const GridFunction& u, const VectorField& grad) {
    double h = 0.0;
    for (int a = 0; a < u.grid.dim; ++a) h = std::max(h, u.grid.h(a));
    double gmax = 0.0;
    for (std::size_t i = 0; i < u.v.size(); ++i) gmax = std::max(gmax, grad.magnitude(i));
    double lo = *std::min_element(u.v.begin(), u.v.end());
    double hi = *std::max_element(u.v.begin(), u.v.end());
    return std::max(2.0 * h * gmax, (hi - lo) / 256.0);
}

MuChain mu_prime_chain(const GridFunction& u, const ConvexBody& K,
                       const std::vector<double>& tgrid, double dt) {
    MuChain out;
    SymmetralField sf = symmetral_with_gradient(u, K);
    out.uK = std::move(sf.field);
    VectorField gu = gradient(u);
    VectorField guK = std::move(sf.grad);
    if (dt <= 0) dt = default_band_width(u, gu);
    Profile mu = distribution(u);
    std::vector<double> ones(u.v.size(), 1.0);
    const int w = 8;  // half-window of the slope fit, in tabulated levels
    for (double t : tgrid) {
        out.t.push_back(t);
        out.int_u.push_back(level_integral(u, ones, t, dt, gu));
        out.int_uK.push_back(level_integral(out.uK, ones, t, dt, guK));
        // least-squares slope of mu over the window: a plain two-point
        // difference resonates with the lattice rings of the level sets
        double span = mu.x.back() - mu.x.front();
        double step = span / (static_cast<double>(mu.x.size()) - 1);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (int k = -w; k <= w; ++k) {
            double tk = t + k * step;
            double x = k * step, y = eval(mu, tk);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++m;
        }
        double slope = (m * sxy - sx * sy) / std::max(m * sxx - sx * sx, 1e-300);
        out.neg_mu_prime.push_back(std::max(0.0, -slope));
    }
    return out;
}

}  // namespace aniso
