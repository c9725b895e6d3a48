#include "aniso/young.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace aniso {

// ---------------------------------------------------------------------------
// 1-d Young functions
// ---------------------------------------------------------------------------

double eval1(const Young1D& A, double t) {
    if (t < 0) throw Error("argument", "1-d Young functions live on [0,inf)");
    switch (A.kind) {
        case Young1D::Kind::Power:
            return A.coef * std::pow(t, A.p);
        case Young1D::Kind::PowerLog:
            return std::pow(t, A.p) * std::pow(std::log(A.c + t), A.q);
        case Young1D::Kind::Exp:
            return std::exp(std::pow(t, A.alpha)) - 1.0;
        case Young1D::Kind::Indicator:
            return t <= A.bound ? 0.0 : kInf;
        case Young1D::Kind::Tabulated: {
            const Profile& tb = A.table;
            if (t > tb.x.back() && tb.x.size() >= 2) {
                // extend with the final slope; Young functions keep growing
                std::size_t n = tb.x.size();
                double sl = (tb.y[n - 1] - tb.y[n - 2]) /
                            std::max(tb.x[n - 1] - tb.x[n - 2], 1e-300);
                return tb.y.back() + sl * (t - tb.x.back());
            }
            return eval(tb, t);
        }
    }
    return 0.0;
}

namespace {

// max_i (s * x_i - f_i) for each slope via lower-hull walk; +inf entries
// dropped, all-infinite lines give -inf.
void llt_lower(const std::vector<double>& xs, const double* f, int n,
               const std::vector<double>& slopes, double* out) {
    thread_local std::vector<int> hull;
    hull.clear();
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(f[i])) continue;
        while (hull.size() >= 2) {
            int a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            double lhs = (f[b] - f[a]) * (xs[i] - xs[b]);
            double rhs = (f[i] - f[b]) * (xs[b] - xs[a]);
            if (lhs >= rhs)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }
    const int m = static_cast<int>(hull.size());
    if (m == 0) {
        for (std::size_t j = 0; j < slopes.size(); ++j) out[j] = -kInf;
        return;
    }
    int p = 0;
    for (std::size_t j = 0; j < slopes.size(); ++j) {
        double s = slopes[j];
        while (p + 1 < m) {
            int a = hull[p], b = hull[p + 1];
            if (f[b] - f[a] <= s * (xs[b] - xs[a]))
                ++p;
            else
                break;
        }
        double best = s * xs[hull[p]] - f[hull[p]];
        for (int d = -2; d <= 2; ++d) {
            int q = p + d;
            if (d == 0 || q < 0 || q >= m) continue;
            double cand = s * xs[hull[q]] - f[hull[q]];
            if (cand > best) best = cand;
        }
        out[j] = best;
    }
}

std::vector<double> axis_nodes(double lo, double hi, int cells) {
    std::vector<double> xs(cells + 1);
    double h = (hi - lo) / cells;
    for (int i = 0; i <= cells; ++i) xs[i] = lo + i * h;
    return xs;
}

}  // namespace

Young1D conjugate1(const Young1D& A) {
    Young1D out;
    if (A.kind == Young1D::Kind::Power) {
        if (A.p < 1.0) throw Error("argument", "power exponent below 1 is not convex");
        if (A.p == 1.0) {
            out.kind = Young1D::Kind::Indicator;
            out.bound = A.coef;
            return out;
        }
        double pc = A.p / (A.p - 1.0);
        out.kind = Young1D::Kind::Power;
        out.p = pc;
        out.coef = (A.p - 1.0) / A.p * std::pow(A.coef * A.p, -1.0 / (A.p - 1.0));
        return out;
    }
    if (A.kind == Young1D::Kind::Indicator) {
        out.kind = Young1D::Kind::Power;
        out.p = 1.0;
        out.coef = A.bound;
        return out;
    }
    // numeric: dense tabulation, then the 1-d transform onto a slope grid
    double tmax = 64.0;
    if (A.kind == Young1D::Kind::Tabulated) tmax = A.table.x.back();
    // keep values representable
    while (tmax > 1e-6 && !(eval1(A, tmax) < 1e12)) tmax *= 0.5;
    const int m = 4096;
    std::vector<double> xs(m + 1), f(m + 1);
    for (int i = 0; i <= m; ++i) {
        xs[i] = tmax * i / m;
        f[i] = eval1(A, xs[i]);
    }
    double smax = (f[m] - f[m - 1]) / (xs[m] - xs[m - 1]);
    // geometric slope grid so the conjugate is resolved near 0 as well
    std::vector<double> slopes = geometric_levels(smax, 2048, 1e-6);
    std::vector<double> vals(slopes.size());
    llt_lower(xs, f.data(), m + 1, slopes, vals.data());
    out.kind = Young1D::Kind::Tabulated;
    out.table.x = std::move(slopes);
    out.table.y = std::move(vals);
    out.table.nonincreasing = false;
    out.table.dup_take_last = true;
    return out;
}

double inverse_right1(const Young1D& A, double s) {
    if (s < 0) return 0.0;
    switch (A.kind) {
        case Young1D::Kind::Power:
            return std::pow(s / A.coef, 1.0 / A.p);
        case Young1D::Kind::Indicator:
            return A.bound;
        default: {
            double lo = 0.0, hi = 1.0;
            int guard = 0;
            while (eval1(A, hi) <= s && guard++ < 2000) hi *= 2.0;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                if (eval1(A, mid) <= s)
                    lo = mid;
                else
                    hi = mid;
            }
            return lo;
        }
    }
}

Young1D parse_young1(const std::string& spec) {
    auto nums = [](const std::string& s) {
        std::vector<double> v;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
        return v;
    };
    Young1D A;
    if (spec.rfind("power:", 0) == 0) {
        std::string rest = spec.substr(6);
        std::size_t col = rest.find(':');
        A.kind = Young1D::Kind::Power;
        A.p = std::stod(col == std::string::npos ? rest : rest.substr(0, col));
        A.coef = col == std::string::npos ? 1.0 : std::stod(rest.substr(col + 1));
        if (A.p < 1.0) throw Error("config", "power exponent must be >= 1: " + spec);
        return A;
    }
    if (spec.rfind("powerlog:", 0) == 0) {
        auto v = nums(spec.substr(9));
        if (v.size() != 3) throw Error("config", "powerlog needs p,q,c: " + spec);
        A.kind = Young1D::Kind::PowerLog;
        A.p = v[0];
        A.q = v[1];
        A.c = v[2];
        if (A.c < 1.0) throw Error("config", "powerlog constant must be >= 1: " + spec);
        return A;
    }
    if (spec.rfind("exp:", 0) == 0) {
        A.kind = Young1D::Kind::Exp;
        A.alpha = std::stod(spec.substr(4));
        if (A.alpha <= 0) throw Error("config", "exp exponent must be positive: " + spec);
        return A;
    }
    if (spec.rfind("indicator:", 0) == 0) {
        A.kind = Young1D::Kind::Indicator;
        A.bound = std::stod(spec.substr(10));
        return A;
    }
    throw Error("config", "unknown 1-d Young catalog entry: " + spec);
}

// ---------------------------------------------------------------------------
// n-dimensional Young functions
// ---------------------------------------------------------------------------

double eval(const YoungND& phi, const Vec& xi) {
    switch (phi.kind) {
        case YoungND::Kind::Matrix: {
            double acc = 0.0;
            for (std::size_t k = 0; k < phi.terms.size(); ++k) {
                double t = std::fabs(dot(phi.rows[k], xi, phi.dim));
                double a = eval1(phi.terms[k], t);
                if (!std::isfinite(a)) return kInf;
                acc += a;
            }
            return acc;
        }
        case YoungND::Kind::RadialEuclid:
            return eval1(phi.A, norm2(xi, phi.dim));
        case YoungND::Kind::RadialBody:
            return eval1(phi.A, support_function(phi.body, xi));
        case YoungND::Kind::IndicatorBody: {
            for (const Facet& f : phi.body.facets)
                if (dot(f.normal, xi, phi.dim) > f.offset) return kInf;
            return 0.0;
        }
        case YoungND::Kind::Sampled:
            return interpolate_extended(phi.grid, phi.values, xi);
        case YoungND::Kind::Symmetral: {
            double g = gauge(phi.sym_body, scale(-1.0, xi));
            double v = phi.kappa * std::pow(g, phi.dim);
            const auto& Q = phi.quantiles;
            const auto& W = phi.quantile_vols;
            if (Q.empty()) return kInf;
            if (v > phi.dom_volume) return kInf;
            if (v <= W.front()) return Q.front();
            if (v >= W.back()) return Q.back();
            std::size_t i = std::upper_bound(W.begin(), W.end(), v) - W.begin();
            double w = (v - W[i - 1]) / (W[i] - W[i - 1]);
            return Q[i - 1] + w * (Q[i] - Q[i - 1]);
        }
    }
    return 0.0;
}

bool is_sampled(const YoungND& phi) { return phi.kind == YoungND::Kind::Sampled; }

double preferred_halfwidth(const YoungND& phi) {
    switch (phi.kind) {
        case YoungND::Kind::Sampled:
            return std::max(std::fabs(phi.grid.hi[0]), std::fabs(phi.grid.lo[0]));
        case YoungND::Kind::RadialEuclid:
            return phi.A.kind == Young1D::Kind::Exp ? 3.0 : 4.0;
        case YoungND::Kind::Matrix: {
            for (const Young1D& A : phi.terms)
                if (A.kind == Young1D::Kind::Exp) return 1.5;
            for (std::size_t k = 0; k < phi.rows.size(); ++k) {
                // off-axis rows with power-log growth stay tighter
                const Vec& r = phi.rows[k];
                bool axis = (r[0] == 0) + (r[1] == 0) + (r[2] == 0) >= phi.dim - 1;
                if (!axis && phi.terms[k].kind == Young1D::Kind::PowerLog) return 2.5;
            }
            return 4.0;
        }
        default:
            return 4.0;
    }
}

Grid preferred_grid(const YoungND& phi, int res) {
    if (phi.kind == YoungND::Kind::Sampled) return phi.grid;
    double w = preferred_halfwidth(phi);
    if (phi.dim == 2) return make_grid2(-w, w, res);
    Grid g;
    g.dim = 3;
    g.lo = {-w, -w, -w};
    g.hi = {w, w, w};
    g.res = {res, res, res};
    return g;
}

YoungND sample(const YoungND& phi, const Grid& g) {
    if (phi.kind == YoungND::Kind::Sampled && phi.grid.same_layout(g)) return phi;
    YoungND out;
    out.dim = g.dim;
    out.kind = YoungND::Kind::Sampled;
    out.spec = phi.spec;
    out.grid = g;
    out.values.resize(g.node_count());
    const int nz = g.dim > 2 ? g.nodes(2) : 1;
    parallel_for(g.nodes(0), [&](std::size_t i) {
        for (int j = 0; j < g.nodes(1); ++j)
            for (int k = 0; k < nz; ++k)
                out.values[g.flat(static_cast<int>(i), j, k)] =
                    eval(phi, g.node(static_cast<int>(i), j, k));
    });
    return out;
}

Grid auto_conjugate_grid(const YoungND& sampled) {
    if (!is_sampled(sampled)) throw Error("argument", "need sampled values");
    const Grid& g = sampled.grid;
    Grid out = g;
    const int nz = g.dim > 2 ? g.nodes(2) : 1;
    for (int a = 0; a < g.dim; ++a) {
        double worst = 0.0;
        double qlo = g.lo[a] + 0.25 * (g.hi[a] - g.lo[a]);
        double qhi = g.hi[a] - 0.25 * (g.hi[a] - g.lo[a]);
        for (int i = 0; i < g.nodes(0); ++i)
            for (int j = 0; j < g.nodes(1); ++j)
                for (int k = 0; k < nz; ++k) {
                    int idx[3] = {i, j, k};
                    Vec p = g.node(i, j, k);
                    bool inner = true;
                    for (int b = 0; b < g.dim; ++b) {
                        double blo = g.lo[b] + 0.25 * (g.hi[b] - g.lo[b]);
                        double bhi = g.hi[b] - 0.25 * (g.hi[b] - g.lo[b]);
                        if (p[b] < blo || p[b] > bhi) inner = false;
                    }
                    if (!inner) continue;
                    if (p[a] < qlo || p[a] > qhi) continue;
                    if (idx[a] + 1 >= g.nodes(a)) continue;
                    int up[3] = {i, j, k};
                    up[a]++;
                    double v0 = sampled.values[g.flat(i, j, k)];
                    double v1 = sampled.values[g.flat(up[0], up[1], up[2])];
                    if (!std::isfinite(v0) || !std::isfinite(v1)) continue;
                    worst = std::max(worst, std::fabs(v1 - v0) / g.h(a));
                }
        double w = std::clamp(1.25 * worst, 4.0, 1e5);
        out.lo[a] = -w;
        out.hi[a] = w;
    }
    // equalize the spacing across axes (up to 8x the base resolution), so an
    // anisotropic slope box does not leave one axis with cell-thick layers
    double wmin = kInf;
    for (int a = 0; a < g.dim; ++a) wmin = std::min(wmin, out.hi[a]);
    for (int a = 0; a < g.dim; ++a) {
        double ratio = out.hi[a] / wmin;
        int res = static_cast<int>(std::lround(g.res[a] * std::min(ratio, 8.0)));
        out.res[a] = std::max(res, g.res[a]);
    }
    return out;
}

namespace {

// conjugate one axis: result = max over eta_axis of (slope * eta + sign*vals)
std::vector<double> conj_axis(const std::vector<double>& vals, std::array<int, 3> shape, int dim,
                              int axis, const std::vector<double>& xs,
                              const std::vector<double>& slopes, bool negate_input) {
    std::array<int, 3> oshape = shape;
    oshape[axis] = static_cast<int>(slopes.size());
    std::size_t ocount = 1;
    for (int a = 0; a < dim; ++a) ocount *= oshape[a];
    std::vector<double> out(ocount);

    // strides in row-major layout (x outer, z inner)
    auto strides = [&](const std::array<int, 3>& sh) {
        std::array<std::size_t, 3> st{1, 1, 1};
        if (dim == 2) {
            st[0] = sh[1];
            st[1] = 1;
        } else {
            st[0] = static_cast<std::size_t>(sh[1]) * sh[2];
            st[1] = sh[2];
            st[2] = 1;
        }
        return st;
    };
    auto ist = strides(shape), ost = strides(oshape);

    // enumerate lines over the other axes
    std::vector<int> other;
    for (int a = 0; a < dim; ++a)
        if (a != axis) other.push_back(a);
    std::size_t nlines = 1;
    for (int a : other) nlines *= shape[a];

    parallel_for(nlines, [&](std::size_t line) {
        thread_local std::vector<double> f, o;
        f.resize(shape[axis]);
        o.resize(slopes.size());
        std::size_t rem = line, ibase = 0, obase = 0;
        for (int t = static_cast<int>(other.size()) - 1; t >= 0; --t) {
            int a = other[t];
            std::size_t idx = rem % shape[a];
            rem /= shape[a];
            ibase += idx * ist[a];
            obase += idx * ost[a];
        }
        for (int i = 0; i < shape[axis]; ++i) {
            double v = vals[ibase + i * ist[axis]];
            f[i] = negate_input ? -v : v;
        }
        llt_lower(xs, f.data(), shape[axis], slopes, o.data());
        for (std::size_t j = 0; j < slopes.size(); ++j) out[obase + j * ost[axis]] = o[j];
    });
    return out;
}

}  // namespace

YoungND conjugate_fast(const YoungND& sampled, const Grid& outg) {
    if (!is_sampled(sampled)) throw Error("argument", "need sampled values");
    const Grid& g = sampled.grid;
    if (outg.dim != g.dim) throw Error("argument", "dimension mismatch");
    std::array<int, 3> shape{g.nodes(0), g.nodes(1), g.dim > 2 ? g.nodes(2) : 1};
    std::vector<double> cur = sampled.values;
    for (int axis = g.dim - 1; axis >= 0; --axis) {
        std::vector<double> xs = axis_nodes(g.lo[axis], g.hi[axis], g.res[axis]);
        std::vector<double> slopes = axis_nodes(outg.lo[axis], outg.hi[axis], outg.res[axis]);
        // first pass conjugates +phi directly; later passes fold in the
        // running partial conjugate G via max(s*x + G) = max(s*x - (-G))
        bool negate = axis != g.dim - 1;
        cur = conj_axis(cur, shape, g.dim, axis, xs, slopes, negate);
        shape[axis] = static_cast<int>(slopes.size());
    }
    YoungND out;
    out.dim = g.dim;
    out.kind = YoungND::Kind::Sampled;
    out.spec = sampled.spec.empty() ? "conjugate" : sampled.spec + ":conj";
    out.grid = outg;
    out.values = std::move(cur);
    return out;
}

YoungND conjugate_oracle(const YoungND& sampled, const Grid& outg) {
    if (!is_sampled(sampled)) throw Error("argument", "need sampled values");
    const Grid& g = sampled.grid;
    if (g.dim == 2) {
        std::vector<double> ex = axis_nodes(g.lo[0], g.hi[0], g.res[0]);
        std::vector<double> ey = axis_nodes(g.lo[1], g.hi[1], g.res[1]);
        std::vector<double> ox = axis_nodes(outg.lo[0], outg.hi[0], outg.res[0]);
        std::vector<double> oy = axis_nodes(outg.lo[1], outg.hi[1], outg.res[1]);
        YoungND out;
        out.dim = 2;
        out.kind = YoungND::Kind::Sampled;
        out.spec = sampled.spec + ":oracle";
        out.grid = outg;
        out.values.assign(outg.node_count(), -kInf);
        const int nyo = static_cast<int>(oy.size());
        const int nxi = static_cast<int>(ex.size()), nyi = static_cast<int>(ey.size());
        const double* V = sampled.values.data();
        parallel_for(ox.size(), [&](std::size_t jx) {
            for (int jy = 0; jy < nyo; ++jy) {
                double best = -kInf;
                for (int ix = 0; ix < nxi; ++ix) {
                    double a = ox[jx] * ex[ix];
                    const double* row = V + static_cast<std::size_t>(ix) * nyi;
                    for (int iy = 0; iy < nyi; ++iy) {
                        double f = row[iy];
                        if (!std::isfinite(f)) continue;
                        double cand = a + (oy[jy] * ey[iy] - f);
                        if (cand > best) best = cand;
                    }
                }
                out.values[static_cast<std::size_t>(jx) * nyo + jy] = best;
            }
        });
        return out;
    }
    // dim 3
    std::vector<double> ex = axis_nodes(g.lo[0], g.hi[0], g.res[0]);
    std::vector<double> ey = axis_nodes(g.lo[1], g.hi[1], g.res[1]);
    std::vector<double> ez = axis_nodes(g.lo[2], g.hi[2], g.res[2]);
    std::vector<double> ox = axis_nodes(outg.lo[0], outg.hi[0], outg.res[0]);
    std::vector<double> oy = axis_nodes(outg.lo[1], outg.hi[1], outg.res[1]);
    std::vector<double> oz = axis_nodes(outg.lo[2], outg.hi[2], outg.res[2]);
    YoungND out;
    out.dim = 3;
    out.kind = YoungND::Kind::Sampled;
    out.spec = sampled.spec + ":oracle";
    out.grid = outg;
    out.values.assign(outg.node_count(), -kInf);
    const int nyo = static_cast<int>(oy.size()), nzo = static_cast<int>(oz.size());
    const int nyi = static_cast<int>(ey.size()), nzi = static_cast<int>(ez.size());
    const double* V = sampled.values.data();
    parallel_for(ox.size(), [&](std::size_t jx) {
        for (int jy = 0; jy < nyo; ++jy)
            for (int jz = 0; jz < nzo; ++jz) {
                double best = -kInf;
                for (std::size_t ix = 0; ix < ex.size(); ++ix) {
                    double a = ox[jx] * ex[ix];
                    for (int iy = 0; iy < nyi; ++iy) {
                        double b = oy[jy] * ey[iy];
                        const double* row = V + (ix * nyi + iy) * nzi;
                        for (int iz = 0; iz < nzi; ++iz) {
                            double f = row[iz];
                            if (!std::isfinite(f)) continue;
                            double cand = a + (b + (oz[jz] * ez[iz] - f));
                            if (cand > best) best = cand;
                        }
                    }
                }
                out.values[(jx * nyo + jy) * nzo + jz] = best;
            }
    });
    return out;
}

double involution_check(const YoungND& phi, int res) {
    YoungND s = is_sampled(phi) ? phi : sample(phi, preferred_grid(phi, res));
    Grid dual = auto_conjugate_grid(s);
    YoungND c = conjugate_fast(s, dual);
    YoungND cc = conjugate_fast(c, s.grid);
    const Grid& g = s.grid;
    const int nz = g.dim > 2 ? g.nodes(2) : 1;
    double worst = 0.0;
    for (int i = 0; i < g.nodes(0); ++i)
        for (int j = 0; j < g.nodes(1); ++j)
            for (int k = 0; k < nz; ++k) {
                Vec p = g.node(i, j, k);
                bool inner = true;
                for (int a = 0; a < g.dim; ++a) {
                    double blo = g.lo[a] + 0.25 * (g.hi[a] - g.lo[a]);
                    double bhi = g.hi[a] - 0.25 * (g.hi[a] - g.lo[a]);
                    if (p[a] < blo || p[a] > bhi) inner = false;
                }
                if (!inner) continue;
                double v = s.values[g.flat(i, j, k)];
                if (!std::isfinite(v)) continue;
                worst = std::max(worst, std::fabs(cc.values[g.flat(i, j, k)] - v));
            }
    return worst;
}

SublevelSet sublevel_set(const YoungND& sampled, double s) {
    if (!is_sampled(sampled)) throw Error("argument", "need sampled values");
    if (s < 0) throw Error("argument", "levels are nonnegative");
    SublevelSet out;
    out.mask.assign(sampled.values.size(), 0);
    std::size_t cnt = 0;
    bool all = true;
    for (std::size_t i = 0; i < sampled.values.size(); ++i) {
        if (sampled.values[i] <= s) {
            out.mask[i] = 1;
            ++cnt;
        } else {
            all = false;
        }
    }
    out.volume = static_cast<double>(cnt) * sampled.grid.cell_volume();
    out.truncated = all;
    return out;
}

SortedSamples sort_samples(const YoungND& sampled) {
    if (!is_sampled(sampled)) throw Error("argument", "need sampled values");
    SortedSamples ss;
    ss.cellvol = sampled.grid.cell_volume();
    ss.order.reserve(sampled.values.size());
    for (std::uint32_t i = 0; i < sampled.values.size(); ++i)
        if (std::isfinite(sampled.values[i])) ss.order.push_back(i);
    std::sort(ss.order.begin(), ss.order.end(), [&](std::uint32_t a, std::uint32_t b) {
        double va = sampled.values[a], vb = sampled.values[b];
        return va < vb || (va == vb && a < b);
    });
    ss.sorted.reserve(ss.order.size());
    for (auto i : ss.order) ss.sorted.push_back(sampled.values[i]);
    return ss;
}

double sublevel_volume(const SortedSamples& ss, double s) {
    auto it = std::upper_bound(ss.sorted.begin(), ss.sorted.end(), s);
    return static_cast<double>(it - ss.sorted.begin()) * ss.cellvol;
}

std::vector<double> geometric_levels(double smax, int n, double floor_frac) {
    if (!(smax > 0)) return {0.0};
    std::vector<double> out;
    out.reserve(n + 1);
    out.push_back(0.0);
    double s0 = floor_frac * smax;
    double ratio = std::pow(smax / s0, 1.0 / (n - 1));
    double s = s0;
    for (int i = 0; i < n; ++i) {
        out.push_back(std::min(s, smax));
        s *= ratio;
    }
    out.back() = smax;
    return out;
}

std::vector<double> conjugate_via_levelsets(const YoungND& sampled, const std::vector<Vec>& dirs,
                                            const std::vector<double>& levels) {
    SortedSamples ss = sort_samples(sampled);
    const Grid& g = sampled.grid;
    const std::size_t nd = dirs.size(), nl = levels.size();
    std::vector<double> run(nd, -kInf);
    std::vector<double> best(nd, -kInf);
    std::size_t pos = 0;
    for (std::size_t L = 0; L < nl; ++L) {
        double s = levels[L];
        while (pos < ss.order.size() && ss.sorted[pos] <= s) {
            Vec p = g.node_from_flat(ss.order[pos]);
            for (std::size_t d = 0; d < nd; ++d)
                run[d] = std::max(run[d], dot(dirs[d], p, g.dim));
            ++pos;
        }
        for (std::size_t d = 0; d < nd; ++d)
            if (std::isfinite(run[d])) best[d] = std::max(best[d], run[d] - s);
    }
    return best;
}

std::vector<double> sublevel_support(const YoungND& sampled, const Vec& dir,
                                     const std::vector<double>& levels) {
    SortedSamples ss = sort_samples(sampled);
    const Grid& g = sampled.grid;
    std::vector<double> out(levels.size(), -kInf);
    double run = -kInf;
    std::size_t pos = 0;
    for (std::size_t L = 0; L < levels.size(); ++L) {
        while (pos < ss.order.size() && ss.sorted[pos] <= levels[L]) {
            Vec p = g.node_from_flat(ss.order[pos]);
            run = std::max(run, dot(dir, p, g.dim));
            ++pos;
        }
        out[L] = run;
    }
    return out;
}

RadialFactorization radial_factorization(const Young1D& A, const ConvexBody& L) {
    if (!L.contains_origin_interior) throw Error("degenerate-gauge", "0 must be interior to L");
    RadialFactorization rf;
    rf.phi.kind = YoungND::Kind::RadialBody;
    rf.phi.dim = L.dim;
    rf.phi.A = A;
    rf.phi.body = L;
    rf.phi.spec = "radial";
    rf.conj.kind = YoungND::Kind::RadialBody;
    rf.conj.dim = L.dim;
    rf.conj.A = conjugate1(A);
    rf.conj.body = polar(L);
    rf.conj.spec = "radial:conj";
    return rf;
}

GrowthLimits growth_limits(const YoungND& phi, int res, int ndirs, int nshells) {
    YoungND s = is_sampled(phi) ? phi : sample(phi, preferred_grid(phi, res));
    Grid dual = auto_conjugate_grid(s);
    YoungND conj = conjugate_fast(s, dual);
    double w = 0.0;
    for (int a = 0; a < dual.dim; ++a) w = std::max(w, dual.hi[a]);
    GrowthLimits out;
    auto ratio_on_shell = [&](double r) {
        double worst = 0.0;
        for (int d = 0; d < ndirs; ++d) {
            double th = 2 * M_PI * d / ndirs;
            Vec dir = vec2(std::cos(th), std::sin(th));
            if (dual.dim == 3) {
                double z = -1.0 + 2.0 * (d + 0.5) / ndirs;
                double rr = std::sqrt(std::max(0.0, 1 - z * z));
                dir = vec3(rr * std::cos(2.4 * d), rr * std::sin(2.4 * d), z);
            }
            double v = interpolate_extended(conj.grid, conj.values, scale(r, dir));
            worst = std::max(worst, v / r);
        }
        return worst;
    };
    double hmin = dual.h(0);
    double r_small_hi = 0.25 * w;
    for (int k = 0; k < nshells; ++k) {  // ascending radii
        double r = std::max(r_small_hi * std::pow(0.5, nshells - 1 - k), 2 * hmin);
        out.small_r.push_back(r);
        out.small_ratio.push_back(ratio_on_shell(r));
    }
    for (int k = 0; k < nshells; ++k) {
        double r = 0.25 * w + (0.9 * w - 0.25 * w) * k / (nshells - 1);
        out.large_r.push_back(r);
        out.large_ratio.push_back(ratio_on_shell(r));
    }
    bool mono_small = true;
    for (std::size_t i = 1; i < out.small_ratio.size(); ++i)
        if (out.small_ratio[i] < out.small_ratio[i - 1] * (1 - 1e-9)) mono_small = false;
    out.small_decreasing =
        mono_small && out.small_ratio.front() <= 0.5 * out.small_ratio.back();
    bool mono_large = true;
    for (std::size_t i = 1; i < out.large_ratio.size(); ++i)
        if (out.large_ratio[i] < out.large_ratio[i - 1] * (1 - 1e-9)) mono_large = false;
    out.large_increasing =
        mono_large && out.large_ratio.back() >= 2.0 * out.large_ratio.front();
    return out;
}

double symmetral_level_volume(const YoungND& sym, double s) {
    const auto& Q = sym.quantiles;
    const auto& W = sym.quantile_vols;
    if (Q.empty() || s < Q.front()) return 0.0;
    if (s >= Q.back()) return sym.dom_volume;
    std::size_t i = std::upper_bound(Q.begin(), Q.end(), s) - Q.begin();
    double w = (s - Q[i - 1]) / (Q[i] - Q[i - 1]);
    return W[i - 1] + w * (W[i] - W[i - 1]);
}

double level_support(const YoungND& phi, double s, const Vec& xi) {
    switch (phi.kind) {
        case YoungND::Kind::Symmetral: {
            double V = symmetral_level_volume(phi, s);
            double c = std::pow(V / phi.kappa, 1.0 / phi.dim);
            return c * support_function(phi.sym_body, scale(-1.0, xi));
        }
        case YoungND::Kind::RadialBody:
            return inverse_right1(phi.A, s) * gauge(phi.body, xi);
        case YoungND::Kind::RadialEuclid:
            return inverse_right1(phi.A, s) * norm2(xi, phi.dim);
        case YoungND::Kind::IndicatorBody:
            return support_function(phi.body, xi);
        case YoungND::Kind::Sampled: {
            std::vector<double> h = sublevel_support(phi, xi, {s});
            return h[0];
        }
        default:
            throw Error("argument", "no level-support path for this catalog form");
    }
}

MaximizerResult maximizer_profile(const YoungND& phiK, const Vec& xi,
                                  const std::vector<double>& levels) {
    if (levels.size() < 3) throw Error("argument", "level grid too small");
    std::vector<double> phis(levels.size());
    if (phiK.kind == YoungND::Kind::Sampled) {
        std::vector<double> h = sublevel_support(phiK, xi, levels);
        for (std::size_t i = 0; i < levels.size(); ++i)
            phis[i] = std::isfinite(h[i]) ? h[i] - levels[i] : -kInf;
    } else {
        for (std::size_t i = 0; i < levels.size(); ++i)
            phis[i] = level_support(phiK, levels[i], xi) - levels[i];
    }
    int lo = 0, hi = static_cast<int>(levels.size()) - 1;
    while (hi - lo > 2) {
        int m1 = lo + (hi - lo) / 3;
        int m2 = hi - (hi - lo) / 3;
        if (phis[m1] < phis[m2])
            lo = m1 + 1;
        else
            hi = m2;
    }
    int best = lo;
    for (int i = lo; i <= hi; ++i)
        if (phis[i] > phis[best]) best = i;
    // guard: sampling artifacts can dent the concavity the ternary relies on
    for (int i = 0; i < static_cast<int>(levels.size()); ++i)
        if (phis[i] > phis[best]) best = i;
    // smallest maximizer
    while (best > 0 && phis[best - 1] >= phis[best] - 1e-15 * std::max(1.0, std::fabs(phis[best])))
        --best;
    const int last = static_cast<int>(levels.size()) - 1;
    if (best == last && last > 0 && phis[last] > phis[last - 1])
        throw Error("level-grid-too-short",
                    "profile still increasing at the last tabulated level; extend beyond " +
                        fmt_g17(levels.back()));
    MaximizerResult mr;
    mr.index = best;
    mr.s = levels[best];
    mr.value = phis[best];
    mr.at_zero = best == 0;
    if (phiK.kind == YoungND::Kind::Symmetral && best > 0 && best < last) {
        // The tabulated profile has kinks at the sample value classes, which
        // snap the argmax to the class grid. The level-volume profile is a
        // near power law locally (its n-th root is concave), so fit
        // V ~ alpha s^beta around the coarse argmax and maximize in closed
        // form; regression over a class window averages the count wobble out.
        const auto& Q = phiK.quantiles;
        const auto& W = phiK.quantile_vols;
        double s0 = std::max(levels[best], 1e-12);
        for (double widen = 1.6; widen <= 4.0; widen *= 1.6) {
            auto a = std::lower_bound(Q.begin(), Q.end(), s0 / widen) - Q.begin();
            auto b = std::upper_bound(Q.begin(), Q.end(), s0 * widen) - Q.begin();
            std::size_t m = 0;
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t i = a; i < static_cast<std::size_t>(b); ++i) {
                if (!(Q[i] > 0) || !(W[i] > 0)) continue;
                double lx = std::log(Q[i]), ly = std::log(W[i]);
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
                ++m;
            }
            if (m < 6) continue;
            double denom = m * sxx - sx * sx;
            if (std::fabs(denom) < 1e-12) break;
            double beta = (m * sxy - sx * sy) / denom;
            double ln_alpha = (sy - beta * sx) / m;
            double q = beta / phiK.dim;
            if (!(q > 0.02 && q < 0.98)) break;
            double H = support_function(phiK.sym_body, scale(-1.0, xi));
            double c0 = H * std::exp((ln_alpha - std::log(phiK.kappa)) / phiK.dim);
            // maximize c0 s^q - s; the fitted profile is the better estimate
            // of the continuum argmax than the kinked table, so adopt it
            double sref = std::pow(c0 * q, 1.0 / (1.0 - q));
            sref = std::clamp(sref, s0 / widen, s0 * widen);
            double fref = level_support(phiK, sref, xi) - sref;
            mr.s = sref;
            mr.value = std::max(fref, mr.value);
            mr.at_zero = false;
            break;
        }
    }
    return mr;
}

YoungCheck validate_young(const YoungND& phi, Rng& rng, int ntriples, int res) {
    YoungCheck out;
    YoungND s = is_sampled(phi) ? phi : sample(phi, preferred_grid(phi, res));
    const Grid& g = s.grid;
    Vec zero{0, 0, 0};
    out.origin_value = eval(phi, zero);
    // finiteness around 0
    out.finite_near_zero = true;
    for (int a = 0; a < g.dim && out.finite_near_zero; ++a)
        for (int sgn = -1; sgn <= 1 && out.finite_near_zero; sgn += 2) {
            Vec p{0, 0, 0};
            p[a] = 2 * sgn * g.h(a);
            if (!std::isfinite(eval(phi, p))) out.finite_near_zero = false;
        }
    out.boundary_min = kInf;
    const int nz = g.dim > 2 ? g.nodes(2) : 1;
    for (int i = 0; i < g.nodes(0); ++i)
        for (int j = 0; j < g.nodes(1); ++j)
            for (int k = 0; k < nz; ++k) {
                bool rim = i == 0 || i == g.nodes(0) - 1 || j == 0 || j == g.nodes(1) - 1;
                if (g.dim > 2) rim = rim || k == 0 || k == nz - 1;
                if (!rim) continue;
                double v = s.values[g.flat(i, j, k)];
                if (std::isfinite(v)) out.boundary_min = std::min(out.boundary_min, v);
            }
    // convexity on random triples (interpolated for sampled entries)
    double defect = 0.0;
    for (int it = 0; it < ntriples; ++it) {
        Vec a{0, 0, 0}, b{0, 0, 0};
        for (int ax = 0; ax < g.dim; ++ax) {
            a[ax] = uniform(rng, g.lo[ax], g.hi[ax]);
            b[ax] = uniform(rng, g.lo[ax], g.hi[ax]);
        }
        double lam = uniform(rng, 0.0, 1.0);
        Vec mid = axpy(lam, a, scale(1 - lam, b));
        double fa = eval(phi, a), fb = eval(phi, b), fm = eval(phi, mid);
        if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm)) continue;
        double gap = fm - (lam * fa + (1 - lam) * fb);
        defect = std::max(defect, gap / std::max(1.0, std::fabs(fm)));
    }
    out.convexity_defect = defect;
    double conv_tol = is_sampled(phi) ? 1e-3 : 1e-9;
    out.ok = std::fabs(out.origin_value) <= 1e-9 && out.finite_near_zero &&
             out.convexity_defect <= conv_tol;
    return out;
}

std::pair<YoungND, double> convexify(const YoungND& sampled) {
    if (!is_sampled(sampled)) throw Error("argument", "need sampled values");
    const Grid& g = sampled.grid;
    // slope box from full-box finite differences
    Grid dual = g;
    const int nz = g.dim > 2 ? g.nodes(2) : 1;
    for (int a = 0; a < g.dim; ++a) {
        double worst = 0.0;
        for (int i = 0; i < g.nodes(0); ++i)
            for (int j = 0; j < g.nodes(1); ++j)
                for (int k = 0; k < nz; ++k) {
                    int idx[3] = {i, j, k};
                    if (idx[a] + 1 >= g.nodes(a)) continue;
                    int up[3] = {i, j, k};
                    up[a]++;
                    double v0 = sampled.values[g.flat(i, j, k)];
                    double v1 = sampled.values[g.flat(up[0], up[1], up[2])];
                    if (!std::isfinite(v0) || !std::isfinite(v1)) continue;
                    worst = std::max(worst, std::fabs(v1 - v0) / g.h(a));
                }
        double w = std::clamp(1.25 * worst, 4.0, 1e6);
        dual.lo[a] = -w;
        dual.hi[a] = w;
        // a dense slope grid keeps convex inputs fixed: every node needs a
        // slope inside its subdifferential interval
        dual.res[a] = 4 * g.res[a];
    }
    YoungND cc = conjugate_fast(conjugate_fast(sampled, dual), g);
    double dev = 0.0;
    for (std::size_t i = 0; i < cc.values.size(); ++i) {
        double orig = sampled.values[i];
        if (std::isfinite(orig)) dev = std::max(dev, orig - cc.values[i]);
    }
    cc.spec = sampled.spec;
    return {cc, dev};
}

// ---------------------------------------------------------------------------
// catalog parsing
// ---------------------------------------------------------------------------

namespace {

std::vector<double> parse_nums(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    return v;
}

YoungND matrix_form(std::vector<Young1D> As, std::vector<Vec> rows, int dim, std::string spec) {
    YoungND phi;
    phi.kind = YoungND::Kind::Matrix;
    phi.dim = dim;
    phi.terms = std::move(As);
    phi.rows = std::move(rows);
    phi.spec = std::move(spec);
    return phi;
}

}  // namespace

YoungND parse_young(const std::string& spec) {
    if (spec == "quad") {
        Young1D half;
        half.kind = Young1D::Kind::Power;
        half.p = 2;
        half.coef = 0.5;
        return matrix_form({half, half}, {vec2(1, 0), vec2(0, 1)}, 2, spec);
    }
    if (spec.rfind("pnorm:", 0) == 0) {
        auto ps = parse_nums(spec.substr(6));
        if (ps.size() != 2 && ps.size() != 3)
            throw Error("config", "pnorm needs 2 or 3 exponents: " + spec);
        std::vector<Young1D> As;
        std::vector<Vec> rows;
        for (std::size_t i = 0; i < ps.size(); ++i) {
            Young1D A;
            A.kind = Young1D::Kind::Power;
            A.p = ps[i];
            if (A.p < 1) throw Error("config", "pnorm exponents must be >= 1");
            As.push_back(A);
            Vec r{0, 0, 0};
            r[i] = 1;
            rows.push_back(r);
        }
        return matrix_form(std::move(As), std::move(rows), static_cast<int>(ps.size()), spec);
    }
    if (spec.rfind("powerlog:", 0) == 0 || spec.rfind("exp:", 0) == 0) {
        YoungND phi;
        phi.kind = YoungND::Kind::RadialEuclid;
        phi.dim = 2;
        phi.A = parse_young1(spec);
        phi.spec = spec;
        return phi;
    }
    if (spec.rfind("trud:", 0) == 0) {
        auto v = parse_nums(spec.substr(5));
        if (v.size() != 4) throw Error("config", "trud needs p,q,alpha,c: " + spec);
        Young1D A1;
        A1.kind = Young1D::Kind::Power;
        A1.p = v[0];
        Young1D A2;
        A2.kind = Young1D::Kind::PowerLog;
        A2.p = v[1];
        A2.q = v[2];
        A2.c = v[3];
        return matrix_form({A1, A2}, {vec2(1, -1), vec2(1, 0)}, 2, spec);
    }
    if (spec.rfind("trud1:", 0) == 0) {
        auto v = parse_nums(spec.substr(6));
        if (v.size() != 2) throw Error("config", "trud1 needs p,beta: " + spec);
        Young1D A1;
        A1.kind = Young1D::Kind::Power;
        A1.p = v[0];
        Young1D A2;
        A2.kind = Young1D::Kind::Exp;
        A2.alpha = v[1];
        return matrix_form({A1, A2}, {vec2(1, 3), vec2(2, -1)}, 2, spec);
    }
    if (spec.rfind("radial:", 0) == 0) {
        std::string rest = spec.substr(7);
        // the body spec is the shortest parsable suffix
        for (std::size_t pos = rest.rfind(':'); pos != std::string::npos;
             pos = pos == 0 ? std::string::npos : rest.rfind(':', pos - 1)) {
            std::string bodyspec = rest.substr(pos + 1);
            std::string aspec = rest.substr(0, pos);
            try {
                ConvexBody body = parse_body(bodyspec);
                Young1D A = parse_young1(aspec);
                YoungND phi;
                phi.kind = YoungND::Kind::RadialBody;
                phi.dim = body.dim;
                phi.A = A;
                phi.body = body;
                phi.spec = spec;
                return phi;
            } catch (const Error&) {
                continue;
            }
        }
        throw Error("config", "cannot split radial entry into A and body: " + spec);
    }
    if (spec.rfind("matrix:", 0) == 0) {
        std::string rest = spec.substr(7);
        std::size_t pos = rest.rfind(':');
        if (pos == std::string::npos) throw Error("config", "matrix needs A-list and rows");
        std::string alist = rest.substr(0, pos), rowspec = rest.substr(pos + 1);
        std::vector<Young1D> As;
        std::stringstream sa(alist);
        std::string tok;
        while (std::getline(sa, tok, '|')) As.push_back(parse_young1(tok));
        std::vector<Vec> rows;
        std::stringstream sr(rowspec);
        while (std::getline(sr, tok, ';')) {
            auto v = parse_nums(tok);
            Vec r{0, 0, 0};
            for (std::size_t i = 0; i < v.size() && i < 3; ++i) r[i] = v[i];
            rows.push_back(r);
        }
        if (As.size() != rows.size() || As.empty())
            throw Error("config", "matrix A-list and row counts differ: " + spec);
        int dim = rows[0][2] != 0 || rows.size() > 2 ? 3 : 2;
        double det = rows.size() >= 2 ? rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0] : 0.0;
        if (rows.size() == 2 && std::fabs(det) < 1e-12)
            throw Error("config", "matrix rows are singular: " + spec);
        return matrix_form(std::move(As), std::move(rows), dim, spec);
    }
    if (spec.rfind("indicator:", 0) == 0) {
        ConvexBody body = parse_body(spec.substr(10));
        YoungND phi;
        phi.kind = YoungND::Kind::IndicatorBody;
        phi.dim = body.dim;
        phi.body = body;
        phi.spec = spec;
        return phi;
    }
    if (spec.rfind("csv:", 0) == 0) {
        GridFunction gf = read_grid_csv(spec.substr(4));
        YoungND phi;
        phi.kind = YoungND::Kind::Sampled;
        phi.dim = gf.grid.dim;
        phi.grid = gf.grid;
        phi.values = std::move(gf.v);
        phi.spec = spec;
        return phi;
    }
    throw Error("config", "unknown Young catalog entry: " + spec);
}

}  // namespace aniso
