#include "aniso/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace aniso {

bool Grid::same_layout(const Grid& o) const {
    if (dim != o.dim) return false;
    for (int a = 0; a < dim; ++a)
        if (lo[a] != o.lo[a] || hi[a] != o.hi[a] || res[a] != o.res[a]) return false;
    return true;
}

Grid make_grid2(double x0, double x1, double y0, double y1, int nx, int ny) {
    if (nx < 1 || ny < 1 || x1 <= x0 || y1 <= y0) throw Error("config", "bad grid box/resolution");
    Grid g;
    g.dim = 2;
    g.lo = {x0, y0, 0};
    g.hi = {x1, y1, 0};
    g.res = {nx, ny, 0};
    return g;
}

GridFunction make_function(const Grid& g, const std::function<double(const Vec&)>& f) {
    GridFunction u;
    u.grid = g;
    u.v.resize(g.node_count());
    const int nz = g.dim > 2 ? g.nodes(2) : 1;
    for (int i = 0; i < g.nodes(0); ++i)
        for (int j = 0; j < g.nodes(1); ++j)
            for (int k = 0; k < nz; ++k) u.v[g.flat(i, j, k)] = f(g.node(i, j, k));
    return u;
}

VectorField gradient(const GridFunction& u) {
    const Grid& g = u.grid;
    VectorField out;
    out.grid = g;
    for (int a = 0; a < g.dim; ++a) out.comp[a].assign(g.node_count(), 0.0);
    if (g.dim == 2) out.comp[2].assign(g.node_count(), 0.0);
    const int nz = g.dim > 2 ? g.nodes(2) : 1;
    for (int i = 0; i < g.nodes(0); ++i)
        for (int j = 0; j < g.nodes(1); ++j)
            for (int k = 0; k < nz; ++k) {
                std::size_t f = g.flat(i, j, k);
                int idx[3] = {i, j, k};
                for (int a = 0; a < g.dim; ++a) {
                    int n = g.nodes(a);
                    int ip = std::min(idx[a] + 1, n - 1);
                    int im = std::max(idx[a] - 1, 0);
                    int up[3] = {i, j, k}, dn[3] = {i, j, k};
                    up[a] = ip;
                    dn[a] = im;
                    double d = (u.v[g.flat(up[0], up[1], up[2])] -
                                u.v[g.flat(dn[0], dn[1], dn[2])]) /
                               ((ip - im) * g.h(a));
                    out.comp[a][f] = d;
                }
            }
    if (g.dim == 2 && out.comp[2].empty()) out.comp[2].assign(g.node_count(), 0.0);
    return out;
}

namespace {

struct CellLocator {
    int cell[3] = {0, 0, 0};
    double frac[3] = {0, 0, 0};
    bool outside = false;
};

CellLocator locate(const Grid& g, const Vec& x) {
    CellLocator loc;
    for (int a = 0; a < g.dim; ++a) {
        double t = (x[a] - g.lo[a]) / g.h(a);
        if (t < 0) {
            t = 0;
            loc.outside = true;
        }
        if (t > g.res[a]) {
            t = g.res[a];
            loc.outside = true;
        }
        int c = std::min(static_cast<int>(t), g.res[a] - 1);
        loc.cell[a] = c;
        loc.frac[a] = t - c;
    }
    return loc;
}

}  // namespace

double interpolate(const Grid& g, const std::vector<double>& v, const Vec& x) {
    CellLocator loc = locate(g, x);
    if (g.dim == 2) {
        int i = loc.cell[0], j = loc.cell[1];
        double fx = loc.frac[0], fy = loc.frac[1];
        double v00 = v[g.flat(i, j)], v10 = v[g.flat(i + 1, j)], v01 = v[g.flat(i, j + 1)],
               v11 = v[g.flat(i + 1, j + 1)];
        return (1 - fx) * ((1 - fy) * v00 + fy * v01) + fx * ((1 - fy) * v10 + fy * v11);
    }
    int i = loc.cell[0], j = loc.cell[1], k = loc.cell[2];
    double fx = loc.frac[0], fy = loc.frac[1], fz = loc.frac[2];
    double acc = 0.0;
    for (int di = 0; di <= 1; ++di)
        for (int dj = 0; dj <= 1; ++dj)
            for (int dk = 0; dk <= 1; ++dk) {
                double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? fz : 1 - fz);
                acc += w * v[g.flat(i + di, j + dj, k + dk)];
            }
    return acc;
}

double interpolate_extended(const Grid& g, const std::vector<double>& v, const Vec& x,
                            bool* outside_box) {
    CellLocator loc = locate(g, x);
    if (outside_box) *outside_box = loc.outside;
    if (loc.outside) return kInf;
    if (g.dim == 2) {
        int i = loc.cell[0], j = loc.cell[1];
        for (int di = 0; di <= 1; ++di)
            for (int dj = 0; dj <= 1; ++dj)
                if (!std::isfinite(v[g.flat(i + di, j + dj)])) return kInf;
    } else {
        int i = loc.cell[0], j = loc.cell[1], k = loc.cell[2];
        for (int di = 0; di <= 1; ++di)
            for (int dj = 0; dj <= 1; ++dj)
                for (int dk = 0; dk <= 1; ++dk)
                    if (!std::isfinite(v[g.flat(i + di, j + dj, k + dk)])) return kInf;
    }
    return interpolate(g, v, x);
}

double essinf(const GridFunction& u) {
    const Grid& g = u.grid;
    std::map<double, int> counts;
    const int nz = g.dim > 2 ? g.nodes(2) : 1;
    for (int i = 0; i < g.nodes(0); ++i)
        for (int j = 0; j < g.nodes(1); ++j)
            for (int k = 0; k < nz; ++k) {
                bool rim = i == 0 || i == g.nodes(0) - 1 || j == 0 || j == g.nodes(1) - 1;
                if (g.dim > 2) rim = rim || k == 0 || k == nz - 1;
                if (rim) counts[u.v[g.flat(i, j, k)]]++;
            }
    double best = 0.0;
    int bestc = -1;
    for (auto& [val, c] : counts)
        if (c > bestc) {
            bestc = c;
            best = val;
        }
    return best;
}

GridFunction truncate(const GridFunction& u, double t1, double t2) {
    if (!(t1 < t2)) throw Error("argument", "truncation needs t1 < t2");
    GridFunction out = u;
    for (double& x : out.v) x = std::clamp(x, t1, t2);
    return out;
}

GridFunction decimate(const GridFunction& u) {
    const Grid& g = u.grid;
    for (int a = 0; a < g.dim; ++a)
        if (g.res[a] % 2 != 0) throw Error("argument", "decimation needs even resolution");
    Grid cg = g;
    for (int a = 0; a < g.dim; ++a) cg.res[a] = g.res[a] / 2;
    GridFunction out;
    out.grid = cg;
    out.v.resize(cg.node_count());
    const int nz = cg.dim > 2 ? cg.nodes(2) : 1;
    for (int i = 0; i < cg.nodes(0); ++i)
        for (int j = 0; j < cg.nodes(1); ++j)
            for (int k = 0; k < nz; ++k)
                out.v[cg.flat(i, j, k)] = u.v[g.flat(2 * i, 2 * j, cg.dim > 2 ? 2 * k : 0)];
    return out;
}

double level_integral(const GridFunction& u, const std::vector<double>& f, double t, double dt,
                      const VectorField& grad, double grad_floor) {
    if (dt <= 0) throw Error("argument", "band width must be positive");
    // hat-weighted band: a sharp window aliases against the discrete level
    // rings of symmetrized fields, the triangular kernel does not
    std::vector<double> terms;
    for (std::size_t n = 0; n < u.v.size(); ++n) {
        double w = 1.0 - std::fabs(u.v[n] - t) / dt;
        if (w <= 0.0) continue;
        if (grad.magnitude(n) < grad_floor) continue;
        terms.push_back(f[n] * w);
    }
    return tree_sum(terms) * u.grid.cell_volume() / dt;
}

void write_grid_csv(const std::string& path, const GridFunction& u) {
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot write " + path);
    const Grid& g = u.grid;
    out << "# box:";
    for (int a = 0; a < g.dim; ++a) out << ' ' << fmt_g17(g.lo[a]) << ' ' << fmt_g17(g.hi[a]);
    out << "\n# res:";
    for (int a = 0; a < g.dim; ++a) out << ' ' << g.nodes(a);
    out << "\n";
    const int nz = g.dim > 2 ? g.nodes(2) : 1;
    for (int i = 0; i < g.nodes(0); ++i)
        for (int k = 0; k < nz; ++k) {
            for (int j = 0; j < g.nodes(1); ++j) {
                double x = u.v[g.flat(i, j, k)];
                if (j) out << ',';
                if (std::isinf(x))
                    out << (x > 0 ? "inf" : "-inf");
                else
                    out << fmt_g17(x);
            }
            out << "\n";
        }
}

GridFunction read_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot read " + path);
    std::string line;
    Vec lo{}, hi{};
    std::array<int, 3> nodes{0, 0, 0};
    int dim = 0;
    // header
    while (std::getline(in, line)) {
        if (line.rfind("# box:", 0) == 0) {
            std::istringstream ss(line.substr(6));
            std::vector<double> xs;
            double x;
            while (ss >> x) xs.push_back(x);
            dim = static_cast<int>(xs.size() / 2);
            for (int a = 0; a < dim; ++a) {
                lo[a] = xs[2 * a];
                hi[a] = xs[2 * a + 1];
            }
        } else if (line.rfind("# res:", 0) == 0) {
            std::istringstream ss(line.substr(6));
            int a = 0;
            int n;
            while (ss >> n && a < 3) nodes[a++] = n;
            break;
        }
    }
    if (dim < 2 || nodes[0] < 2 || nodes[1] < 2)
        throw Error("io", "missing or malformed grid header in " + path);
    Grid g;
    g.dim = dim;
    g.lo = lo;
    g.hi = hi;
    for (int a = 0; a < dim; ++a) g.res[a] = nodes[a] - 1;
    GridFunction u;
    u.grid = g;
    u.v.reserve(g.node_count());
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok == "inf")
                u.v.push_back(kInf);
            else if (tok == "-inf")
                u.v.push_back(-kInf);
            else
                u.v.push_back(std::stod(tok));
        }
    }
    if (u.v.size() != g.node_count())
        throw Error("io", "grid value count mismatch in " + path);
    return u;
}

}  // namespace aniso
