#include "aniso/convex_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace aniso {

namespace {

double cross2(const Vec& o, const Vec& a, const Vec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Monotone chain; returns hull in CCW order.
std::vector<Vec> hull_2d(std::vector<Vec> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const int n = static_cast<int>(pts.size());
    if (n < 3) return pts;
    std::vector<Vec> h(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (int i = n - 2, lower = k + 1; i >= 0; --i) {
        while (k >= lower && cross2(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

struct Tri {
    int a, b, c;
    Vec n{};
    double off = 0.0;
    bool alive = true;
};

Vec tri_normal(const Vec& a, const Vec& b, const Vec& c) {
    Vec u = sub(b, a), v = sub(c, a);
    return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

// Incremental 3-d hull; input sizes here are small (catalog bodies and the
// 1024-direction polar sampling), so the O(n * faces) scan is fine.
std::vector<Tri> hull_3d(const std::vector<Vec>& pts, double eps) {
    const int n = static_cast<int>(pts.size());
    if (n < 4) throw Error("zero-volume", "fewer than 4 points for a 3-d body");

    // initial tetrahedron from extreme points
    int i0 = 0, i1 = -1;
    for (int i = 1; i < n; ++i)
        if (pts[i] < pts[i0]) i0 = i;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
        double d = norm2(sub(pts[i], pts[i0]), 3);
        if (d > best) best = d, i1 = i;
    }
    int i2 = -1;
    best = -1.0;
    for (int i = 0; i < n; ++i) {
        Vec nn = tri_normal(pts[i0], pts[i1], pts[i]);
        double d = norm2(nn, 3);
        if (d > best) best = d, i2 = i;
    }
    int i3 = -1;
    best = -1.0;
    Vec n012 = tri_normal(pts[i0], pts[i1], pts[i2]);
    for (int i = 0; i < n; ++i) {
        double d = std::fabs(dot(n012, sub(pts[i], pts[i0]), 3));
        if (d > best) best = d, i3 = i;
    }
    if (i1 < 0 || i2 < 0 || i3 < 0 || best <= eps)
        throw Error("zero-volume", "3-d point set is degenerate (flat)");

    if (dot(n012, sub(pts[i3], pts[i0]), 3) > 0) std::swap(i1, i2);

    std::vector<Tri> faces;
    auto add_face = [&](int a, int b, int c, const Vec& inside) {
        Tri t{a, b, c};
        t.n = tri_normal(pts[a], pts[b], pts[c]);
        double len = norm2(t.n, 3);
        t.n = scale(1.0 / len, t.n);
        t.off = dot(t.n, pts[a], 3);
        if (dot(t.n, inside, 3) > t.off) {  // flip to point away from inside
            std::swap(t.b, t.c);
            t.n = scale(-1.0, t.n);
            t.off = dot(t.n, pts[t.a], 3);
        }
        faces.push_back(t);
    };
    Vec centroid = scale(0.25, add(add(pts[i0], pts[i1]), add(pts[i2], pts[i3])));
    add_face(i0, i1, i2, centroid);
    add_face(i0, i2, i3, centroid);
    add_face(i0, i3, i1, centroid);
    add_face(i1, i3, i2, centroid);

    for (int p = 0; p < n; ++p) {
        if (p == i0 || p == i1 || p == i2 || p == i3) continue;
        std::vector<int> visible;
        for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
            if (!faces[f].alive) continue;
            if (dot(faces[f].n, pts[p], 3) > faces[f].off + eps) visible.push_back(f);
        }
        if (visible.empty()) continue;
        // horizon = directed edges of visible faces whose reverse is not visible
        std::map<std::pair<int, int>, int> edge_count;
        for (int f : visible) {
            const Tri& t = faces[f];
            int e[3][2] = {{t.a, t.b}, {t.b, t.c}, {t.c, t.a}};
            for (auto& ed : e) edge_count[{ed[0], ed[1]}]++;
        }
        std::vector<std::pair<int, int>> horizon;
        for (auto& [edge, cnt] : edge_count) {
            (void)cnt;
            if (!edge_count.count({edge.second, edge.first})) horizon.push_back(edge);
        }
        for (int f : visible) faces[f].alive = false;
        for (auto& [u, v] : horizon) add_face(u, v, p, centroid);
    }
    std::vector<Tri> out;
    for (auto& t : faces)
        if (t.alive) out.push_back(t);
    return out;
}

double polygon_area(const std::vector<Vec>& v) {
    double s = 0.0;
    const int n = static_cast<int>(v.size());
    for (int i = 0; i < n; ++i) {
        const Vec& a = v[i];
        const Vec& b = v[(i + 1) % n];
        s += a[0] * b[1] - b[0] * a[1];
    }
    return 0.5 * s;
}

bool origin_interior(const std::vector<Facet>& facets) {
    for (const Facet& f : facets)
        if (f.offset <= 1e-12) return false;
    return !facets.empty();
}

}  // namespace

ConvexBody make_body(int dim, std::vector<Vec> points) {
    if (points.empty()) throw Error("invalid-body", "empty vertex list");
    ConvexBody body;
    body.dim = dim;
    if (dim == 2) {
        std::vector<Vec> hull = hull_2d(std::move(points));
        if (hull.size() < 3) throw Error("zero-volume", "2-d body is flat");
        body.vertices = hull;
        const int n = static_cast<int>(hull.size());
        for (int i = 0; i < n; ++i) {
            const Vec& a = hull[i];
            const Vec& b = hull[(i + 1) % n];
            Vec d = sub(b, a);
            double len = norm2(d, 2);
            Facet f;
            f.normal = {d[1] / len, -d[0] / len, 0.0};
            f.offset = dot(f.normal, a, 2);
            body.facets.push_back(f);
        }
        body.volume = polygon_area(hull);
        if (body.volume <= 0) throw Error("zero-volume", "2-d body has nonpositive area");
    } else if (dim == 3) {
        double span = 0.0;
        for (const Vec& p : points) span = std::max(span, norm2(p, 3));
        std::vector<Tri> tris = hull_3d(points, 1e-10 * std::max(1.0, span));
        std::vector<char> used(points.size(), 0);
        Vec c{0, 0, 0};
        int cn = 0;
        for (const Tri& t : tris)
            for (int idx : {t.a, t.b, t.c})
                if (!used[idx]) {
                    used[idx] = 1;
                    c = add(c, points[idx]);
                    ++cn;
                }
        c = scale(1.0 / cn, c);
        double vol = 0.0;
        for (const Tri& t : tris) {
            Vec u = sub(points[t.a], c), v = sub(points[t.b], c), w = sub(points[t.c], c);
            vol += (u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) +
                    u[2] * (v[0] * w[1] - v[1] * w[0])) /
                   6.0;
        }
        body.volume = vol;
        if (body.volume <= 0) throw Error("zero-volume", "3-d body has nonpositive volume");
        for (std::size_t i = 0; i < points.size(); ++i)
            if (used[i]) body.vertices.push_back(points[i]);
        for (const Tri& t : tris) body.facets.push_back(Facet{t.n, t.off});
    } else {
        throw Error("invalid-body", "dimension must be 2 or 3");
    }
    body.contains_origin_interior = origin_interior(body.facets);
    return body;
}

double support_function(const ConvexBody& body, const Vec& dir) {
    if (body.vertices.empty()) throw Error("invalid-body", "empty vertex list");
    double best = -kInf;
    for (const Vec& v : body.vertices) best = std::max(best, dot(dir, v, body.dim));
    return best;
}

double gauge(const ConvexBody& body, const Vec& x) {
    if (!body.contains_origin_interior)
        throw Error("degenerate-gauge", "origin is not interior to the body");
    double best = 0.0;
    for (const Facet& f : body.facets) best = std::max(best, dot(f.normal, x, body.dim) / f.offset);
    return best;
}

ConvexBody polar(const ConvexBody& body) {
    if (!body.contains_origin_interior)
        throw Error("degenerate-polar", "origin is not interior to the body");
    std::vector<Vec> pts;
    if (body.dim == 2) {
        // edge with outward normal nu at support value h maps to the vertex nu/h
        pts.reserve(body.facets.size());
        for (const Facet& f : body.facets) pts.push_back(scale(1.0 / f.offset, f.normal));
    } else {
        // sampled support directions (Fibonacci sphere), boundary points d / h_L(d)
        const int m = 1024;
        const double ga = M_PI * (3.0 - std::sqrt(5.0));
        pts.reserve(m);
        for (int k = 0; k < m; ++k) {
            double z = 1.0 - 2.0 * (k + 0.5) / m;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            Vec d{r * std::cos(ga * k), r * std::sin(ga * k), z};
            pts.push_back(scale(1.0 / support_function(body, d), d));
        }
    }
    return make_body(body.dim, std::move(pts));
}

ConvexBody dilate_translate(const ConvexBody& body, double s, const Vec& shift) {
    if (s == 0.0) throw Error("argument", "dilation scale must be nonzero");
    std::vector<Vec> pts;
    pts.reserve(body.vertices.size());
    for (const Vec& v : body.vertices) pts.push_back(axpy(s, v, shift));
    return make_body(body.dim, std::move(pts));
}

NormPair make_norm_pair(const ConvexBody& body) {
    NormPair np;
    np.body = body;
    np.dual = polar(body);
    np.c1 = kInf;
    np.c2 = 0.0;
    const int m = body.dim == 2 ? 256 : 1024;
    for (int k = 0; k < m; ++k) {
        Vec d;
        if (body.dim == 2) {
            double th = 2 * M_PI * k / m;
            d = vec2(std::cos(th), std::sin(th));
        } else {
            const double ga = M_PI * (3.0 - std::sqrt(5.0));
            double z = 1.0 - 2.0 * (k + 0.5) / m;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            d = vec3(r * std::cos(ga * k), r * std::sin(ga * k), z);
        }
        double h = support_function(body, d);
        np.c1 = std::min(np.c1, h);
        np.c2 = std::max(np.c2, h);
    }
    return np;
}

Vec CellMask::cell_center(const std::array<int, 3>& idx) const {
    Vec p{0, 0, 0};
    for (int a = 0; a < dim; ++a) p[a] = lo[a] + (idx[a] + 0.5) * h(a);
    return p;
}

double CellMask::volume() const {
    std::size_t cnt = 0;
    for (auto c : cells) cnt += c;
    return static_cast<double>(cnt) * cell_volume();
}

CellMask rasterize(const ConvexBody& body, int dim, const Vec& lo, const Vec& hi,
                   const std::array<int, 3>& res) {
    CellMask m;
    m.dim = dim;
    m.lo = lo;
    m.hi = hi;
    m.res = res;
    m.cells.assign(m.cell_count(), 0);
    std::array<int, 3> idx{0, 0, 0};
    std::size_t flat = 0;
    const int nz = dim > 2 ? res[2] : 1;
    for (int i = 0; i < res[0]; ++i)
        for (int j = 0; j < res[1]; ++j)
            for (int k = 0; k < nz; ++k, ++flat) {
                idx = {i, j, k};
                Vec p = m.cell_center(idx);
                bool inside = true;
                for (const Facet& f : body.facets)
                    if (dot(f.normal, p, dim) > f.offset) {
                        inside = false;
                        break;
                    }
                m.cells[flat] = inside ? 1 : 0;
            }
    return m;
}

namespace {

double perimeter_cell_interface(const CellMask& mask, const ConvexBody& L) {
    const int dim = mask.dim;
    const int nz = dim > 2 ? mask.res[2] : 1;
    auto flat = [&](int i, int j, int k) {
        return (static_cast<std::size_t>(i) * mask.res[1] + j) * nz + k;
    };
    double total = 0.0;
    for (int i = 0; i < mask.res[0]; ++i)
        for (int j = 0; j < mask.res[1]; ++j)
            for (int k = 0; k < nz; ++k) {
                if (!mask.cells[flat(i, j, k)]) continue;
                int idx[3] = {i, j, k};
                for (int a = 0; a < dim; ++a) {
                    double area = 1.0;
                    for (int b = 0; b < dim; ++b)
                        if (b != a) area *= mask.h(b);
                    for (int side = -1; side <= 1; side += 2) {
                        int nb[3] = {idx[0], idx[1], idx[2]};
                        nb[a] += side;
                        bool exposed = nb[a] < 0 || nb[a] >= mask.res[a] ||
                                       !mask.cells[flat(nb[0], nb[1], nb[2])];
                        if (exposed) {
                            Vec nu{0, 0, 0};
                            nu[a] = side;
                            total += support_function(L, nu) * area;
                        }
                    }
                }
            }
    return total;
}

double perimeter_smooth(const CellMask& mask, const ConvexBody& L, double radius_cells) {
    if (mask.dim != 2)
        throw Error("argument", "smooth perimeter mode is implemented for dim 2");
    const int nx = mask.res[0], ny = mask.res[1];
    const double hx = mask.h(0), hy = mask.h(1);
    auto flat = [&](int i, int j) { return static_cast<std::size_t>(i) * ny + j; };
    const int r = static_cast<int>(std::ceil(radius_cells));
    // mollified indicator at cell centers, kernel (1 - (r/rho)^2)^4
    std::vector<double> w((2 * r + 1) * (2 * r + 1));
    double wsum = 0.0;
    for (int di = -r; di <= r; ++di)
        for (int dj = -r; dj <= r; ++dj) {
            double rr = std::sqrt(double(di * di + dj * dj)) / radius_cells;
            double v = rr < 1.0 ? std::pow(1.0 - rr * rr, 4) : 0.0;
            w[(di + r) * (2 * r + 1) + (dj + r)] = v;
            wsum += v;
        }
    std::vector<double> chi(static_cast<std::size_t>(nx) * ny, 0.0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            double acc = 0.0;
            for (int di = -r; di <= r; ++di) {
                int ii = i + di;
                if (ii < 0 || ii >= nx) continue;
                for (int dj = -r; dj <= r; ++dj) {
                    int jj = j + dj;
                    if (jj < 0 || jj >= ny) continue;
                    if (mask.cells[flat(ii, jj)]) acc += w[(di + r) * (2 * r + 1) + (dj + r)];
                }
            }
            chi[flat(i, j)] = acc / wsum;
        }
    double total = 0.0;
    const double cellvol = hx * hy;
    for (int i = 1; i + 1 < nx; ++i)
        for (int j = 1; j + 1 < ny; ++j) {
            double gx = (chi[flat(i + 1, j)] - chi[flat(i - 1, j)]) / (2 * hx);
            double gy = (chi[flat(i, j + 1)] - chi[flat(i, j - 1)]) / (2 * hy);
            if (gx == 0.0 && gy == 0.0) continue;
            total += support_function(L, vec2(-gx, -gy)) * cellvol;
        }
    return total;
}

}  // namespace

double anisotropic_perimeter(const CellMask& mask, const ConvexBody& weight, PerimeterMode mode,
                             double mollify_radius_cells) {
    bool empty = true;
    for (auto c : mask.cells)
        if (c) {
            empty = false;
            break;
        }
    if (empty) return 0.0;
    return mode == PerimeterMode::CellInterface
               ? perimeter_cell_interface(mask, weight)
               : perimeter_smooth(mask, weight, mollify_radius_cells);
}

ConvexBody parse_body(const std::string& spec) {
    auto regular = [](int n, double radius, double phase) {
        std::vector<Vec> pts;
        pts.reserve(n);
        for (int k = 0; k < n; ++k) {
            double th = phase + 2 * M_PI * k / n;
            pts.push_back(vec2(radius * std::cos(th), radius * std::sin(th)));
        }
        return pts;
    };
    if (spec == "square")
        return make_body(2, {vec2(1, 1), vec2(-1, 1), vec2(-1, -1), vec2(1, -1)});
    if (spec == "cross")
        return make_body(2, {vec2(1, 0), vec2(0, 1), vec2(-1, 0), vec2(0, -1)});
    if (spec == "hexagon")  // unit inradius
        return make_body(2, regular(6, 2.0 / std::sqrt(3.0), 0.0));
    if (spec == "simplex")  // regular triangle, origin interior
        return make_body(2, regular(3, 1.0, M_PI / 2));
    if (spec == "disc") return make_body(2, regular(256, 1.0, 0.0));
    if (spec.rfind("disc:", 0) == 0) {
        int n = std::atoi(spec.c_str() + 5);
        if (n < 3) throw Error("config", "disc needs at least 3 vertices: " + spec);
        return make_body(2, regular(n, 1.0, 0.0));
    }
    if (spec.rfind("polygon:", 0) == 0) {
        std::string path = spec.substr(8);
        std::ifstream in(path);
        if (!in) throw Error("io", "cannot read polygon file " + path);
        std::vector<Vec> pts;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            double x, y;
            char comma;
            if (ss >> x >> comma >> y) pts.push_back(vec2(x, y));
        }
        return make_body(2, std::move(pts));
    }
    throw Error("config", "unknown body catalog entry: " + spec);
}

}  // namespace aniso
