#ifndef ANISO_GRID_HPP
#define ANISO_GRID_HPP

#include <string>
#include <vector>

#include "aniso/util.hpp"

namespace aniso {

// Uniform node-centered box grid in dimension 2 or 3. res counts cells per
// axis, so each axis carries res+1 nodes including both box faces.
struct Grid {
    int dim = 2;
    Vec lo{}, hi{};
    std::array<int, 3> res{};

    int nodes(int axis) const { return res[axis] + 1; }
    double h(int axis) const { return (hi[axis] - lo[axis]) / res[axis]; }
    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= h(a);
        return v;
    }
    std::size_t node_count() const {
        std::size_t n = 1;
        for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(nodes(a));
        return n;
    }
    std::size_t flat(int i, int j, int k = 0) const {
        std::size_t f = static_cast<std::size_t>(i) * nodes(1) + j;
        if (dim > 2) f = f * nodes(2) + k;
        return f;
    }
    Vec node(int i, int j, int k = 0) const {
        Vec p{lo[0] + i * h(0), lo[1] + j * h(1), 0.0};
        if (dim > 2) p[2] = lo[2] + k * h(2);
        return p;
    }
    Vec node_from_flat(std::size_t f) const {
        if (dim == 2) {
            int ny = nodes(1);
            return node(static_cast<int>(f / ny), static_cast<int>(f % ny));
        }
        int ny = nodes(1), nz = nodes(2);
        int k = static_cast<int>(f % nz);
        std::size_t r = f / nz;
        return node(static_cast<int>(r / ny), static_cast<int>(r % ny), k);
    }
    bool same_layout(const Grid& o) const;
};

Grid make_grid2(double x0, double x1, double y0, double y1, int nx, int ny);
inline Grid make_grid2(double a, double b, int n) { return make_grid2(a, b, a, b, n, n); }

// Scalar field on grid nodes; +inf entries are allowed for sampled integrands
// but ordinary trial functions stay finite.
struct GridFunction {
    Grid grid;
    std::vector<double> v;

    double& at(int i, int j, int k = 0) { return v[grid.flat(i, j, k)]; }
    double at(int i, int j, int k = 0) const { return v[grid.flat(i, j, k)]; }
};

GridFunction make_function(const Grid& g, const std::function<double(const Vec&)>& f);

struct VectorField {
    Grid grid;
    std::array<std::vector<double>, 3> comp;

    Vec at(std::size_t flat) const {
        Vec g{comp[0][flat], comp[1][flat], 0.0};
        if (grid.dim > 2) g[2] = comp[2][flat];
        return g;
    }
    double magnitude(std::size_t flat) const { return norm2(at(flat), grid.dim); }
};

// Central differences in the interior, one-sided on the rim; exact for affine
// fields at interior nodes.
VectorField gradient(const GridFunction& u);

// Multilinear interpolation. Out-of-box points clamp to the box face.
double interpolate(const Grid& g, const std::vector<double>& v, const Vec& x);
inline double interpolate(const GridFunction& u, const Vec& x) {
    return interpolate(u.grid, u.v, x);
}

// Interpolation for extended-real samples: a cell with any non-finite corner
// evaluates to +inf, which keeps the effective domain closed from inside.
double interpolate_extended(const Grid& g, const std::vector<double>& v, const Vec& x,
                            bool* outside_box = nullptr);
inline double interpolate_extended(const GridFunction& u, const Vec& x,
                                   bool* outside_box = nullptr) {
    return interpolate_extended(u.grid, u.v, x, outside_box);
}

// Most frequent value on the boundary ring of the box.
double essinf(const GridFunction& u);

// Clamps values to [t1, t2]; t1 < t2 required.
GridFunction truncate(const GridFunction& u, double t1, double t2);

// Coarsen by node decimation (even res required); used for refinement traces.
GridFunction decimate(const GridFunction& u);

// Band-average approximation of the level integral of f/|grad u| over {u=t}:
// (1/dt) * sum of f over nodes with t-dt/2 < u <= t+dt/2, times cell volume.
// Nodes with |grad u| below grad_floor are treated as plateau mass and are
// skipped. With f = |grad u| this recovers the perimeter-type integral.
double level_integral(const GridFunction& u, const std::vector<double>& f, double t, double dt,
                      const VectorField& grad, double grad_floor = 1e-8);

// CSV with "# box:" and "# res:" header lines, then row-major node values,
// one grid row per line, "inf" literal allowed.
void write_grid_csv(const std::string& path, const GridFunction& u);
GridFunction read_grid_csv(const std::string& path);

}  // namespace aniso

#endif
