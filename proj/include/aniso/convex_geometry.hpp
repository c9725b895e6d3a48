#ifndef ANISO_CONVEX_GEOMETRY_HPP
#define ANISO_CONVEX_GEOMETRY_HPP

#include <string>
#include <vector>

#include "aniso/util.hpp"

namespace aniso {

// Supporting halfspace <normal, x> <= offset with unit outward normal.
struct Facet {
    Vec normal{};
    double offset = 0.0;
};

// Convex polytope in dimension 2 or 3, stored by its hull vertices plus the
// derived facet list and volume. Values are immutable after construction.
struct ConvexBody {
    int dim = 2;
    std::vector<Vec> vertices;  // hull vertices; CCW order in dim 2
    std::vector<Facet> facets;
    double volume = 0.0;
    bool contains_origin_interior = false;
};

// Builds a body from an arbitrary point cloud: convex hull, facet
// enumeration, volume, origin flag. Throws "invalid-body" for empty input and
// "zero-volume" for flat input.
ConvexBody make_body(int dim, std::vector<Vec> points);

// h_L(dir) = max over vertices of <dir, v>; 1-homogeneous.
double support_function(const ConvexBody& body, const Vec& dir);

// Minkowski functional min{lambda >= 0 : x in lambda L}; needs 0 interior.
double gauge(const ConvexBody& body, const Vec& x);

// Polar body {x : <x,y> <= 1 for all y in L}. Exact facet/vertex duality in
// dim 2; in dim 3 approximated by 1024 sampled support directions + hull.
ConvexBody polar(const ConvexBody& body);

ConvexBody dilate_translate(const ConvexBody& body, double s, const Vec& shift);

// Reported norm-equivalence constants c1 <= H <= c2 on the unit sphere for
// H = support function of the body, plus the dual evaluated through polar().
struct NormPair {
    ConvexBody body;   // H = h_body
    ConvexBody dual;   // H0 = h_dual = gauge of body
    double c1 = 0.0, c2 = 0.0;
};
NormPair make_norm_pair(const ConvexBody& body);

// Cell-centered boolean mask over a uniform box; used for perimeters.
struct CellMask {
    int dim = 2;
    Vec lo{}, hi{};
    std::array<int, 3> res{};  // cells per axis
    std::vector<std::uint8_t> cells;

    double h(int axis) const { return (hi[axis] - lo[axis]) / res[axis]; }
    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= h(a);
        return v;
    }
    std::size_t cell_count() const {
        std::size_t n = 1;
        for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(res[a]);
        return n;
    }
    Vec cell_center(const std::array<int, 3>& idx) const;
    double volume() const;
};

// Marks cells whose center lies in the body.
CellMask rasterize(const ConvexBody& body, int dim, const Vec& lo, const Vec& hi,
                   const std::array<int, 3>& res);

enum class PerimeterMode { CellInterface, Smooth };

// Grid approximation of the weighted perimeter of the marked set: integral of
// h_L(outer normal) over the boundary. CellInterface sums exposed axis faces
// (exact for axis-aligned boxes); Smooth mollifies the indicator and sums
// h_L(-grad) which avoids the staircase overestimate on tilted boundaries.
double anisotropic_perimeter(const CellMask& mask, const ConvexBody& weight,
                             PerimeterMode mode = PerimeterMode::Smooth,
                             double mollify_radius_cells = 4.0);

// Catalog: "square", "disc[:n]", "cross", "hexagon", "simplex",
// "polygon:<csv path>".
ConvexBody parse_body(const std::string& spec);

}  // namespace aniso

#endif
