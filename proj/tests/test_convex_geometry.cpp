#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "aniso/convex_geometry.hpp"

using namespace aniso;

namespace {

// Independent polar oracle: intersect the halfspaces {x . v <= 1} over a dense
// set of boundary points v of L, by brute-force pairwise line intersection
// plus feasibility filtering.
std::vector<Vec> polar_oracle_2d(const ConvexBody& L, int boundary_samples = 720) {
    std::vector<Vec> normals;
    for (int k = 0; k < boundary_samples; ++k) {
        double th = 2 * M_PI * (k + 0.25) / boundary_samples;
        Vec d = vec2(std::cos(th), std::sin(th));
        normals.push_back(scale(1.0 / gauge(L, d), d));  // boundary point of L
    }
    std::vector<Vec> pts;
    const int n = static_cast<int>(normals.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Vec &a = normals[i], &b = normals[j];
            double det = a[0] * b[1] - a[1] * b[0];
            if (std::fabs(det) < 1e-12) continue;
            Vec x = vec2((b[1] - a[1]) / det, (a[0] - b[0]) / det);
            bool feasible = true;
            for (const Vec& v : normals)
                if (dot(v, x, 2) > 1 + 1e-9) {
                    feasible = false;
                    break;
                }
            if (feasible) pts.push_back(x);
        }
    return pts;
}

double max_vertex_distance(const ConvexBody& a, const ConvexBody& b) {
    double worst = 0.0;
    for (const Vec& v : a.vertices) {
        double best = kInf;
        for (const Vec& w : b.vertices) best = std::min(best, norm2(sub(v, w), 2));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

TEST_CASE("support function of the square") {
    ConvexBody sq = parse_body("square");
    CHECK(support_function(sq, vec2(1, 0)) == doctest::Approx(1.0));
    CHECK(support_function(sq, vec2(1, 1)) == doctest::Approx(2.0));
    CHECK(support_function(sq, vec2(0, 0)) == doctest::Approx(0.0));
    // homogeneity is exact for t >= 0
    for (double t : {0.0, 0.5, 2.0, 7.5}) {
        CHECK(support_function(sq, vec2(t * 0.3, t * -1.2)) ==
              t * support_function(sq, vec2(0.3, -1.2)));
    }
}

TEST_CASE("support function rejects an empty body") {
    ConvexBody empty;
    CHECK_THROWS_AS(support_function(empty, vec2(1, 0)), Error);
    CHECK_THROWS_AS(make_body(2, {}), Error);
}

TEST_CASE("gauge of square and cross-polytope") {
    ConvexBody sq = parse_body("square");
    CHECK(gauge(sq, vec2(0.5, 0.25)) == doctest::Approx(0.5));
    CHECK(gauge(sq, vec2(0, 0)) == doctest::Approx(0.0));
    ConvexBody cross = parse_body("cross");
    CHECK(gauge(cross, vec2(0.3, 0.3)) == doctest::Approx(0.6));
}

TEST_CASE("gauge needs the origin strictly inside") {
    ConvexBody shifted = make_body(2, {vec2(1, 1), vec2(3, 1), vec2(3, 3), vec2(1, 3)});
    CHECK_THROWS_AS(gauge(shifted, vec2(1, 1)), Error);
    CHECK_THROWS_AS(polar(shifted), Error);
}

TEST_CASE("polar duality square <-> cross") {
    ConvexBody sq = parse_body("square");
    ConvexBody cross = parse_body("cross");
    ConvexBody sq_polar = polar(sq);
    CHECK(sq_polar.vertices.size() == 4);
    CHECK(max_vertex_distance(sq_polar, cross) < 1e-12);
    ConvexBody cross_polar = polar(cross);
    CHECK(max_vertex_distance(cross_polar, sq) < 1e-12);
}

TEST_CASE("hexagon polar against the halfspace-intersection oracle") {
    ConvexBody hex = parse_body("hexagon");
    ConvexBody hp = polar(hex);
    CHECK(hp.vertices.size() == 6);
    std::vector<Vec> oracle = polar_oracle_2d(hex);
    // every edge-duality vertex must appear among the oracle intersections
    for (const Vec& v : hp.vertices) {
        double best = kInf;
        for (const Vec& w : oracle) best = std::min(best, norm2(sub(v, w), 2));
        CHECK(best < 2e-4);  // oracle halfspaces are 0.5 degrees apart
    }
    // the polar of the unit-inradius hexagon is the rotated hexagon with unit
    // circumradius; frozen from the oracle run
    double rmax = 0.0, rmin = kInf;
    for (const Vec& v : hp.vertices) {
        rmax = std::max(rmax, norm2(v, 2));
        rmin = std::min(rmin, norm2(v, 2));
    }
    CHECK(rmax == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rmin == doctest::Approx(1.0).epsilon(1e-9));
    // vertices sit at 30 + 60k degrees
    double ang = std::atan2(hp.vertices[0][1], hp.vertices[0][0]) * 180 / M_PI;
    double frac = std::fmod(std::fabs(ang) + 30.0, 60.0);
    CHECK(std::min(frac, 60.0 - frac) < 1e-6);
}

TEST_CASE("bipolar involution on the catalog") {
    for (const char* name : {"square", "cross", "hexagon", "simplex", "disc:32"}) {
        ConvexBody L = parse_body(name);
        ConvexBody LL = polar(polar(L));
        CHECK(max_vertex_distance(LL, L) < 1e-9);
        CHECK(max_vertex_distance(L, LL) < 1e-9);
    }
}

TEST_CASE("gauge agrees with the support function of the polar") {
    Rng rng(7);
    for (const char* name : {"square", "hexagon", "simplex", "disc:64"}) {
        ConvexBody L = parse_body(name);
        ConvexBody Lp = polar(L);
        for (int k = 0; k < 64; ++k) {
            Vec xi = vec2(uniform(rng, -2, 2), uniform(rng, -2, 2));
            CHECK(std::fabs(gauge(L, xi) - support_function(Lp, xi)) <= 1e-9);
        }
    }
}

TEST_CASE("dual-of-dual returns the original norm on sampled directions") {
    for (const char* name : {"square", "hexagon", "simplex"}) {
        ConvexBody L = parse_body(name);
        NormPair np = make_norm_pair(L);
        CHECK(np.c1 > 0);
        CHECK(np.c2 >= np.c1);
        ConvexBody Ldd = polar(np.dual);
        for (int k = 0; k < 128; ++k) {
            double th = 2 * M_PI * k / 128;
            Vec d = vec2(std::cos(th), std::sin(th));
            CHECK(std::fabs(support_function(Ldd, d) - support_function(L, d)) < 1e-6);
        }
    }
}

TEST_CASE("volumes") {
    CHECK(parse_body("square").volume == doctest::Approx(4.0));
    CHECK(parse_body("cross").volume == doctest::Approx(2.0));
    ConvexBody tri = make_body(2, {vec2(0, 0), vec2(1, 0), vec2(0, 1)});
    CHECK(tri.volume == doctest::Approx(0.5));
    CHECK_THROWS_AS(make_body(2, {vec2(0, 0), vec2(1, 1), vec2(2, 2)}), Error);
}

TEST_CASE("volume and polar in dimension 3") {
    std::vector<Vec> cube;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1}) cube.push_back(vec3(sx, sy, sz));
    ConvexBody c = make_body(3, cube);
    CHECK(c.volume == doctest::Approx(8.0));
    CHECK(gauge(c, vec3(0.5, 0.2, -0.1)) == doctest::Approx(0.5));
    ConvexBody oct = polar(c);  // sampled approximation of the cross-polytope
    CHECK(oct.volume == doctest::Approx(8.0 / 6.0).epsilon(0.015));
    // vertices of the polar are only resolved to the direction-sample spacing
    CHECK(support_function(oct, vec3(1, 0, 0)) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(support_function(oct, vec3(1, 1, 1)) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("dilate and translate") {
    ConvexBody sq = parse_body("square");
    CHECK(dilate_translate(sq, 2.0, vec2(0, 0)).volume == doctest::Approx(16.0));
    CHECK(dilate_translate(sq, -1.0, vec2(0, 0)).volume == doctest::Approx(4.0));
    ConvexBody tri = make_body(2, {vec2(0, 0), vec2(1, 0), vec2(0, 1)});
    ConvexBody moved = dilate_translate(tri, 1.0, vec2(3, 3));
    CHECK(moved.volume == doctest::Approx(0.5));
    CHECK_THROWS_AS(dilate_translate(sq, 0.0, vec2(0, 0)), Error);
    // reflection of an asymmetric body really reflects
    ConvexBody simplex = parse_body("simplex");
    ConvexBody reflected = dilate_translate(simplex, -1.0, vec2(0, 0));
    CHECK(std::fabs(support_function(reflected, vec2(0, 1)) -
                    support_function(simplex, vec2(0, -1))) < 1e-12);
}

TEST_CASE("cell-interface perimeter of the aligned square is exact") {
    ConvexBody sq = parse_body("square");
    CellMask m = rasterize(sq, 2, vec2(-2, -2), vec2(2, 2), {256, 256, 0});
    double per = anisotropic_perimeter(m, sq, PerimeterMode::CellInterface);
    CHECK(per == 8.0);  // n |E|^{1/2} |L|^{1/2} = 2*2*2, equality case
    CHECK(m.volume() == doctest::Approx(4.0));
}

TEST_CASE("smooth perimeter of the disc") {
    ConvexBody disc = parse_body("disc");
    CellMask m = rasterize(disc, 2, vec2(-2, -2), vec2(2, 2), {256, 256, 0});
    double per = anisotropic_perimeter(m, disc, PerimeterMode::Smooth);
    CHECK(per == doctest::Approx(2 * M_PI).epsilon(0.02));
}

TEST_CASE("perimeter of a 1x4 rectangle against the isoperimetric bound") {
    ConvexBody rect = make_body(2, {vec2(-2, -0.5), vec2(2, -0.5), vec2(2, 0.5), vec2(-2, 0.5)});
    ConvexBody sq = parse_body("square");
    CellMask m = rasterize(rect, 2, vec2(-3, -3), vec2(3, 3), {384, 384, 0});
    double per = anisotropic_perimeter(m, sq, PerimeterMode::CellInterface);
    CHECK(per == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(per >= 2 * std::sqrt(rect.volume) * std::sqrt(sq.volume));
}

TEST_CASE("empty set has zero perimeter") {
    CellMask m;
    m.dim = 2;
    m.lo = vec2(-1, -1);
    m.hi = vec2(1, 1);
    m.res = {32, 32, 0};
    m.cells.assign(m.cell_count(), 0);
    CHECK(anisotropic_perimeter(m, parse_body("square")) == 0.0);
}

TEST_CASE("isoperimetric lower bound for grid sets") {
    // every simply connected grid set E and catalog L satisfy
    // P_L(E) >= n |E|^{(n-1)/n} |L|^{1/n} (1 - 3h/diam E)
    for (const char* Ename : {"disc:48", "hexagon", "square", "simplex"}) {
        ConvexBody E = parse_body(Ename);
        CellMask m = rasterize(E, 2, vec2(-2, -2), vec2(2, 2), {192, 192, 0});
        double h = m.h(0);
        double diam = 2.0;
        for (const char* Lname : {"square", "cross", "hexagon", "disc:96"}) {
            ConvexBody L = parse_body(Lname);
            for (PerimeterMode mode : {PerimeterMode::CellInterface, PerimeterMode::Smooth}) {
                double per = anisotropic_perimeter(m, L, mode);
                double bound = 2 * std::sqrt(m.volume() * L.volume) * (1 - 3 * h / diam);
                CHECK(per >= bound);
            }
        }
    }
}

TEST_CASE("body catalog parses and validates") {
    CHECK_THROWS_AS(parse_body("disc:2"), Error);
    CHECK_THROWS_AS(parse_body("blob"), Error);
    ConvexBody hex = parse_body("hexagon");
    CHECK(hex.vertices.size() == 6);
    for (const Facet& f : hex.facets) CHECK(f.offset == doctest::Approx(1.0));  // unit inradius
    ConvexBody sim = parse_body("simplex");
    CHECK(sim.contains_origin_interior);
}
