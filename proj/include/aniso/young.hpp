#ifndef ANISO_YOUNG_HPP
#define ANISO_YOUNG_HPP

#include <optional>
#include <string>
#include <vector>

#include "aniso/convex_geometry.hpp"
#include "aniso/grid.hpp"
#include "aniso/profile.hpp"
#include "aniso/util.hpp"

namespace aniso {

// One-dimensional Young function: convex, left-continuous, A(0)=0,
// non-constant on (0, inf). Catalog kinds plus a tabulated fallback.
struct Young1D {
    enum class Kind { Power, PowerLog, Exp, Indicator, Tabulated };
    Kind kind = Kind::Power;
    double coef = 1.0;   // Power: coef * t^p
    double p = 2.0;      // Power / PowerLog exponent
    double q = 0.0;      // PowerLog log exponent
    double c = 2.0;      // PowerLog additive constant
    double alpha = 1.0;  // Exp exponent
    double bound = 1.0;  // Indicator: 0 on [0,bound], inf beyond
    Profile table;       // Tabulated: nondecreasing
};

double eval1(const Young1D& A, double t);
// Conjugate sup_{s>=0}(st - A(s)); closed form for Power and Indicator,
// dense tabulation otherwise.
Young1D conjugate1(const Young1D& A);
// Generalized right-continuous inverse sup{t : A(t) <= s}.
double inverse_right1(const Young1D& A, double s);
// "power:p[:coef]", "powerlog:p,q,c", "exp:alpha", "indicator:b"
Young1D parse_young1(const std::string& spec);

// n-dimensional Young function over the extended reals. Catalog entries are
// closed forms; Sampled carries node values (+inf allowed) on a box grid;
// Symmetral is the rearranged form whose sub-level sets are dilates of -K,
// evaluated through the quantile table of the source samples.
struct YoungND {
    enum class Kind { Matrix, RadialEuclid, RadialBody, IndicatorBody, Sampled, Symmetral };
    int dim = 2;
    Kind kind = Kind::Matrix;
    std::string spec;

    // Matrix: sum_k A_k(|<row_k, xi>|), rows with nonzero determinant
    std::vector<Young1D> terms;
    std::vector<Vec> rows;

    Young1D A;        // RadialEuclid: A(|xi|); RadialBody: A(h_body(xi))
    ConvexBody body;  // RadialBody / IndicatorBody support body

    Grid grid;  // Sampled
    std::vector<double> values;

    // Symmetral: the increasing rearrangement of the source samples as a
    // volume -> value table. Tied sample values are collapsed into classes
    // anchored at their midpoint volume, which centers the half-cell-layer
    // bias of raw node counts. kappa = |K|; dom_volume = total finite volume.
    double kappa = 0.0, src_cellvol = 0.0, dom_volume = 0.0;
    std::vector<double> quantiles;      // ascending class values
    std::vector<double> quantile_vols;  // matching class midpoint volumes
    ConvexBody sym_body;
};

// |{phi <= s}| for the Symmetral kind, by the same midpoint-calibrated table
// that eval() uses.
double symmetral_level_volume(const YoungND& sym, double s);

double eval(const YoungND& phi, const Vec& xi);
bool is_sampled(const YoungND& phi);

// Default half-width of the sampling box for a catalog entry (steep entries
// get a tighter box so the dual grid stays resolvable).
double preferred_halfwidth(const YoungND& phi);
Grid preferred_grid(const YoungND& phi, int res);

YoungND sample(const YoungND& phi, const Grid& g);

// Dual grid sized from the finite-difference slopes of the samples over the
// inner half of the box (the sup in the conjugate lands there for the
// arguments we care about), clamped to [4, 1e5] per axis.
Grid auto_conjugate_grid(const YoungND& sampled);

// Brute-force Legendre-Fenchel transform: for every output node the sup of
// <xi,eta> - phi(eta) over all input nodes, +inf inputs skipped.
YoungND conjugate_oracle(const YoungND& sampled, const Grid& out);

// Factored transform: one linear-time 1-d pass per axis after convex-hull
// extraction of the slice epigraph. Agrees with the oracle at every node.
YoungND conjugate_fast(const YoungND& sampled, const Grid& out);

// max |(phi_conj)_conj - phi| over finite nodes in the inner half of the box.
double involution_check(const YoungND& phi, int res);

struct SublevelSet {
    std::vector<std::uint8_t> mask;  // node mask on the sample grid
    double volume = 0.0;
    bool truncated = false;  // level exceeded every sampled value
};
SublevelSet sublevel_set(const YoungND& sampled, double s);

// Node order sorted ascending by sampled value (ties by node index); the
// shared backbone for level-set sweeps, quantiles and level volumes.
struct SortedSamples {
    std::vector<std::uint32_t> order;
    std::vector<double> sorted;  // finite values only
    double cellvol = 0.0;
};
SortedSamples sort_samples(const YoungND& sampled);
double sublevel_volume(const SortedSamples& ss, double s);

// {0} + geometric levels from floor_frac*smax to smax.
std::vector<double> geometric_levels(double smax, int n = 200, double floor_frac = 1e-4);

// Conjugate through sup_s (h_{{phi<=s}}(xi) - s) on a level grid.
std::vector<double> conjugate_via_levelsets(const YoungND& sampled, const std::vector<Vec>& dirs,
                                            const std::vector<double>& levels);

// Support function of {phi <= s} in a fixed direction, tabulated on levels
// via one prefix sweep of the sorted samples.
std::vector<double> sublevel_support(const YoungND& sampled, const Vec& dir,
                                     const std::vector<double>& levels);

struct RadialFactorization {
    YoungND phi;   // A(h_L(.))
    YoungND conj;  // A_conj(gauge_L(.)) realized as A_conj(h_{L polar}(.))
};
RadialFactorization radial_factorization(const Young1D& A, const ConvexBody& L);

struct GrowthLimits {
    std::vector<double> small_r, small_ratio;  // max_dirs conj(xi)/|xi| on shrinking shells
    std::vector<double> large_r, large_ratio;  //   ... on growing shells
    bool small_decreasing = false;
    bool large_increasing = false;
};
GrowthLimits growth_limits(const YoungND& phi, int res = 256, int ndirs = 64, int nshells = 6);

// h_{{phi<=s}}(xi) for homothetic-level functions in closed form, any kind
// through the sampled sweep otherwise.
double level_support(const YoungND& phi, double s, const Vec& xi);

struct MaximizerResult {
    double s = 0.0;      // smallest maximizer on the level grid
    double value = 0.0;  // max of h_{{phi<=s}}(xi) - s
    int index = 0;
    bool at_zero = false;  // maximum attained at s = 0
};
// Ternary search over the concave tabulation s -> h_{{phi<=s}}(xi) - s.
// Throws "level-grid-too-short" when the profile is still increasing at the
// last tabulated level.
MaximizerResult maximizer_profile(const YoungND& phiK, const Vec& xi,
                                  const std::vector<double>& levels);

struct YoungCheck {
    double origin_value = 0.0;
    double convexity_defect = 0.0;  // worst midpoint violation over random triples
    double boundary_min = 0.0;      // min finite value on the box rim
    bool finite_near_zero = false;
    bool ok = false;
};
YoungCheck validate_young(const YoungND& phi, Rng& rng, int ntriples = 1000, int res = 128);

// Lower convex envelope via the double conjugate; returns the convexified
// samples and the largest downward correction that was needed.
std::pair<YoungND, double> convexify(const YoungND& sampled);

// Catalog grammar: "quad", "pnorm:p1,p2[,p3]", "powerlog:p,q,c", "exp:alpha",
// "radial:<A>:<body>", "matrix:<A|A>:<a,b;c,d>", "indicator:<body>",
// "trud:p,q,alpha,c", "trud1:p,beta", "csv:<path>".
YoungND parse_young(const std::string& spec);

}  // namespace aniso

#endif
