#ifndef ANISO_CALCULUS_HPP
#define ANISO_CALCULUS_HPP

#include "aniso/convex_geometry.hpp"
#include "aniso/grid.hpp"
#include "aniso/rearrangement.hpp"
#include "aniso/young.hpp"

namespace aniso {

// Cell-volume-weighted sum of phi(grad u) over the nodes; +inf as soon as a
// node gradient leaves the effective domain. For sampled integrands a
// gradient outside the sampling box raises "range-overflow".
double dirichlet_functional(const GridFunction& u, const YoungND& phi,
                            const VectorField* grad = nullptr);

// Default coarea band width: wide enough to contain at least one cell ring.
double default_band_width(const GridFunction& u, const VectorField& grad);

struct MuChain {
    std::vector<double> t;
    std::vector<double> int_u;         // band estimate of the level integral of 1/|grad u|
    std::vector<double> int_uK;        // same for the symmetral
    std::vector<double> neg_mu_prime;  // differenced distribution function
    GridFunction uK;
};

// Tabulates the per-level triple (integral over {u=t} of 1/|grad u|, the same
// over {u^K=t}, and -mu'(t)) on the given levels. -mu' comes from centered
// differences of the 512-level distribution profile with a +-8-level window
// (single-level differences only resolve whole grid cells) and is clamped
// nonnegative.
MuChain mu_prime_chain(const GridFunction& u, const ConvexBody& K,
                       const std::vector<double>& tgrid, double dt = 0.0);

}  // namespace aniso

#endif
