#ifndef ANISO_REARRANGEMENT_HPP
#define ANISO_REARRANGEMENT_HPP

#include "aniso/convex_geometry.hpp"
#include "aniso/grid.hpp"
#include "aniso/profile.hpp"
#include "aniso/young.hpp"

namespace aniso {

// Distribution function mu(t) = |{u > t}| tabulated on `levels` uniform
// levels between essinf and max; nonincreasing, right-continuous.
Profile distribution(const GridFunction& u, int levels = 512);

// Generalized right-continuous inverse u*(s) = inf{t : mu(t) <= s}.
Profile decreasing_rearrangement(const Profile& mu);

// Symmetral of u with respect to K: equimeasurable with u, super-level sets
// homothetic to K. Realized as the exact discrete rearrangement that assigns
// the k-th largest node value to the node with the k-th smallest K-gauge, so
// node counts of {u^K > t} and {u > t} agree for every t and a second pass
// reproduces the field bit for bit.
GridFunction symmetral(const GridFunction& u, const ConvexBody& K);

// Symmetral plus its gradient through the chain rule
//   grad u^K = (u*)'(kappa gauge^n) kappa n gauge^{n-1} grad gauge,
// with grad gauge taken from the active facet normal. This avoids both the
// ridge smear of central differences and the value-class slope noise.
struct SymmetralField {
    GridFunction field;
    VectorField grad;
};
SymmetralField symmetral_with_gradient(const GridFunction& u, const ConvexBody& K);

// Symmetrization of an integrand: sub-level sets become dilates of -K with
// matched volume. Returns the closed-form Symmetral kind, evaluated through
// Phi_*(kappa * gauge_K(-xi)^n) where Phi_* is the increasing rearrangement
// of the samples.
YoungND integrand_symmetral(const YoungND& phi, const ConvexBody& K, int res = 256);

struct TripleSymmetral {
    YoungND conj;         // sampled conjugate on the dual grid
    YoungND sym;          // its K-symmetral (Symmetral kind, closed form)
    YoungND sym_sampled;  // the same, sampled on the dual grid
    YoungND triple;       // conjugate of the symmetral, back on the primal box
    YoungCheck check;     // Young-function validation of the result
};

struct TripleConfig {
    int res = 256;
    double halfwidth = 0.0;  // 0 = catalog preferred box
    std::uint64_t seed = 20240705;
};

TripleSymmetral triple_symmetral(const YoungND& phi, const ConvexBody& K,
                                 const TripleConfig& cfg = {});

}  // namespace aniso

#endif
