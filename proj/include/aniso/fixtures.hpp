#ifndef ANISO_FIXTURES_HPP
#define ANISO_FIXTURES_HPP

#include <string>
#include <vector>

#include "aniso/convex_geometry.hpp"
#include "aniso/grid.hpp"
#include "aniso/young.hpp"

namespace aniso {

// Trial-function catalog:
//   "tent:<body>"   max(0, 1 - gauge_body(x))
//   "twobump"       two disjoint smooth bumps (not quasi-convex)
//   "bumps:<k>"     k random smooth bumps, seeded, gradients scaled to <= 1
//   "csv:<path>"    grid CSV
GridFunction make_trial(const std::string& spec, const Grid& g, std::uint64_t seed = 0);

// The eight catalog integrands exercised by the acceptance suite.
std::vector<std::string> catalog_phi_specs();

Grid default_trial_grid(int res);  // [-1.5, 1.5]^2

}  // namespace aniso

#endif
