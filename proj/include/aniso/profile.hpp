#ifndef ANISO_PROFILE_HPP
#define ANISO_PROFILE_HPP

#include <string>
#include <vector>

#include "aniso/util.hpp"

namespace aniso {

// Monotone tabulated map on [0, inf). Between breakpoints the profile is
// linear; a duplicated abscissa encodes a jump, and dup_take_last selects
// which side the evaluation at the jump point returns (this is where the
// right/left continuity convention lives).
struct Profile {
    std::vector<double> x;  // nondecreasing abscissae
    std::vector<double> y;
    bool nonincreasing = true;
    bool dup_take_last = true;
};

double eval(const Profile& p, double t);
bool is_monotone(const Profile& p);

// Generalized inverse. Linear pieces invert to linear pieces, plateaus to
// jumps, jumps to plateaus. For a nonincreasing p:
//   sup_flavor=false: inf{t : p(t) <= s}   (decreasing-rearrangement flavor)
//   sup_flavor=true:  sup{t : p(t) >= s}
// For a nondecreasing p:
//   sup_flavor=false: inf{t : p(t) >= s}   (left-continuous inverse)
//   sup_flavor=true:  sup{t : p(t) <= s}   (right-continuous inverse)
Profile generalized_inverse(const Profile& p, bool sup_flavor = false);

// Two-column CSV with a convention header line.
void write_profile_csv(const std::string& path, const Profile& p);
Profile read_profile_csv(const std::string& path);

}  // namespace aniso

#endif
