#pragma once

// Standard probe inputs for the named systems, shared by the command line
// front end and the acceptance suite.

#include <cstdint>
#include <string>
#include <vector>

#include "pseudodyn/diagnostics.hpp"
#include "pseudodyn/systems.hpp"

namespace pdyn {

class UnknownSystem : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Open box of half-width `half` around (cx, cy).
Region box_around(const Rat& cx, const Rat& cy, const Rat& half);

/// T_n on M_n as a single torus generator; the map family B walks on at level n.
Generator family_b_level_twist(const FamilyB& b, long n);

/// `count` seeded points (k/den, l/den) on the torus.
std::vector<TorusPoint> random_grid_points(std::size_t count, long den, std::uint64_t seed);

/// U = (lo, hi), samples at the midpoints of `count` equal cells.
DpoSetup line_dpo_setup(const Rat& lo, const Rat& hi, std::size_t count);

/// Cell centres of a (2 den) x (2 den) grid; candidates are the four nearest
/// points with denominator `den`, eps = 1/den.
DpoSetup cat_map_dpo_setup(long den);

/// Level-0 samples: `count` cylinders over the smallest window [-k, k] with
/// at least that many words, padded with zeros. Candidates are purely
/// periodic sequences agreeing on the window with an extra 1 in the period;
/// eps = 2^-k.
DpoSetup cantor_dpo_setup(std::size_t count);

}  // namespace pdyn
