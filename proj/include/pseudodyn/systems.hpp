#pragma once

// Builders for the concrete systems: generic toral linked twists, the
// two-sided family on T^2 x Z, the affine family on T^2 x {0..n_max} with its
// periodic grids and radii, the cat map, the Cantor pseudogroup and the
// translation of the line.

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pseudodyn/pseudogroup.hpp"

namespace pdyn {

class OverlappingIntervals : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class RadiusSearchExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- linked twists

struct TwistInterval {
    Arc arc;
    long multiple;
};

struct LinkedTwistSpec {
    std::vector<TwistInterval> h_intervals;
    std::vector<TwistInterval> v_intervals;
};

struct LinkedTwistSystem {
    PwMap T_h;
    PwMap T_v;
    PwMap T;  // T_v after T_h
    Region M;
    Region Delta;
};

/// Band twist t -> t + m (v - a) / |A| across each interval A = [a, b].
/// Delta needs integer slopes on the horizontal bands whenever vertical
/// bands exist; otherwise UnsupportedRegion.
LinkedTwistSystem build_linked_twist(const LinkedTwistSpec& spec);

/// Parses "[lo,hi]:m" with optional open brackets, e.g. "(1/8,7/8]:2".
TwistInterval parse_twist_interval(std::string_view text);

// ---------------------------------------------------------------- family A

struct FamilyA {
    long max_level = 0;
    std::vector<PwMap> T;     // T[m], m = 0..max_level
    std::vector<Region> M;    // M[m]
    Generator sigma;          // ((x,y),z) -> (T_|z|(x,y), z)
    Generator tau;            // ((x,y),z) -> ((x,y),z+1)
    CompactGenSystem S;       // F = {sigma~, tau|U, tau|O}
    std::vector<Generator> group() const { return {sigma, tau}; }
};

/// p_z: 1 - 2^(-1-z) for z >= 1, 2^(z-2) for z <= 0.
Rat family_a_p(long z);
FamilyA build_family_A(long max_level);

// ---------------------------------------------------------------- family B

struct FamilyBOptions {
    /// Negative control: the top-level left band becomes the wrapping arc
    /// [1 - l, r], which contains x = 0.
    bool mutate_top_band = false;
    long radius_cap = 256;
};

struct FamilyB {
    long n_max = 0;
    PwMap T_h;
    std::vector<PwMap> T_v;    // index m = 0..n_max
    std::vector<PwMap> T;      // T[m] = T_v[m] after T_h
    std::vector<Region> M;     // M[n]
    std::vector<Region> Delta; // Delta[n]
    std::vector<std::vector<TorusPoint>> Q;       // Q[0] is empty
    std::vector<std::vector<TorusPoint>> Qtilde;  // Qtilde[0] is empty
    std::vector<long> radius_exponent;            // k_n with r_n^2 = 4^-k_n sqrt 2
    std::vector<Quad> r_sq;
    std::vector<Region> U;  // closed balls around Qtilde[n]
    std::vector<Region> V;  // union of U[0..n]
    Generator f;
    Generator g;
    std::vector<std::string> notes;
    std::vector<Generator> gens() const { return {f, g}; }
};

Rat family_b_l_minus(long n);
Rat family_b_r_minus(long n);
Rat family_b_l_plus(long n);
Rat family_b_r_plus(long n);

FamilyB build_family_B(long n_max, const FamilyBOptions& opts = {});

/// Lines containing Delta[n]: horizontal y = c, vertical x = c, and slanted
/// x + 6y = c (mod 1).
struct DeltaLines {
    std::vector<Rat> horizontal;
    std::vector<Rat> vertical;
    std::vector<Rat> slanted;
};
DeltaLines family_b_delta_lines(long n);

/// Exact lower bound for the squared distance from p to Delta[n].
Rat family_b_delta_sq_dist(const DeltaLines& lines, const TorusPoint& p);

/// Smallest exponents k_1 < k_2 < ... making the radius conditions hold.
/// Fills radius_exponent and r_sq of `data` (Q, Qtilde, M must be built).
void choose_radii(FamilyB& data, long cap);

struct RadiusCheck {
    bool ok = true;
    std::string failure;
};
/// Independent re-check of the three radius conditions by direct
/// enumeration over all pairs.
RadiusCheck verify_radii(const FamilyB& data);

// ---------------------------------------------------------------- small systems

Generator build_cat_map();
/// f restricted to (1/4,3/4)^2 with extension f on (1/8,7/8)^2.
CompactGenSystem build_boxed_cat_map();
std::vector<Generator> build_cantor();  // {f (shift), g (climb)}
Generator build_line();                 // t -> t + 1
Generator build_identity();             // identity on the torus

// ---------------------------------------------------------------- exports

nlohmann::json manifest_family_b(const FamilyB& b);
nlohmann::json manifest_family_a(const FamilyA& a);
nlohmann::json manifest_generators(const std::string& name, const std::vector<Generator>& gens);
nlohmann::json manifest_linked_twist(const LinkedTwistSpec& spec, const LinkedTwistSystem& sys);
/// CSV "n,set,x,y" of Q[n] and Qtilde[n] with exact coordinates.
std::string family_b_q_csv(const FamilyB& b);

}  // namespace pdyn
