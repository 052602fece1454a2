#pragma once

// Chaos and regularity probes: transitivity coverage, density of periodic
// orbits, bounded sensitivity search, orbit isometry certificates, the halo
// dichotomy and the naive-sensitivity construction.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pseudodyn/pseudogroup.hpp"

namespace pdyn {

inline constexpr int kReportSchemaVersion = 1;

enum class Verdict { Established, EvidenceFor, NoWitnessUpToBound, CounterexampleFound };
std::string to_string(Verdict v);

class SearchFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Result of one probe. `payload()` is deterministic given the inputs;
/// runtime and timestamp live outside it.
struct ProbeReport {
    std::string probe;
    std::string system;
    std::string anchor;  // label of the statement being probed
    nlohmann::json parameters = nlohmann::json::object();
    Verdict verdict = Verdict::NoWitnessUpToBound;
    nlohmann::json metrics = nlohmann::json::object();
    nlohmann::json witnesses = nlohmann::json::array();
    double runtime_seconds = 0.0;

    nlohmann::json payload() const;
    /// payload plus {"runtime_seconds", "timestamp"} under "run".
    nlohmann::json to_json(const std::string& timestamp = {}) const;
    static std::string csv_header();
    std::string csv_row() const;
};

// ---------------------------------------------------------------- transitivity

struct TransitivityOptions {
    std::size_t grid = 32;  // cells per side
    std::size_t max_steps = 100000;
    std::uint64_t seed = 1;
    long level = 0;  // level whose cells are counted
    double threshold = 0.95;
    /// Walkers > 1 runs an ensemble through the batch kernels; only for a
    /// single torus generator whose map is made of twist or affine stages.
    std::size_t walkers = 1;
};

/// Seeded non-backtracking random walk over generator letters. Cells of the
/// grid meeting `target` (sampled on a 5x5 lattice per cell) form the
/// denominator of the coverage fraction.
ProbeReport probe_transitivity(const std::string& system, const std::vector<Generator>& gens,
                               const FloatTorusPoint& start, const Region& target, const TransitivityOptions& opt);

// ---------------------------------------------------------------- DPO

struct DpoSetup {
    std::vector<Generator> gens;
    PointSet U;
    std::string U_description;
    /// Set for the line: U is the open interval (lo, hi) and the generators
    /// are translations, so restricted orbits are enumerated as lattices.
    std::optional<std::pair<Rat, Rat>> line_interval;
    std::vector<SpacePoint> samples;  // cell centres
    /// Candidate witnesses near a sample, best first.
    std::function<std::vector<SpacePoint>(const SpacePoint&)> candidates;
    Rat eps;
    OrbitBounds bounds;
};

/// Established when every sample has a candidate within eps whose restricted
/// orbit is finite by a complete enumeration. Throws PointOutsideU for a
/// sample outside U.
ProbeReport probe_dpo(const std::string& system, const DpoSetup& setup);

struct GlobalFiniteSearch {
    std::size_t samples = 0;
    std::size_t finite_found = 0;
    std::size_t node_bound = 0;
};
/// Counts samples whose unrestricted orbit closes within the node bound.
GlobalFiniteSearch global_finite_orbit_search(const std::vector<Generator>& gens,
                                              const std::vector<SpacePoint>& samples, std::size_t node_bound);

/// Restricted orbit of a line point under translations, U = (lo, hi).
std::vector<Rat> line_restricted_orbit(const std::vector<Generator>& gens, const Rat& t, const Rat& lo,
                                       const Rat& hi);

// ---------------------------------------------------------------- sensitivity

struct SensitivityOptions {
    std::vector<double> radii{1.0 / 64};
    std::size_t depth = 10;
    std::size_t perturbations = 16;  // 8 fixed directions plus seeded random
    std::uint64_t seed = 1;
    double threshold = 0.125;
    std::string metric = "flat torus per level";
    /// Re-evaluate each witness word on exact points.
    bool confirm_exact = true;
};

/// ĉ = min over (sample, radius) of the max separation d(wx, wy) over
/// reduced words w of length <= depth defined at x and y. The search stops
/// after the first layer where every pair reaches the threshold, so ĉ is
/// monotone in depth.
ProbeReport probe_sensitivity(const std::string& system, const std::vector<Generator>& presentation,
                              const std::vector<SpacePoint>& samples, const SensitivityOptions& opt);

// ---------------------------------------------------------------- isometry

struct PieceCheck {
    std::size_t node;
    std::string generator;
    int exponent;
    std::string kind;  // "affine", "level-shift", "sequence-shift", "translation"
    std::vector<int> pieces;
    nlohmann::json linear;  // 2x2 linear part for affine pieces
    bool isometric;
};

struct IsometryCertificate {
    std::vector<SpacePoint> nodes;
    OrbitStatus orbit_status;
    std::vector<PieceCheck> checks;
    Verdict verdict;
    nlohmann::json to_json() const;
};

/// Established iff every generator letter defined at an orbit node acts
/// there by an identity linear part, a level shift or a translation. Cantor
/// sequence shifts are not counted as isometries.
IsometryCertificate certify_orbit_isometry(const std::vector<Generator>& presentation, const SpacePoint& base,
                                           const OrbitBounds& bounds);
ProbeReport isometry_report(const std::string& system, const IsometryCertificate& cert, const std::string& anchor);

// ---------------------------------------------------------------- halo

struct HaloOptions {
    std::size_t depth = 6;
    std::vector<Rat> rho_schedule{Rat(1, 32)};
    std::size_t perturbations = 16;
    std::uint64_t seed = 1;
};

/// Branch (ii) is searched first: y in B(x, rho) and a word of F~ with
/// d(w~x, w~y) >= sigma/2. Otherwise branch (i) by ball transport over
/// words of F and inverses. At most one branch is reported. Torus-level and
/// torus spaces only.
ProbeReport halo_dichotomy_probe(const CompactGenSystem& sys, const SpacePoint& x, const HaloOptions& opt);

// ---------------------------------------------------------------- naive sensitivity

struct NaiveDemoOptions {
    Region W1;
    Region W2;
    Rat c;
    std::size_t depth = 12;
    std::size_t tries = 64;
    std::uint64_t seed = 1;
    long level = 0;  // torus level of x for levelled generators
};

/// Builds h_i = g_i combined with the identity on B(x, r/2), where g_i sends
/// a point y of the annulus B(x, r) minus the closed B(x, r/2) into W_i, and
/// exhibits d(h_i x, h_i y) >= c. Generators with level shift 0 only.
/// Throws SearchFailed when no word within the bounds reaches W_1 and W_2.
ProbeReport naive_sensitivity_demo(const std::string& system, const std::vector<Generator>& gens,
                                   const TorusPoint& x, const Rat& r, const NaiveDemoOptions& opt);

}  // namespace pdyn
