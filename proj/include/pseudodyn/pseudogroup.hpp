#pragma once

// Generators as partial maps over tagged spaces, word evaluation, orbit
// enumeration and compact generation data.

#include <climits>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pseudodyn/maps.hpp"
#include "pseudodyn/space.hpp"

namespace pdyn {

/// Piecewise-affine action on torus levels. Level n carries a partial map and
/// sends its points to level n + level_shift. For the plain torus only
/// level 0 is used.
struct TorusRule {
    long level_shift = 0;
    std::map<long, PartialMap> levels;
};

/// Cantor generators: Shift is (n, a) -> (n, shift a) on {shift a not in
/// U_{n+2}}; Climb is (n, a) -> (n + 1, a) on {a in U_{n+1}}.
struct CantorRule {
    enum class Move { Shift, Climb } move;
};

struct TranslationRule {
    Rat shift;
};

using MapRule = std::variant<TorusRule, CantorRule, TranslationRule>;

struct Generator {
    std::string id;
    SpaceKind space;
    MapRule rule;
    std::optional<std::string> extension_of;
};

/// Defined image, or nullopt when the point is outside the (inverse) domain
/// or the image would violate the space invariant. Throws SpaceMismatch.
std::optional<SpacePoint> apply_generator(const Generator& g, int exponent, const SpacePoint& p);

/// Float twin for torus spaces. Returns false outside the domain.
struct FloatTorusPoint {
    double x = 0;
    double y = 0;
    long level = 0;
};
bool apply_generator_f(const Generator& g, int exponent, FloatTorusPoint& p);

struct Letter {
    std::size_t gen;  // index into the presentation
    int exponent;     // +1 or -1
    friend bool operator==(const Letter&, const Letter&) = default;
};
using Word = std::vector<Letter>;

Word reduce(const Word& w);
bool is_reduced(const Word& w);
std::string word_string(const Word& w, const std::vector<Generator>& gens);

struct WordResult {
    std::optional<SpacePoint> point;
    std::vector<SpacePoint> trace;     // starts with the input point
    std::optional<std::size_t> failed_step;
};

WordResult apply_word(const std::vector<Generator>& gens, const Word& w, const SpacePoint& p);

enum class OrbitStatus { Complete, TruncatedByNodeBound, TruncatedByLevelBound, TruncatedByDepthBound };
std::string to_string(OrbitStatus s);

struct OrbitBounds {
    std::size_t max_nodes = 100000;
    long max_level = LONG_MAX;  // nodes with |level| above this are not expanded into
    std::size_t max_depth = SIZE_MAX;
};

struct OrbitEdge {
    std::size_t from;
    std::size_t gen;
    int exponent;
    std::size_t to;
};

struct OrbitGraph {
    std::vector<SpacePoint> nodes;  // nodes[0] is the base point
    std::vector<OrbitEdge> edges;
    OrbitStatus status = OrbitStatus::Complete;
};

/// Breadth-first closure under generators and inverses. Order: layer, then
/// generator index, then exponent +1 before -1.
OrbitGraph orbit_bfs(const std::vector<Generator>& gens, const SpacePoint& p, const OrbitBounds& bounds);

/// Re-applies every generator to every node of a Complete graph.
bool orbit_is_closed(const std::vector<Generator>& gens, const OrbitGraph& g);

using PointSet = std::function<bool(const SpacePoint&)>;

class PointOutsideU : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RestrictedOrbit {
    std::vector<SpacePoint> points;          // orbit intersected with U
    std::optional<std::size_t> finite_count;  // set only from Complete runs
    OrbitStatus status;
};

RestrictedOrbit restricted_orbit(const std::vector<Generator>& gens, const PointSet& U, const SpacePoint& p,
                                 const OrbitBounds& bounds);

/// F with extensions F~ (Ftilde[i] extends F[i]); inverses are implicit.
struct CompactGenSystem {
    std::string name;
    std::vector<Generator> F;
    std::vector<Generator> Ftilde;
};

/// Squared halo margin: min over f in F and levels of the margin between
/// dom f and dom f~. Torus generators only.
SqDistance sigma_of_system(const CompactGenSystem& sys);

nlohmann::json orbit_to_json(const OrbitGraph& g, const std::vector<Generator>& gens);
std::string orbit_edges_csv(const OrbitGraph& g, const std::vector<Generator>& gens);

}  // namespace pdyn
