#pragma once

// Exact region algebra on one torus level.
//
// A Region is an immutable boolean tree over primitive sets: bands (annuli),
// boxes, metric balls and linear strips {frac(a*x + b*y + c) in arc}. Strips
// arise as affine preimages of bands; they support membership only.

#include <memory>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pseudodyn/affine.hpp"
#include "pseudodyn/exact.hpp"

namespace pdyn {

class UnsupportedRegion : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Circular interval on R/Z.
///
/// Non-wrapping: 0 <= lo < hi <= 1, the set {lo <= v <= hi} with endpoint
/// flags; hi == 1 closed also covers v == 0. Wrapping: 0 <= hi < lo < 1, the
/// set [lo,1) u [0,hi]. A closed arc with lo == hi is a single point.
struct Arc {
    Rat lo;
    Rat hi;
    bool lo_closed = true;
    bool hi_closed = true;
    bool wraps = false;

    static Arc closed(Rat lo, Rat hi);
    static Arc open(Rat lo, Rat hi);
    static Arc point(const Rat& v);
    static Arc make(Rat lo, Rat hi, bool lo_closed, bool hi_closed);

    bool contains(const ModOne& v) const;
    bool contains_f(double v) const;
    /// Arc translated by delta on the circle.
    Arc shifted(const Rat& delta) const;
    /// Length on the circle.
    Rat length() const { return wraps ? hi + Rat(1) - lo : hi - lo; }

    friend bool operator==(const Arc&, const Arc&) = default;
};

enum class Axis { Horizontal, Vertical };

/// Squared distance bound returned by the boundary-distance queries.
///
/// `exact` is set when the value is known exactly in Q(sqrt 2). Otherwise
/// `approx` carries a floating value; when `lower_bound` is set the true
/// distance may be larger than what is reported.
struct SqDistance {
    bool infinite = false;
    std::optional<Quad> exact;
    double approx = 0.0;
    bool lower_bound = false;

    static SqDistance inf() { return {true, std::nullopt, HUGE_VAL, false}; }
    static SqDistance of(const Quad& q) { return {false, q, q.to_double(), false}; }
    static SqDistance floating(double v, bool lb = false) { return {false, std::nullopt, v, lb}; }

    /// True only when the true squared distance is certainly > r_sq.
    bool exceeds(const Quad& r_sq) const;
    /// False only when the true squared distance is certainly >= r_sq.
    bool possibly_below(const Quad& r_sq) const;
    double value() const { return approx; }
};

class Region {
public:
    struct Empty {};
    struct Full {};
    struct Band { Axis axis; Arc arc; };
    struct Box { Arc x; Arc y; };
    struct Strip { Rat a; Rat b; Rat c; Arc arc; };
    struct Ball { TorusPoint center; Quad r_sq; bool closed; };
    struct Union { std::vector<Region> members; };
    struct Intersection { std::vector<Region> members; };
    struct Complement { std::vector<Region> child; };  // exactly one element
    using Node = std::variant<Empty, Full, Band, Box, Strip, Ball, Union, Intersection, Complement>;

    Region();  // empty

    static Region empty();
    static Region full();
    static Region band(Axis axis, Arc arc);
    static Region box(Arc x, Arc y);
    static Region strip(Rat a, Rat b, Rat c, Arc arc);
    static Region ball(TorusPoint center, Quad r_sq, bool closed);
    static Region unite(std::vector<Region> members);
    static Region intersect(std::vector<Region> members);
    static Region complement(const Region& r);

    const Node& node() const { return *node_; }
    bool is_empty() const { return std::holds_alternative<Empty>(*node_); }
    bool is_full() const { return std::holds_alternative<Full>(*node_); }

    bool contains(const TorusPoint& p) const;
    bool contains_f(double x, double y) const;

    /// Affine preimage {p : f(p) in *this}. Balls only under translations;
    /// strips only with integer coefficients before and after.
    Region preimage(const Affine2& f) const;

    /// Distance (not squared) from (x,y) to the nearest boundary of any
    /// primitive in the tree. Float and exact membership agree when this is
    /// comfortably positive.
    double boundary_clearance_f(double x, double y) const;

private:
    explicit Region(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}
    std::shared_ptr<const Node> node_;
};

/// Squared distance from p to the region (0 when p is inside).
SqDistance sq_dist_to(const Region& reg, const TorusPoint& p);
/// Squared distance from p to the complement of the region; +inf for Full.
/// Supported: bands, boxes, balls, unions of bands, intersections and
/// complements of supported regions. Other unions yield a lower bound.
SqDistance sq_dist_to_complement(const Region& reg, const TorusPoint& p);

/// Boundary of a union of arcs, computed once for repeated distance queries.
class UncoveredArcs {
public:
    explicit UncoveredArcs(std::vector<Arc> arcs);
    /// Distance (not squared) from v to the part of the circle left uncovered;
    /// 0 when v is uncovered, nullopt when the arcs cover R/Z.
    std::optional<Rat> dist(const ModOne& v) const;
    const std::vector<ModOne>& edges() const { return edges_; }

private:
    std::vector<Arc> arcs_;
    std::vector<ModOne> edges_;
    std::vector<double> edges_f_;
};

std::optional<Rat> dist_to_uncovered(const std::vector<Arc>& arcs, const ModOne& v);

/// sq_dist_to_complement for a union of bands, with both axes precomputed.
class BandUnionComplement {
public:
    /// nullopt unless the region is a band or a union of bands.
    static std::optional<BandUnionComplement> of(const Region& r);
    SqDistance sq_dist(const TorusPoint& p) const;

private:
    BandUnionComplement(std::vector<Arc> xs, std::vector<Arc> ys) : x_(std::move(xs)), y_(std::move(ys)) {}
    UncoveredArcs x_;
    UncoveredArcs y_;
};

/// Smallest margin between an inner region and an outer region containing
/// its closure: inf over u in inner of d(u, complement(outer)), squared.
/// Supported pairs: full/band/box inside full/band/box, concentric balls,
/// complements of concentric closed balls.
SqDistance containment_margin(const Region& inner, const Region& outer);

nlohmann::json to_json(const Arc& a);
Arc arc_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Region& r);
Region region_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Quad& q);
Quad quad_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TorusPoint& p);
TorusPoint torus_point_from_json(const nlohmann::json& j);

}  // namespace pdyn
