#pragma once

// Piecewise-affine torus maps and symbolic partial maps built from them.

#include <optional>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "pseudodyn/affine.hpp"
#include "pseudodyn/regions.hpp"

namespace pdyn {

/// One affine branch of a stage. Coordinates are lifted into
/// [lift.x, lift.x + 1) x [lift.y, lift.y + 1) before the affine map is
/// applied; only maps with a non-integer linear part care, and those must
/// preserve the lifted coordinate they depend on (band twists do).
struct Piece {
    Region region;
    Affine2 map;
    std::array<Rat, 2> lift{Rat(0), Rat(0)};
};

/// A stage applies the first piece containing the point, identity elsewhere.
using Stage = std::vector<Piece>;

/// Twist of one band: the coordinate across the band axis is shifted by
/// slope * (v - anchor), v being the band coordinate lifted into the arc.
struct TwistBand {
    Axis axis;  // Horizontal band: x += slope * (y - anchor)
    Arc arc;
    Rat slope;
    Rat anchor;
};

class PwMap {
public:
    PwMap() = default;  // identity
    explicit PwMap(std::vector<Stage> stages) : stages_(std::move(stages)) {}

    static PwMap affine(const Affine2& a);
    /// Bands of one direction twisted simultaneously; identity off the bands.
    static PwMap twist_stage(const std::vector<TwistBand>& bands);

    const std::vector<Stage>& stages() const { return stages_; }

    TorusPoint apply(const TorusPoint& p) const;
    void apply_f(double& x, double& y) const;
    /// Exact inverse on the image: the unique p with apply(p) == q.
    std::optional<TorusPoint> apply_inverse(const TorusPoint& q) const;
    void apply_inverse_f(double& x, double& y) const;

    /// Affine map in effect at p (composition of the pieces used).
    Affine2 local_affine(const TorusPoint& p) const;
    /// Pieces used at p, one index per stage (-1 for the identity remainder).
    std::vector<int> pieces_at(const TorusPoint& p) const;

    /// {p : apply(p) in r}. Throws UnsupportedRegion when a piece preimage is
    /// outside the region class.
    Region preimage(const Region& r) const;
    /// Symbolic inverse (stages reversed, pieces replaced by their images).
    PwMap inverse() const;
    /// this after first.
    PwMap after(const PwMap& first) const;
    /// Single-stage equivalent with explicit identity remainder. Requires
    /// integer linear parts.
    Stage flatten() const;

    bool is_identity() const { return stages_.empty(); }

private:
    std::vector<Stage> stages_;
};

/// Partial map: a PwMap restricted to a domain Region.
struct PartialMap {
    Region domain;
    PwMap map;

    std::optional<TorusPoint> apply(const TorusPoint& p) const;
    std::optional<TorusPoint> apply_inverse(const TorusPoint& q) const;
};

class CompatibilityError : public std::runtime_error {
public:
    CompatibilityError(TorusPoint witness, TorusPoint image_a, TorusPoint image_b);
    TorusPoint witness;
    TorusPoint image_a;
    TorusPoint image_b;
};

/// g after f with dom = dom f intersected with the preimage of dom g.
PartialMap compose(const PartialMap& g, const PartialMap& f);
PartialMap invert(const PartialMap& f);
PartialMap restrict(const PartialMap& f, const Region& r);

/// Union of partial maps that agree on overlaps. Agreement is searched on a
/// candidate set: the cells cut out by every arc endpoint of every domain
/// and piece, refined by a 1/64 grid, probed at interior and boundary
/// points. Any disagreement found is exact and reported with a witness.
PartialMap combine(const std::vector<PartialMap>& maps);

nlohmann::json to_json(const Affine2& a);
nlohmann::json to_json(const PwMap& m);

}  // namespace pdyn
