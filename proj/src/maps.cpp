#include "pseudodyn/maps.hpp"

#include <algorithm>
#include <set>

namespace pdyn {

namespace {

Rat lifted(const ModOne& v, const Rat& origin) { return origin + (v.value() - origin).frac(); }
double lifted_f(double v, double origin) { return origin + frac_f(v - origin); }

TorusPoint apply_piece(const Piece& pc, const TorusPoint& p) {
    Rat x = lifted(p.x, pc.lift[0]);
    Rat y = lifted(p.y, pc.lift[1]);
    const auto& m = pc.map.m;
    const auto& t = pc.map.t;
    return {ModOne(m[0] * x + m[1] * y + t[0]), ModOne(m[2] * x + m[3] * y + t[1])};
}

void apply_piece_f(const Affine2& a, const std::array<Rat, 2>& lift, double& x, double& y) {
    double lx = lifted_f(x, lift[0].to_double());
    double ly = lifted_f(y, lift[1].to_double());
    a.apply_f(lx, ly);
    x = lx;
    y = ly;
}

int first_match(const Stage& s, const TorusPoint& p) {
    for (std::size_t k = 0; k < s.size(); ++k)
        if (s[k].region.contains(p)) return static_cast<int>(k);
    return -1;
}

int first_match_f(const Stage& s, double x, double y) {
    for (std::size_t k = 0; k < s.size(); ++k)
        if (s[k].region.contains_f(x, y)) return static_cast<int>(k);
    return -1;
}

TorusPoint apply_stage(const Stage& s, const TorusPoint& p) {
    int k = first_match(s, p);
    return k < 0 ? p : apply_piece(s[static_cast<std::size_t>(k)], p);
}

// Region on which piece k is the one applied (first-match semantics).
Region effective_region(const Stage& s, std::size_t k) {
    if (k == 0) return s[0].region;
    std::vector<Region> earlier;
    for (std::size_t i = 0; i < k; ++i) earlier.push_back(s[i].region);
    return Region::intersect({s[k].region, Region::complement(Region::unite(std::move(earlier)))});
}

Region remainder_region(const Stage& s) {
    std::vector<Region> all;
    for (const auto& pc : s) all.push_back(pc.region);
    return Region::complement(Region::unite(std::move(all)));
}

bool lift_free(const Piece& pc) {
    return pc.map.integer_linear() || (pc.lift[0].is_zero() && pc.lift[1].is_zero());
}

}  // namespace

PwMap PwMap::affine(const Affine2& a) {
    if (a.is_identity()) return {};
    return PwMap({Stage{Piece{Region::full(), a, {Rat(0), Rat(0)}}}});
}

PwMap PwMap::twist_stage(const std::vector<TwistBand>& bands) {
    Stage s;
    for (const auto& b : bands) {
        Piece pc{Region::band(b.axis, b.arc), Affine2::identity(), {Rat(0), Rat(0)}};
        if (b.axis == Axis::Horizontal) {
            pc.map.m[1] = b.slope;
            pc.map.t[0] = -(b.slope * b.anchor);
            pc.lift[1] = b.arc.lo;
        } else {
            pc.map.m[2] = b.slope;
            pc.map.t[1] = -(b.slope * b.anchor);
            pc.lift[0] = b.arc.lo;
        }
        s.push_back(std::move(pc));
    }
    if (s.empty()) return {};
    return PwMap({std::move(s)});
}

TorusPoint PwMap::apply(const TorusPoint& p) const {
    TorusPoint q = p;
    for (const auto& s : stages_) q = apply_stage(s, q);
    return q;
}

void PwMap::apply_f(double& x, double& y) const {
    for (const auto& s : stages_) {
        int k = first_match_f(s, x, y);
        if (k >= 0) apply_piece_f(s[static_cast<std::size_t>(k)].map, s[static_cast<std::size_t>(k)].lift, x, y);
    }
}

std::optional<TorusPoint> PwMap::apply_inverse(const TorusPoint& q) const {
    TorusPoint cur = q;
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
        const Stage& s = *it;
        std::optional<TorusPoint> found;
        if (first_match(s, cur) < 0) found = cur;
        for (std::size_t k = 0; k < s.size() && !found; ++k) {
            Piece inv{s[k].region, s[k].map.inverse(), s[k].lift};
            TorusPoint c = apply_piece(inv, cur);
            if (first_match(s, c) == static_cast<int>(k) && apply_piece(s[k], c) == cur) found = c;
        }
        if (!found) return std::nullopt;
        cur = *found;
    }
    return cur;
}

void PwMap::apply_inverse_f(double& x, double& y) const {
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
        const Stage& s = *it;
        if (first_match_f(s, x, y) < 0) continue;
        for (std::size_t k = 0; k < s.size(); ++k) {
            double cx = x, cy = y;
            apply_piece_f(s[k].map.inverse(), s[k].lift, cx, cy);
            if (first_match_f(s, cx, cy) == static_cast<int>(k)) {
                x = cx;
                y = cy;
                break;
            }
        }
    }
}

std::vector<int> PwMap::pieces_at(const TorusPoint& p) const {
    std::vector<int> used;
    TorusPoint q = p;
    for (const auto& s : stages_) {
        int k = first_match(s, q);
        used.push_back(k);
        if (k >= 0) q = apply_piece(s[static_cast<std::size_t>(k)], q);
    }
    return used;
}

Affine2 PwMap::local_affine(const TorusPoint& p) const {
    Affine2 total;
    TorusPoint q = p;
    for (const auto& s : stages_) {
        int k = first_match(s, q);
        if (k < 0) continue;
        const Piece& pc = s[static_cast<std::size_t>(k)];
        total = pc.map.after(total);
        q = apply_piece(pc, q);
    }
    return total;
}

Region PwMap::preimage(const Region& r) const {
    Region cur = r;
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
        const Stage& s = *it;
        std::vector<Region> parts;
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (!lift_free(s[k])) throw UnsupportedRegion("preimage through a piece with a lifted non-integer map");
            parts.push_back(Region::intersect({effective_region(s, k), cur.preimage(s[k].map)}));
        }
        parts.push_back(Region::intersect({remainder_region(s), cur}));
        cur = Region::unite(std::move(parts));
    }
    return cur;
}

PwMap PwMap::inverse() const {
    std::vector<Stage> out;
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
        const Stage& s = *it;
        Stage inv;
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (!lift_free(s[k])) throw UnsupportedRegion("symbolic inverse of a lifted non-integer piece");
            Affine2 a = s[k].map.inverse();
            inv.push_back(Piece{effective_region(s, k).preimage(a), a, s[k].lift});
        }
        out.push_back(std::move(inv));
    }
    return PwMap(std::move(out));
}

PwMap PwMap::after(const PwMap& first) const {
    std::vector<Stage> all = first.stages_;
    all.insert(all.end(), stages_.begin(), stages_.end());
    return PwMap(std::move(all));
}

Stage PwMap::flatten() const {
    Stage cur{Piece{Region::full(), Affine2::identity(), {Rat(0), Rat(0)}}};
    for (const auto& s : stages_) {
        Stage next;
        for (const auto& pc : s)
            if (!pc.map.integer_linear()) throw UnsupportedRegion("flatten needs integer linear parts");
        for (const auto& acc : cur) {
            auto pull = [&](const Region& r) { return acc.map.is_identity() ? r : r.preimage(acc.map); };
            for (std::size_t k = 0; k < s.size(); ++k)
                next.push_back(Piece{Region::intersect({acc.region, pull(effective_region(s, k))}),
                                     s[k].map.after(acc.map), {Rat(0), Rat(0)}});
            next.push_back(Piece{Region::intersect({acc.region, pull(remainder_region(s))}), acc.map,
                                 {Rat(0), Rat(0)}});
        }
        std::erase_if(next, [](const Piece& pc) { return pc.region.is_empty(); });
        cur = std::move(next);
    }
    return cur;
}

// ---------------------------------------------------------------- partial maps

std::optional<TorusPoint> PartialMap::apply(const TorusPoint& p) const {
    if (!domain.contains(p)) return std::nullopt;
    return map.apply(p);
}

std::optional<TorusPoint> PartialMap::apply_inverse(const TorusPoint& q) const {
    auto c = map.apply_inverse(q);
    if (!c || !domain.contains(*c)) return std::nullopt;
    return c;
}

CompatibilityError::CompatibilityError(TorusPoint w, TorusPoint a, TorusPoint b)
    : std::runtime_error("incompatible partial maps: they disagree at (" + w.x.value().str() + ", " +
                         w.y.value().str() + ")"),
      witness(std::move(w)), image_a(std::move(a)), image_b(std::move(b)) {}

PartialMap compose(const PartialMap& g, const PartialMap& f) {
    return {Region::intersect({f.domain, f.map.preimage(g.domain)}), g.map.after(f.map)};
}

PartialMap invert(const PartialMap& f) {
    PwMap inv = f.map.inverse();
    return {inv.preimage(f.domain), inv};
}

PartialMap restrict(const PartialMap& f, const Region& r) { return {Region::intersect({f.domain, r}), f.map}; }

namespace {

void collect_coords(const Region& r, std::set<Rat>& xs, std::set<Rat>& ys) {
    auto arc = [](const Arc& a, std::set<Rat>& out) {
        out.insert(a.lo);
        out.insert(a.hi.frac());
    };
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Region::Band>) {
                arc(n.arc, n.axis == Axis::Vertical ? xs : ys);
            } else if constexpr (std::is_same_v<T, Region::Box>) {
                arc(n.x, xs);
                arc(n.y, ys);
            } else if constexpr (std::is_same_v<T, Region::Ball>) {
                xs.insert(n.center.x.value());
                ys.insert(n.center.y.value());
            } else if constexpr (std::is_same_v<T, Region::Union> || std::is_same_v<T, Region::Intersection>) {
                for (const auto& m : n.members) collect_coords(m, xs, ys);
            } else if constexpr (std::is_same_v<T, Region::Complement>) {
                collect_coords(n.child.front(), xs, ys);
            }
        },
        r.node());
}

std::vector<Rat> probe_coords(std::set<Rat> cuts) {
    for (long k = 0; k < 16; ++k) cuts.insert(Rat(k, 16));
    std::vector<Rat> sorted(cuts.begin(), cuts.end());
    std::vector<Rat> out = sorted;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        Rat a = sorted[i];
        Rat b = i + 1 < sorted.size() ? sorted[i + 1] : sorted[0] + Rat(1);
        Rat w = b - a;
        out.push_back((a + w / Rat(3)).frac());
        out.push_back((a + Rat(2) * w / Rat(3)).frac());
    }
    return out;
}

}  // namespace

PartialMap combine(const std::vector<PartialMap>& maps) {
    std::set<Rat> xs, ys;
    for (const auto& m : maps) {
        collect_coords(m.domain, xs, ys);
        for (const auto& s : m.map.stages())
            for (const auto& pc : s) collect_coords(pc.region, xs, ys);
    }
    const auto px = probe_coords(xs);
    const auto py = probe_coords(ys);
    for (const auto& x : px)
        for (const auto& y : py) {
            TorusPoint p{ModOne(x), ModOne(y)};
            std::optional<TorusPoint> first;
            for (const auto& m : maps) {
                if (!m.domain.contains(p)) continue;
                TorusPoint q = m.map.apply(p);
                if (!first) first = q;
                else if (*first != q) throw CompatibilityError(p, *first, q);
            }
        }

    Stage merged;
    std::vector<Region> domains;
    for (const auto& m : maps) {
        domains.push_back(m.domain);
        for (auto& pc : m.map.flatten())
            merged.push_back(Piece{Region::intersect({m.domain, pc.region}), pc.map, pc.lift});
    }
    std::erase_if(merged, [](const Piece& pc) { return pc.region.is_empty(); });
    PwMap map = merged.empty() ? PwMap() : PwMap({std::move(merged)});
    return {Region::unite(std::move(domains)), std::move(map)};
}

// ---------------------------------------------------------------- JSON

nlohmann::json to_json(const Affine2& a) {
    nlohmann::json m = nlohmann::json::array(), t = nlohmann::json::array();
    for (const auto& v : a.m) m.push_back(v.str());
    for (const auto& v : a.t) t.push_back(v.str());
    return {{"matrix", m}, {"offset", t}};
}

nlohmann::json to_json(const PwMap& m) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : m.stages()) {
        nlohmann::json pieces = nlohmann::json::array();
        for (const auto& pc : s)
            pieces.push_back({{"region", to_json(pc.region)},
                              {"affine", to_json(pc.map)},
                              {"lift", {pc.lift[0].str(), pc.lift[1].str()}}});
        stages.push_back(pieces);
    }
    return stages;
}

}  // namespace pdyn
