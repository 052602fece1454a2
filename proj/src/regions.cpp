#include "pseudodyn/regions.hpp"

#include <algorithm>
#include <cmath>

namespace pdyn {

namespace {

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const Rat kOne(1);

}  // namespace

// ---------------------------------------------------------------- Arc

Arc Arc::closed(Rat lo, Rat hi) { return make(std::move(lo), std::move(hi), true, true); }
Arc Arc::open(Rat lo, Rat hi) { return make(std::move(lo), std::move(hi), false, false); }
Arc Arc::point(const Rat& v) {
    Rat w = v.frac();
    return make(w, w, true, true);
}

Arc Arc::make(Rat lo, Rat hi, bool lo_closed, bool hi_closed) {
    if (lo < Rat(0) || lo >= kOne || hi < Rat(0) || hi > kOne)
        throw std::invalid_argument("Arc: endpoints must lie in [0,1]");
    Arc a{std::move(lo), std::move(hi), lo_closed, hi_closed, false};
    if (a.lo > a.hi) {
        if (a.hi == kOne) throw std::invalid_argument("Arc: wrapping arc with hi = 1");
        a.wraps = true;
    } else if (a.lo == a.hi && !(lo_closed && hi_closed)) {
        throw std::invalid_argument("Arc: degenerate arc must be closed");
    }
    return a;
}

bool Arc::contains(const ModOne& m) const {
    const Rat& v = m.value();
    bool above_lo = v > lo || (lo_closed && v == lo);
    bool below_hi = v < hi || (hi_closed && v == hi);
    if (wraps) return above_lo || below_hi;
    if (above_lo && below_hi) return true;
    return hi == kOne && hi_closed && v.is_zero();
}

bool Arc::contains_f(double v) const {
    double l = lo.to_double(), h = hi.to_double();
    bool above_lo = v > l || (lo_closed && v == l);
    bool below_hi = v < h || (hi_closed && v == h);
    if (wraps) return above_lo || below_hi;
    if (above_lo && below_hi) return true;
    return h == 1.0 && hi_closed && v == 0.0;
}

Arc Arc::shifted(const Rat& delta) const {
    Rat len = length();
    Rat nlo = (lo + delta).frac();
    Rat nhi = nlo + len;
    Arc a{nlo, nhi, lo_closed, hi_closed, false};
    if (nhi > kOne) {
        a.hi = nhi - kOne;
        a.wraps = true;
    }
    return a;
}

// ---------------------------------------------------------------- SqDistance

bool SqDistance::exceeds(const Quad& r_sq) const {
    if (infinite) return true;
    if (exact) return quad_cmp(*exact, r_sq) == std::strong_ordering::greater;
    double r = r_sq.to_double();
    return approx > r * (1 + 1e-9) + 1e-15;
}

bool SqDistance::possibly_below(const Quad& r_sq) const {
    if (infinite) return false;
    if (exact) {
        return quad_cmp(*exact, r_sq) == std::strong_ordering::less;
    }
    double r = r_sq.to_double();
    return !(approx > r * (1 + 1e-9) + 1e-15);
}

namespace {

SqDistance min_dist(const SqDistance& a, const SqDistance& b) {
    if (a.infinite) return b;
    if (b.infinite) return a;
    SqDistance r;
    r.lower_bound = a.lower_bound || b.lower_bound;
    if (a.exact && b.exact) {
        r.exact = quad_cmp(*a.exact, *b.exact) == std::strong_ordering::less ? *a.exact : *b.exact;
        r.approx = r.exact->to_double();
    } else {
        r.approx = std::min(a.approx, b.approx);
    }
    return r;
}

// Result is only a lower bound for the true quantity.
SqDistance max_lower_bound(const SqDistance& a, const SqDistance& b) {
    if (a.infinite || b.infinite) return SqDistance::inf();
    SqDistance r;
    r.lower_bound = true;
    if (a.exact && b.exact) {
        r.exact = quad_cmp(*a.exact, *b.exact) == std::strong_ordering::greater ? *a.exact : *b.exact;
        r.approx = r.exact->to_double();
    } else {
        r.approx = std::max(a.approx, b.approx);
    }
    return r;
}

SqDistance rat_sq(const Rat& d) { return SqDistance::of(Quad(d * d)); }

// Distance from v to the nearest endpoint of the arc.
Rat arc_endpoint_dist(const Arc& a, const ModOne& v) {
    return min(circle_dist(v, ModOne(a.lo)), circle_dist(v, ModOne(a.hi)));
}

long double sqrt_quad(const Quad& q) {
    long double v = static_cast<long double>(q.a().to_double()) +
                    static_cast<long double>(q.b().to_double()) * std::sqrt(2.0L);
    return std::sqrt(std::max(v, 0.0L));
}

}  // namespace

// ---------------------------------------------------------------- Region

Region::Region() : Region(Empty{}) {}
Region Region::empty() { return Region(Empty{}); }
Region Region::full() { return Region(Full{}); }
Region Region::band(Axis axis, Arc arc) { return Region(Band{axis, std::move(arc)}); }
Region Region::box(Arc x, Arc y) { return Region(Box{std::move(x), std::move(y)}); }
Region Region::strip(Rat a, Rat b, Rat c, Arc arc) {
    if (a.is_zero() && b.is_zero()) throw std::invalid_argument("Region::strip: zero linear form");
    if (a == kOne && b.is_zero()) return band(Axis::Vertical, arc.shifted(-c));
    if (a.is_zero() && b == kOne) return band(Axis::Horizontal, arc.shifted(-c));
    return Region(Strip{std::move(a), std::move(b), std::move(c), std::move(arc)});
}
Region Region::ball(TorusPoint center, Quad r_sq, bool closed) {
    if (r_sq.sign() <= 0) throw std::invalid_argument("Region::ball: radius must be positive");
    return Region(Ball{std::move(center), std::move(r_sq), closed});
}

Region Region::unite(std::vector<Region> members) {
    std::vector<Region> flat;
    for (auto& m : members) {
        if (m.is_full()) return full();
        if (m.is_empty()) continue;
        if (auto* u = std::get_if<Union>(&m.node()))
            flat.insert(flat.end(), u->members.begin(), u->members.end());
        else
            flat.push_back(std::move(m));
    }
    if (flat.empty()) return empty();
    if (flat.size() == 1) return flat.front();
    return Region(Union{std::move(flat)});
}

Region Region::intersect(std::vector<Region> members) {
    std::vector<Region> flat;
    for (auto& m : members) {
        if (m.is_empty()) return empty();
        if (m.is_full()) continue;
        if (auto* u = std::get_if<Intersection>(&m.node()))
            flat.insert(flat.end(), u->members.begin(), u->members.end());
        else
            flat.push_back(std::move(m));
    }
    if (flat.empty()) return full();
    if (flat.size() == 1) return flat.front();
    return Region(Intersection{std::move(flat)});
}

Region Region::complement(const Region& r) {
    if (r.is_empty()) return full();
    if (r.is_full()) return empty();
    if (auto* c = std::get_if<Complement>(&r.node())) return c->child.front();
    return Region(Complement{{r}});
}

bool Region::contains(const TorusPoint& p) const {
    return std::visit(
        overloaded{
            [](const Empty&) { return false; },
            [](const Full&) { return true; },
            [&](const Band& b) { return b.arc.contains(b.axis == Axis::Vertical ? p.x : p.y); },
            [&](const Box& b) { return b.x.contains(p.x) && b.y.contains(p.y); },
            [&](const Strip& s) {
                return s.arc.contains(ModOne(s.a * p.x.value() + s.b * p.y.value() + s.c));
            },
            [&](const Ball& b) { return ball_test(p, b.center, b.r_sq, b.closed); },
            [&](const Union& u) {
                return std::any_of(u.members.begin(), u.members.end(),
                                   [&](const Region& m) { return m.contains(p); });
            },
            [&](const Intersection& u) {
                return std::all_of(u.members.begin(), u.members.end(),
                                   [&](const Region& m) { return m.contains(p); });
            },
            [&](const Complement& c) { return !c.child.front().contains(p); },
        },
        *node_);
}

bool Region::contains_f(double x, double y) const {
    return std::visit(
        overloaded{
            [](const Empty&) { return false; },
            [](const Full&) { return true; },
            [&](const Band& b) { return b.arc.contains_f(b.axis == Axis::Vertical ? x : y); },
            [&](const Box& b) { return b.x.contains_f(x) && b.y.contains_f(y); },
            [&](const Strip& s) {
                return s.arc.contains_f(frac_f(s.a.to_double() * x + s.b.to_double() * y + s.c.to_double()));
            },
            [&](const Ball& b) {
                double d = sq_dist_f(x, y, b.center.x.to_double(), b.center.y.to_double());
                double r = b.r_sq.to_double();
                return b.closed ? d <= r : d < r;
            },
            [&](const Union& u) {
                return std::any_of(u.members.begin(), u.members.end(),
                                   [&](const Region& m) { return m.contains_f(x, y); });
            },
            [&](const Intersection& u) {
                return std::all_of(u.members.begin(), u.members.end(),
                                   [&](const Region& m) { return m.contains_f(x, y); });
            },
            [&](const Complement& c) { return !c.child.front().contains_f(x, y); },
        },
        *node_);
}

namespace {

Region strip_preimage(const Rat& a, const Rat& b, const Rat& c, const Arc& arc, const Affine2& f) {
    if (!a.is_integer() || !b.is_integer())
        throw UnsupportedRegion("preimage of a strip with non-integer coefficients");
    Rat na = a * f.m[0] + b * f.m[2];
    Rat nb = a * f.m[1] + b * f.m[3];
    Rat nc = a * f.t[0] + b * f.t[1] + c;
    if (!na.is_integer() || !nb.is_integer())
        throw UnsupportedRegion("preimage of a strip under a non-integer linear map");
    return Region::strip(na, nb, nc, arc);
}

}  // namespace

Region Region::preimage(const Affine2& f) const {
    return std::visit(
        overloaded{
            [&](const Empty&) { return empty(); },
            [&](const Full&) { return full(); },
            [&](const Band& b) {
                return b.axis == Axis::Vertical ? strip_preimage(kOne, Rat(0), Rat(0), b.arc, f)
                                                : strip_preimage(Rat(0), kOne, Rat(0), b.arc, f);
            },
            [&](const Box& b) {
                return intersect({strip_preimage(kOne, Rat(0), Rat(0), b.x, f),
                                  strip_preimage(Rat(0), kOne, Rat(0), b.y, f)});
            },
            [&](const Strip& s) { return strip_preimage(s.a, s.b, s.c, s.arc, f); },
            [&](const Ball& b) -> Region {
                if (!f.identity_linear()) throw UnsupportedRegion("affine preimage of a ball");
                TorusPoint c{ModOne(b.center.x.value() - f.t[0]), ModOne(b.center.y.value() - f.t[1])};
                return ball(c, b.r_sq, b.closed);
            },
            [&](const Union& u) {
                std::vector<Region> out;
                for (const auto& m : u.members) out.push_back(m.preimage(f));
                return unite(std::move(out));
            },
            [&](const Intersection& u) {
                std::vector<Region> out;
                for (const auto& m : u.members) out.push_back(m.preimage(f));
                return intersect(std::move(out));
            },
            [&](const Complement& c) { return complement(c.child.front().preimage(f)); },
        },
        *node_);
}

double Region::boundary_clearance_f(double x, double y) const {
    auto arc_clear = [](const Arc& a, double v) {
        return std::min(circle_dist_f(v, a.lo.to_double()), circle_dist_f(v, a.hi.to_double()));
    };
    auto children = [&](const std::vector<Region>& ms) {
        double best = HUGE_VAL;
        for (const auto& m : ms) best = std::min(best, m.boundary_clearance_f(x, y));
        return best;
    };
    return std::visit(
        overloaded{
            [](const Empty&) { return HUGE_VAL; },
            [](const Full&) { return HUGE_VAL; },
            [&](const Band& b) { return arc_clear(b.arc, b.axis == Axis::Vertical ? x : y); },
            [&](const Box& b) { return std::min(arc_clear(b.x, x), arc_clear(b.y, y)); },
            [&](const Strip& s) {
                double a = s.a.to_double(), b = s.b.to_double();
                double w = frac_f(a * x + b * y + s.c.to_double());
                return arc_clear(s.arc, w) / std::sqrt(a * a + b * b);
            },
            [&](const Ball& b) {
                double d = std::sqrt(sq_dist_f(x, y, b.center.x.to_double(), b.center.y.to_double()));
                return std::fabs(d - std::sqrt(b.r_sq.to_double()));
            },
            [&](const Union& u) { return children(u.members); },
            [&](const Intersection& u) { return children(u.members); },
            [&](const Complement& c) { return children(c.child); },
        },
        *node_);
}

// ---------------------------------------------------------------- distances

UncoveredArcs::UncoveredArcs(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {
    // Lifted intervals [l + k, h + k] for k in {-1, 0, 1}.
    auto side_covered = [&](const Rat& e, bool left) {
        for (const auto& a : arcs_) {
            Rat l = a.lo;
            Rat h = a.wraps ? a.hi + kOne : a.hi;
            for (int k = -1; k <= 1; ++k) {
                Rat lk = l + Rat(k), hk = h + Rat(k);
                if (left ? (lk < e && e <= hk) : (lk <= e && e < hk)) return true;
            }
        }
        return false;
    };
    auto covered = [&](const ModOne& e) {
        return std::any_of(arcs_.begin(), arcs_.end(), [&](const Arc& a) { return a.contains(e); });
    };
    for (const auto& a : arcs_)
        for (const Rat& end : {a.lo, a.hi}) {
            ModOne e(end);
            if (covered(e) && side_covered(e.value(), true) && side_covered(e.value(), false)) continue;
            if (std::find(edges_.begin(), edges_.end(), e) == edges_.end()) {
                edges_.push_back(e);
                edges_f_.push_back(e.to_double());
            }
        }
}

std::optional<Rat> UncoveredArcs::dist(const ModOne& v) const {
    if (std::none_of(arcs_.begin(), arcs_.end(), [&](const Arc& a) { return a.contains(v); })) return Rat(0);
    if (edges_.empty()) return std::nullopt;
    // Float prefilter, exact among near-minimal candidates.
    const double vf = v.to_double();
    double best_f = HUGE_VAL;
    for (double e : edges_f_) best_f = std::min(best_f, circle_dist_f(vf, e));
    std::optional<Rat> best;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (circle_dist_f(vf, edges_f_[i]) > best_f + 1e-9) continue;
        Rat d = circle_dist(v, edges_[i]);
        if (!best || d < *best) best = d;
    }
    return best;
}

std::optional<Rat> dist_to_uncovered(const std::vector<Arc>& arcs, const ModOne& v) {
    return UncoveredArcs(arcs).dist(v);
}

namespace {

bool split_bands(const Region& r, std::vector<Arc>& xs, std::vector<Arc>& ys) {
    auto take = [&](const Region& m) {
        const auto* b = std::get_if<Region::Band>(&m.node());
        if (!b) return false;
        (b->axis == Axis::Vertical ? xs : ys).push_back(b->arc);
        return true;
    };
    if (const auto* u = std::get_if<Region::Union>(&r.node()))
        return std::all_of(u->members.begin(), u->members.end(), take);
    return take(r);
}

}  // namespace

std::optional<BandUnionComplement> BandUnionComplement::of(const Region& r) {
    std::vector<Arc> xs, ys;
    if (!split_bands(r, xs, ys)) return std::nullopt;
    return BandUnionComplement(std::move(xs), std::move(ys));
}

SqDistance BandUnionComplement::sq_dist(const TorusPoint& p) const {
    // complement = (circle minus V-arcs) x (circle minus H-arcs)
    auto dx = x_.dist(p.x);
    auto dy = y_.dist(p.y);
    if (!dx || !dy) return SqDistance::inf();
    return SqDistance::of(Quad(*dx * *dx + *dy * *dy));
}

SqDistance sq_dist_to(const Region& reg, const TorusPoint& p) {
    return std::visit(
        overloaded{
            [](const Region::Empty&) { return SqDistance::inf(); },
            [](const Region::Full&) { return SqDistance::of(Quad(0)); },
            [&](const Region::Band& b) {
                const ModOne& v = b.axis == Axis::Vertical ? p.x : p.y;
                if (b.arc.contains(v)) return SqDistance::of(Quad(0));
                return rat_sq(arc_endpoint_dist(b.arc, v));
            },
            [&](const Region::Box& b) {
                Rat dx = b.x.contains(p.x) ? Rat(0) : arc_endpoint_dist(b.x, p.x);
                Rat dy = b.y.contains(p.y) ? Rat(0) : arc_endpoint_dist(b.y, p.y);
                return SqDistance::of(Quad(dx * dx + dy * dy));
            },
            [&](const Region::Strip&) -> SqDistance {
                throw UnsupportedRegion("distance to a strip");
            },
            [&](const Region::Ball& b) {
                if (ball_test(p, b.center, b.r_sq, b.closed)) return SqDistance::of(Quad(0));
                long double d = std::sqrt(static_cast<long double>(sq_dist(p, b.center).to_double()));
                long double gap = d - sqrt_quad(b.r_sq);
                return SqDistance::floating(static_cast<double>(gap * gap));
            },
            [&](const Region::Union& u) {
                SqDistance best = SqDistance::inf();
                for (const auto& m : u.members) best = min_dist(best, sq_dist_to(m, p));
                return best;
            },
            [&](const Region::Intersection& u) {
                if (reg.contains(p)) return SqDistance::of(Quad(0));
                SqDistance best = SqDistance::of(Quad(0));
                for (const auto& m : u.members) best = max_lower_bound(best, sq_dist_to(m, p));
                return best;
            },
            [&](const Region::Complement& c) {
                const Region& inner = c.child.front();
                if (!inner.contains(p)) return SqDistance::of(Quad(0));
                return sq_dist_to_complement(inner, p);
            },
        },
        reg.node());
}

SqDistance sq_dist_to_complement(const Region& reg, const TorusPoint& p) {
    if (reg.is_full()) return SqDistance::inf();
    if (!reg.contains(p)) return SqDistance::of(Quad(0));
    return std::visit(
        overloaded{
            [](const Region::Empty&) { return SqDistance::of(Quad(0)); },
            [](const Region::Full&) { return SqDistance::inf(); },
            [&](const Region::Band& b) {
                return rat_sq(arc_endpoint_dist(b.arc, b.axis == Axis::Vertical ? p.x : p.y));
            },
            [&](const Region::Box& b) {
                return rat_sq(min(arc_endpoint_dist(b.x, p.x), arc_endpoint_dist(b.y, p.y)));
            },
            [&](const Region::Strip&) -> SqDistance {
                throw UnsupportedRegion("distance to the complement of a strip");
            },
            [&](const Region::Ball& b) {
                Rat d = sq_dist(p, b.center);
                if (d.is_zero()) return SqDistance::of(b.r_sq);
                long double gap = sqrt_quad(b.r_sq) - std::sqrt(static_cast<long double>(d.to_double()));
                return SqDistance::floating(static_cast<double>(gap * gap));
            },
            [&](const Region::Union& u) {
                if (auto bands = BandUnionComplement::of(reg)) return bands->sq_dist(p);
                SqDistance best = SqDistance::of(Quad(0));
                for (const auto& m : u.members)
                    if (m.contains(p)) best = max_lower_bound(best, sq_dist_to_complement(m, p));
                best.lower_bound = true;
                return best;
            },
            [&](const Region::Intersection& u) {
                SqDistance best = SqDistance::inf();
                for (const auto& m : u.members) best = min_dist(best, sq_dist_to_complement(m, p));
                return best;
            },
            [&](const Region::Complement& c) { return sq_dist_to(c.child.front(), p); },
        },
        reg.node());
}

// ---------------------------------------------------------------- margins

namespace {

// Margin of closure(inner) inside outer on one circle coordinate.
Rat arc_margin(const std::optional<Arc>& inner, const Arc& outer) {
    if (!inner) return Rat(0);
    Arc in = inner->shifted(-outer.lo);
    if (in.wraps) return Rat(0);
    Rat left = in.lo;
    Rat right = outer.length() - in.hi;
    Rat m = min(left, right);
    return m.sign() > 0 ? m : Rat(0);
}

struct AxisArcs {
    std::optional<Arc> x;
    std::optional<Arc> y;
};

std::optional<AxisArcs> as_axis_arcs(const Region& r) {
    if (r.is_full()) return AxisArcs{};
    if (auto* b = std::get_if<Region::Band>(&r.node())) {
        AxisArcs a;
        (b->axis == Axis::Vertical ? a.x : a.y) = b->arc;
        return a;
    }
    if (auto* b = std::get_if<Region::Box>(&r.node())) return AxisArcs{b->x, b->y};
    return std::nullopt;
}

std::optional<Rat> rational_sqrt(const Quad& q) {
    if (!q.is_rational() || q.a().sign() < 0) return std::nullopt;
    mpz_class n = q.a().num(), d = q.a().den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return std::nullopt;
    mpz_class sn, sd;
    mpz_sqrt(sn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), d.get_mpz_t());
    return Rat(mpq_class(sn, sd));
}

SqDistance radius_gap(const Quad& small, const Quad& big, const Rat& center_sq_dist) {
    auto rs = rational_sqrt(small), rb = rational_sqrt(big);
    if (rs && rb && center_sq_dist.is_zero()) {
        Rat g = *rb - *rs;
        return g.sign() > 0 ? SqDistance::of(Quad(g * g)) : SqDistance::of(Quad(0));
    }
    long double g = sqrt_quad(big) - sqrt_quad(small) -
                    std::sqrt(static_cast<long double>(center_sq_dist.to_double()));
    return SqDistance::floating(g > 0 ? static_cast<double>(g * g) : 0.0);
}

}  // namespace

SqDistance containment_margin(const Region& inner, const Region& outer) {
    if (inner.is_empty() || outer.is_full()) return SqDistance::inf();
    if (inner.is_full()) return SqDistance::of(Quad(0));
    auto ia = as_axis_arcs(inner);
    auto oa = as_axis_arcs(outer);
    if (ia && oa) {
        std::optional<Rat> best;
        if (oa->x) best = arc_margin(ia->x, *oa->x);
        if (oa->y) {
            Rat m = arc_margin(ia->y, *oa->y);
            best = best ? min(*best, m) : m;
        }
        if (!best) return SqDistance::inf();
        return rat_sq(*best);
    }
    auto* bi = std::get_if<Region::Ball>(&inner.node());
    auto* bo = std::get_if<Region::Ball>(&outer.node());
    if (bi && bo) return radius_gap(bi->r_sq, bo->r_sq, sq_dist(bi->center, bo->center));
    auto* ci = std::get_if<Region::Complement>(&inner.node());
    auto* co = std::get_if<Region::Complement>(&outer.node());
    if (ci && co) {
        auto* hi = std::get_if<Region::Ball>(&ci->child.front().node());
        auto* ho = std::get_if<Region::Ball>(&co->child.front().node());
        if (hi && ho) return radius_gap(ho->r_sq, hi->r_sq, sq_dist(hi->center, ho->center));
    }
    throw UnsupportedRegion("containment margin for this pair of regions");
}

// ---------------------------------------------------------------- JSON

using nlohmann::json;

json to_json(const Quad& q) { return {{"a", q.a().str()}, {"b", q.b().str()}}; }
Quad quad_from_json(const json& j) {
    return {Rat::parse(j.at("a").get<std::string>()), Rat::parse(j.at("b").get<std::string>())};
}

json to_json(const TorusPoint& p) { return {{"x", p.x.value().str()}, {"y", p.y.value().str()}}; }
TorusPoint torus_point_from_json(const json& j) {
    return {ModOne(Rat::parse(j.at("x").get<std::string>())), ModOne(Rat::parse(j.at("y").get<std::string>()))};
}

json to_json(const Arc& a) {
    return {{"lo", a.lo.str()}, {"hi", a.hi.str()}, {"lo_closed", a.lo_closed},
            {"hi_closed", a.hi_closed}, {"wraps", a.wraps}};
}

Arc arc_from_json(const json& j) {
    Arc a = Arc::make(Rat::parse(j.at("lo").get<std::string>()), Rat::parse(j.at("hi").get<std::string>()),
                      j.at("lo_closed").get<bool>(), j.at("hi_closed").get<bool>());
    if (a.wraps != j.value("wraps", a.wraps)) throw ParseError("arc wraps flag inconsistent with endpoints");
    return a;
}

json to_json(const Region& r) {
    auto list = [](const std::vector<Region>& ms) {
        json arr = json::array();
        for (const auto& m : ms) arr.push_back(to_json(m));
        return arr;
    };
    return std::visit(
        overloaded{
            [](const Region::Empty&) { return json{{"type", "empty"}}; },
            [](const Region::Full&) { return json{{"type", "full"}}; },
            [](const Region::Band& b) {
                return json{{"type", "band"},
                            {"axis", b.axis == Axis::Vertical ? "vertical" : "horizontal"},
                            {"arc", to_json(b.arc)}};
            },
            [](const Region::Box& b) { return json{{"type", "box"}, {"x", to_json(b.x)}, {"y", to_json(b.y)}}; },
            [](const Region::Strip& s) {
                return json{{"type", "strip"}, {"a", s.a.str()}, {"b", s.b.str()}, {"c", s.c.str()},
                            {"arc", to_json(s.arc)}};
            },
            [](const Region::Ball& b) {
                return json{{"type", "ball"}, {"center", to_json(b.center)}, {"r_sq", to_json(b.r_sq)},
                            {"closed", b.closed}};
            },
            [&](const Region::Union& u) { return json{{"type", "union"}, {"members", list(u.members)}}; },
            [&](const Region::Intersection& u) {
                return json{{"type", "intersection"}, {"members", list(u.members)}};
            },
            [](const Region::Complement& c) {
                return json{{"type", "complement"}, {"child", to_json(c.child.front())}};
            },
        },
        r.node());
}

Region region_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    auto list = [&](const char* key) {
        std::vector<Region> ms;
        for (const auto& m : j.at(key)) ms.push_back(region_from_json(m));
        return ms;
    };
    if (type == "empty") return Region::empty();
    if (type == "full") return Region::full();
    if (type == "band") {
        std::string axis = j.at("axis").get<std::string>();
        if (axis != "vertical" && axis != "horizontal") throw ParseError("bad band axis: " + axis);
        return Region::band(axis == "vertical" ? Axis::Vertical : Axis::Horizontal, arc_from_json(j.at("arc")));
    }
    if (type == "box") return Region::box(arc_from_json(j.at("x")), arc_from_json(j.at("y")));
    if (type == "strip")
        return Region::strip(Rat::parse(j.at("a").get<std::string>()), Rat::parse(j.at("b").get<std::string>()),
                             Rat::parse(j.at("c").get<std::string>()), arc_from_json(j.at("arc")));
    if (type == "ball")
        return Region::ball(torus_point_from_json(j.at("center")), quad_from_json(j.at("r_sq")),
                            j.at("closed").get<bool>());
    if (type == "union") return Region::unite(list("members"));
    if (type == "intersection") return Region::intersect(list("members"));
    if (type == "complement") return Region::complement(region_from_json(j.at("child")));
    throw ParseError("unknown region type: " + type);
}

}  // namespace pdyn
