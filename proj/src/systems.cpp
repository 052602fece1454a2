#include "pseudodyn/systems.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace pdyn {

namespace {

std::vector<std::pair<Rat, Rat>> segments(const Arc& a) {
    if (!a.wraps) return {{a.lo, a.hi}};
    return {{a.lo, Rat(1)}, {Rat(0), a.hi}};
}

void check_disjoint(const std::vector<TwistInterval>& list, const char* which) {
    for (std::size_t i = 0; i < list.size(); ++i)
        for (std::size_t j = i + 1; j < list.size(); ++j)
            for (const auto& [a0, a1] : segments(list[i].arc))
                for (const auto& [b0, b1] : segments(list[j].arc))
                    if (min(a1, b1) - max(a0, b0) > Rat(0))
                        throw OverlappingIntervals(std::string(which) + " intervals " + std::to_string(i) + " and " +
                                                   std::to_string(j) + " share more than an endpoint");
}

TwistBand band_of(Axis axis, const TwistInterval& t) {
    return {axis, t.arc, Rat(t.multiple) / t.arc.length(), t.arc.lo};
}

Region boundary_lines(Axis axis, const Arc& a) {
    return Region::unite({Region::band(axis, Arc::point(a.lo)), Region::band(axis, Arc::point(a.hi))});
}

Region union_of_bands(const std::vector<TwistBand>& bands) {
    std::vector<Region> rs;
    for (const auto& b : bands) rs.push_back(Region::band(b.axis, b.arc));
    return Region::unite(std::move(rs));
}

// Delta = boundaries of the horizontal bands plus the T_h-preimages of the
// vertical band boundaries.
Region twist_delta(const std::vector<TwistBand>& h, const PwMap& T_h, const std::vector<TwistBand>& v) {
    std::vector<Region> parts;
    for (const auto& b : h) parts.push_back(boundary_lines(Axis::Horizontal, b.arc));
    std::vector<Region> vlines;
    for (const auto& b : v) vlines.push_back(boundary_lines(Axis::Vertical, b.arc));
    if (!vlines.empty()) parts.push_back(T_h.preimage(Region::unite(std::move(vlines))));
    return Region::unite(std::move(parts));
}

std::string torus_key(const TorusPoint& p) { return p.x.value().str() + "," + p.y.value().str(); }

}  // namespace

// ---------------------------------------------------------------- linked twists

LinkedTwistSystem build_linked_twist(const LinkedTwistSpec& spec) {
    check_disjoint(spec.h_intervals, "horizontal");
    check_disjoint(spec.v_intervals, "vertical");
    std::vector<TwistBand> h, v;
    for (const auto& t : spec.h_intervals) h.push_back(band_of(Axis::Horizontal, t));
    for (const auto& t : spec.v_intervals) v.push_back(band_of(Axis::Vertical, t));
    LinkedTwistSystem sys;
    sys.T_h = PwMap::twist_stage(h);
    sys.T_v = PwMap::twist_stage(v);
    sys.T = sys.T_v.after(sys.T_h);
    std::vector<TwistBand> all = h;
    all.insert(all.end(), v.begin(), v.end());
    sys.M = union_of_bands(all);
    sys.Delta = twist_delta(h, sys.T_h, v);
    return sys;
}

TwistInterval parse_twist_interval(std::string_view text) {
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos || text.size() < 5) throw ParseError("expected '[lo,hi]:m', got '" + std::string(text) + "'");
    std::string_view iv = text.substr(0, colon);
    char open = iv.front(), close = iv.back();
    if ((open != '[' && open != '(') || (close != ']' && close != ')'))
        throw ParseError("interval must be bracketed: '" + std::string(iv) + "'");
    auto comma = iv.find(',');
    if (comma == std::string_view::npos) throw ParseError("interval needs a comma: '" + std::string(iv) + "'");
    Rat lo = Rat::parse(iv.substr(1, comma - 1));
    Rat hi = Rat::parse(iv.substr(comma + 1, iv.size() - comma - 2));
    Rat m = Rat::parse(text.substr(colon + 1));
    if (!m.is_integer()) throw ParseError("twist multiple must be an integer");
    try {
        return {Arc::make(lo, hi, open == '[', close == ']'), m.num().get_si()};
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

// ---------------------------------------------------------------- family A

Rat family_a_p(long z) { return z >= 1 ? Rat(1) - Rat::pow2(-1 - z) : Rat::pow2(z - 2); }

FamilyA build_family_A(long max_level) {
    if (max_level < 0) throw std::invalid_argument("family A: max_level must be >= 0");
    FamilyA a;
    a.max_level = max_level;
    const TwistBand H{Axis::Horizontal, Arc::closed(Rat(1, 4), Rat(3, 4)), Rat(2), Rat(1, 4)};
    const PwMap T_h = PwMap::twist_stage({H});
    for (long m = 0; m <= max_level; ++m) {
        std::vector<TwistBand> v;
        for (long z = -m; z <= m; ++z)
            v.push_back({Axis::Vertical, Arc::closed(family_a_p(z), family_a_p(z + 1)), Rat::pow2(2 + std::labs(z)),
                         family_a_p(z)});
        a.T.push_back(PwMap::twist_stage(v).after(T_h));
        std::vector<TwistBand> all = v;
        all.push_back(H);
        a.M.push_back(union_of_bands(all));
    }

    const TorusPoint origin{ModOne(0, 1), ModOne(0, 1)};
    auto ball_sq = [](long z, long numerator) {  // (numerator * 2^(-|z|-5))^2
        Rat r = Rat(numerator) * Rat::pow2(-std::labs(z) - 5);
        return Quad(r * r);
    };
    TorusRule sigma, sigma_t, tau, tau_U, tau_O, tau_O2;
    tau.level_shift = tau_U.level_shift = tau_O.level_shift = tau_O2.level_shift = 1;
    for (long z = -max_level; z <= max_level; ++z) {
        const PwMap& T = a.T[static_cast<std::size_t>(std::labs(z))];
        sigma.levels[z] = {Region::full(), T};
        sigma_t.levels[z] = {a.M[static_cast<std::size_t>(std::labs(z))], T};
        if (z == max_level) continue;
        tau.levels[z] = {Region::full(), PwMap()};
        tau_U.levels[z] = {Region::complement(Region::ball(origin, ball_sq(z, 1), true)), PwMap()};
        tau_O.levels[z] = {Region::ball(origin, ball_sq(z, 2), false), PwMap()};
        tau_O2.levels[z] = {Region::ball(origin, ball_sq(z, 3), false), PwMap()};
    }
    a.sigma = {"sigma", SpaceKind::TorusLevel, sigma, std::nullopt};
    a.tau = {"tau", SpaceKind::TorusLevel, tau, std::nullopt};
    a.S.name = "family-a-S";
    a.S.F = {{"sigma~", SpaceKind::TorusLevel, sigma_t, std::nullopt},
             {"tau|U", SpaceKind::TorusLevel, tau_U, std::nullopt},
             {"tau|O", SpaceKind::TorusLevel, tau_O, std::nullopt}};
    a.S.Ftilde = {{"sigma", SpaceKind::TorusLevel, sigma, std::string("sigma~")},
                  {"tau", SpaceKind::TorusLevel, tau, std::string("tau|U")},
                  {"tau|O'", SpaceKind::TorusLevel, tau_O2, std::string("tau|O")}};
    return a;
}

// ---------------------------------------------------------------- family B

Rat family_b_l_minus(long n) { return Rat(1) / (Rat(3) * Rat::pow2(1 + n)); }
Rat family_b_r_minus(long n) { return Rat(1) / (Rat(3) * Rat::pow2(n)); }
Rat family_b_l_plus(long n) { return Rat(1) - family_b_r_minus(n); }
Rat family_b_r_plus(long n) { return Rat(1) - family_b_l_minus(n); }

namespace {

std::vector<TwistBand> family_b_vbands(long m, long n_max, bool mutate) {
    std::vector<TwistBand> v{{Axis::Vertical, Arc::closed(Rat(1, 6), Rat(5, 6)), Rat(6), Rat(1, 6)}};
    for (long n = 1; n <= m; ++n) {
        Rat slope = Rat(3) * Rat::pow2(1 + n);
        if (mutate && n == n_max) {
            Rat lo = Rat(1) - family_b_l_minus(n);
            v.push_back({Axis::Vertical, Arc::closed(lo, family_b_r_minus(n)), Rat::pow2(n + 1), lo});
        } else {
            v.push_back({Axis::Vertical, Arc::closed(family_b_l_minus(n), family_b_r_minus(n)), slope,
                         family_b_l_minus(n)});
        }
        v.push_back({Axis::Vertical, Arc::closed(family_b_l_plus(n), family_b_r_plus(n)), slope, family_b_l_plus(n)});
    }
    return v;
}

// Integer key of a point of the 1/side grid; -1 off the grid.
long grid_cell(const TorusPoint& p, long side) {
    const Rat sx = p.x.value() * Rat(side), sy = p.y.value() * Rat(side);
    if (!sx.is_integer() || !sy.is_integer()) return -1;
    return sx.num().get_si() * side + sy.num().get_si();
}

// Grid points of M_n minus every orbit (under T_0..T_n) that meets the
// boundary of H. Each T_m permutes the grid, so forward images close orbits.
std::vector<TorusPoint> family_b_grid_set(const FamilyB& b, long n, long& pruned) {
    const long side = 1L << n;
    std::vector<TorusPoint> grid;
    for (long i = 0; i < side; ++i)
        for (long j = 0; j < side; ++j) {
            TorusPoint p{ModOne(i, side), ModOne(j, side)};
            if (b.M[static_cast<std::size_t>(n)].contains(p)) grid.push_back(p);
        }
    const Rat h_lo(1, 8), h_hi(7, 8);
    std::unordered_set<long> removed;
    std::deque<TorusPoint> todo;
    for (const auto& p : grid)
        if (p.y.value() == h_lo || p.y.value() == h_hi) {
            removed.insert(grid_cell(p, side));
            todo.push_back(p);
        }
    while (!todo.empty()) {
        const TorusPoint p = todo.front();
        todo.pop_front();
        for (long m = 0; m <= n; ++m) {
            TorusPoint q = b.T[static_cast<std::size_t>(m)].apply(p);
            if (removed.insert(grid_cell(q, side)).second) todo.push_back(q);
        }
    }
    std::vector<TorusPoint> out;
    for (const auto& p : grid)
        if (!removed.contains(grid_cell(p, side))) out.push_back(p);
    pruned = static_cast<long>(grid.size() - out.size());
    return out;
}

}  // namespace

DeltaLines family_b_delta_lines(long n) {
    DeltaLines d;
    d.horizontal = {Rat(1, 8), Rat(7, 8)};
    std::vector<Rat> ends{Rat(1, 6), Rat(5, 6)};
    for (long m = 1; m <= n; ++m)
        for (const Rat& e : {family_b_l_minus(m), family_b_r_minus(m), family_b_l_plus(m), family_b_r_plus(m)})
            ends.push_back(e);
    // Inside H the preimage of {x = e} is {x + 6y - 1 = e}.
    for (const auto& e : ends) {
        d.vertical.push_back(e);
        d.slanted.push_back((e + Rat(1)).frac());
    }
    return d;
}

Rat family_b_delta_sq_dist(const DeltaLines& lines, const TorusPoint& p) {
    // Each candidate is (line offset, coordinate functional, 1 / squared norm).
    // A float pass finds the near-minimal candidates; those are compared exactly.
    struct Candidate {
        double approx;
        int family;
        std::size_t index;
    };
    const double xf = p.x.to_double(), yf = p.y.to_double();
    const double slant_f = frac_f(xf + 6.0 * yf);
    std::vector<Candidate> cands;
    auto add = [&](const std::vector<Rat>& offsets, double coord, double scale, int family) {
        for (std::size_t i = 0; i < offsets.size(); ++i) {
            double d = circle_dist_f(coord, offsets[i].to_double());
            cands.push_back({d * d * scale, family, i});
        }
    };
    add(lines.horizontal, yf, 1.0, 0);
    add(lines.vertical, xf, 1.0, 1);
    add(lines.slanted, slant_f, 1.0 / 37.0, 2);
    double floor_f = HUGE_VAL;
    for (const auto& c : cands) floor_f = std::min(floor_f, c.approx);

    const ModOne slant(p.x.value() + Rat(6) * p.y.value());
    std::optional<Rat> best;
    for (const auto& c : cands) {
        if (c.approx > floor_f + 1e-9) continue;
        Rat v;
        if (c.family == 0) {
            Rat d = circle_dist(p.y, ModOne(lines.horizontal[c.index]));
            v = d * d;
        } else if (c.family == 1) {
            Rat d = circle_dist(p.x, ModOne(lines.vertical[c.index]));
            v = d * d;
        } else {
            // Distance to the lattice of lines x + 6y = c + k is |frac-dist| / sqrt(37).
            Rat d = circle_dist(slant, ModOne(lines.slanted[c.index]));
            v = d * d / Rat(37);
        }
        if (!best || v < *best) best = v;
    }
    return *best;
}

namespace {

Quad radius_sq(long k) { return Quad::sqrt2_times(Rat::pow2(-2 * k)); }

// (2^-km +- 2^-kn)^2 sqrt 2 = (r_m +- r_n)^2.
Quad pair_sq(long km, long kn, int sign) {
    Rat s = Rat::pow2(-km) + Rat(sign) * Rat::pow2(-kn);
    return Quad::sqrt2_times(s * s);
}

// Centers of one level, keyed by integer grid coordinates.
struct GridIndex {
    long side = 1;
    std::unordered_set<long> cells;
    std::vector<TorusPoint> points;
};

GridIndex make_index(long level, const std::vector<TorusPoint>& centers) {
    GridIndex idx{1L << level, {}, centers};
    for (const auto& c : centers) idx.cells.insert(grid_cell(c, idx.side));
    return idx;
}

bool separation_ok(const TorusPoint& c, long kn, const GridIndex& idx, long km) {
    const Quad lo = pair_sq(km, kn, -1);
    const Quad hi = pair_sq(km, kn, +1);
    const double lo_f = lo.to_double(), hi_f = hi.to_double(), slack = 1e-9 * hi_f;
    const double cx = c.x.to_double(), cy = c.y.to_double();
    auto violates = [&](const TorusPoint& q) {
        const double d_f = sq_dist_f(cx, cy, q.x.to_double(), q.y.to_double());
        if (d_f < lo_f - slack || d_f > hi_f + slack) return false;
        Quad d(sq_dist(c, q));
        return quad_cmp(lo, d) == std::strong_ordering::less && quad_cmp(d, hi) != std::strong_ordering::greater;
    };
    const double reach = std::sqrt(hi.to_double()) * (1 + 1e-9) + 1e-12;
    const long span = static_cast<long>(std::ceil(reach * static_cast<double>(idx.side))) + 1;
    if ((2 * span + 1) * (2 * span + 1) >= static_cast<long>(idx.points.size()))
        return std::none_of(idx.points.begin(), idx.points.end(), violates);
    const long ci = static_cast<long>(std::floor(c.x.to_double() * static_cast<double>(idx.side)));
    const long cj = static_cast<long>(std::floor(c.y.to_double() * static_cast<double>(idx.side)));
    for (long di = -span; di <= span; ++di)
        for (long dj = -span; dj <= span; ++dj) {
            const long i = ((ci + di) % idx.side + idx.side) % idx.side;
            const long j = ((cj + dj) % idx.side + idx.side) % idx.side;
            if (idx.cells.contains(i * idx.side + j) && violates({ModOne(i, idx.side), ModOne(j, idx.side)}))
                return false;
        }
    return true;
}

}  // namespace

void choose_radii(FamilyB& b, long cap) {
    b.radius_exponent.assign(1, 0);  // Qtilde[0] is empty, r_0^2 = sqrt 2
    b.r_sq.assign(1, radius_sq(0));
    std::vector<GridIndex> index(1);
    for (long n = 1; n <= b.n_max; ++n) {
        const auto& centers = b.Qtilde[static_cast<std::size_t>(n)];
        const DeltaLines lines = family_b_delta_lines(n);
        long k = b.radius_exponent.back() + 1;
        // (i) and (ii) are monotone in the radius: find the first k for them.
        const auto edge = BandUnionComplement::of(b.M[static_cast<std::size_t>(n)]);
        if (!edge) throw UnsupportedRegion("M is not a union of bands");
        for (const auto& c : centers) {
            SqDistance to_edge = edge->sq_dist(c);
            Rat to_delta = family_b_delta_sq_dist(lines, c);
            while (!(to_edge.exceeds(radius_sq(k)) && quad_cmp(Quad(to_delta), radius_sq(k)) == std::strong_ordering::greater)) {
                if (++k > cap) throw RadiusSearchExhausted("no radius found for level " + std::to_string(n));
            }
        }
        // (iii) is checked per candidate.
        for (;; ++k) {
            if (k > cap) throw RadiusSearchExhausted("no radius found for level " + std::to_string(n));
            bool ok = true;
            for (std::size_t i = 0; i < centers.size() && ok; ++i)
                for (long m = 1; m < n && ok; ++m)
                    ok = separation_ok(centers[i], k, index[static_cast<std::size_t>(m)],
                                       b.radius_exponent[static_cast<std::size_t>(m)]);
            if (ok) break;
        }
        b.radius_exponent.push_back(k);
        b.r_sq.push_back(radius_sq(k));
        index.push_back(make_index(n, centers));
    }
}

RadiusCheck verify_radii(const FamilyB& b) {
    RadiusCheck r;
    auto fail = [&](std::string why) {
        if (r.ok) r.failure = std::move(why);
        r.ok = false;
    };
    for (long n = 1; n <= b.n_max; ++n) {
        const Quad rn = b.r_sq[static_cast<std::size_t>(n)];
        if (quad_cmp(rn, b.r_sq[static_cast<std::size_t>(n - 1)]) != std::strong_ordering::less)
            fail("radii not decreasing at " + std::to_string(n));
        const DeltaLines lines = family_b_delta_lines(n);
        for (const auto& c : b.Qtilde[static_cast<std::size_t>(n)]) {
            if (!sq_dist_to_complement(b.M[static_cast<std::size_t>(n)], c).exceeds(rn))
                fail("(i) fails at level " + std::to_string(n) + " center " + torus_key(c));
            if (b.Delta[static_cast<std::size_t>(n)].contains(c) ||
                quad_cmp(Quad(family_b_delta_sq_dist(lines, c)), rn) != std::strong_ordering::greater)
                fail("(ii) fails at level " + std::to_string(n) + " center " + torus_key(c));
            for (long m = 1; m < n; ++m) {
                const long km = b.radius_exponent[static_cast<std::size_t>(m)];
                const long kn = b.radius_exponent[static_cast<std::size_t>(n)];
                const Quad rm_minus = pair_sq(km, kn, -1), rm_plus = pair_sq(km, kn, +1);
                for (const auto& q : b.Qtilde[static_cast<std::size_t>(m)]) {
                    Quad d(sq_dist(c, q));
                    if (quad_cmp(d, rm_minus) == std::strong_ordering::greater &&
                        quad_cmp(d, rm_plus) != std::strong_ordering::greater)
                        fail("(iii) fails between " + torus_key(c) + " and " + torus_key(q));
                }
            }
        }
    }
    return r;
}

FamilyB build_family_B(long n_max, const FamilyBOptions& opts) {
    if (n_max < 1) throw std::invalid_argument("family B: n_max must be >= 1");
    FamilyB b;
    b.n_max = n_max;
    const TwistBand H{Axis::Horizontal, Arc::closed(Rat(1, 8), Rat(7, 8)), Rat(6), Rat(1, 6)};
    b.T_h = PwMap::twist_stage({H});
    for (long m = 0; m <= n_max; ++m) {
        auto v = family_b_vbands(m, n_max, false);
        b.T_v.push_back(PwMap::twist_stage(v));
        b.T.push_back(b.T_v.back().after(b.T_h));
        auto all = v;
        all.push_back(H);
        b.M.push_back(union_of_bands(all));
        b.Delta.push_back(twist_delta({H}, b.T_h, v));
    }

    b.Q.emplace_back();
    b.Qtilde.emplace_back();
    for (long n = 1; n <= n_max; ++n) {
        long pruned = 0;
        b.Q.push_back(family_b_grid_set(b, n, pruned));
        if (pruned > 0)
            b.notes.push_back("level " + std::to_string(n) + ": removed " + std::to_string(pruned) +
                              " grid points whose orbits meet the boundary of H");
        const long side = 1L << n;
        std::unordered_set<long> prev;
        for (const auto& p : b.Q[static_cast<std::size_t>(n - 1)]) prev.insert(grid_cell(p, side));
        std::vector<TorusPoint> fresh;
        for (const auto& p : b.Q.back())
            if (!prev.contains(grid_cell(p, side))) fresh.push_back(p);
        b.Qtilde.push_back(std::move(fresh));
    }

    choose_radii(b, opts.radius_cap);

    std::vector<Region> all_balls;
    for (long n = 0; n <= n_max; ++n) {
        std::vector<Region> balls;
        for (const auto& c : b.Qtilde[static_cast<std::size_t>(n)])
            balls.push_back(Region::ball(c, b.r_sq[static_cast<std::size_t>(n)], true));
        all_balls.insert(all_balls.end(), balls.begin(), balls.end());
        b.U.push_back(Region::unite(std::move(balls)));
        b.V.push_back(Region::unite(all_balls));
    }

    TorusRule f, g;
    g.level_shift = 1;
    for (long n = 0; n <= n_max; ++n) {
        f.levels[n] = {Region::complement(b.Delta[static_cast<std::size_t>(n)]), b.T[static_cast<std::size_t>(n)]};
        if (n < n_max) g.levels[n] = {Region::complement(b.V[static_cast<std::size_t>(n)]), PwMap()};
    }
    b.f = {"f~", SpaceKind::TorusLevel, f, std::nullopt};
    b.g = {"g~", SpaceKind::TorusLevel, g, std::nullopt};

    b.notes.push_back("right bands use [l+, r+]; the printed lower bound l- is taken as a typo");
    b.notes.push_back("Delta includes the preimage of the boundary of V0");
    b.notes.push_back("T_h is discontinuous on the boundary of H; that boundary lies in Delta");
    b.notes.push_back("g~ has empty domain at the top level " + std::to_string(n_max));
    if (opts.mutate_top_band) {
        // Only the top-level map changes; grids and radii stay those of the
        // unmutated system.
        const auto top = static_cast<std::size_t>(n_max);
        auto v = family_b_vbands(n_max, n_max, true);
        b.T_v[top] = PwMap::twist_stage(v);
        b.T[top] = b.T_v[top].after(b.T_h);
        auto all = v;
        all.push_back(H);
        b.M[top] = union_of_bands(all);
        b.Delta[top] = twist_delta({H}, b.T_h, v);
        std::get<TorusRule>(b.f.rule).levels[n_max] = {Region::complement(b.Delta[top]), b.T[top]};
        b.notes.push_back("negative control: top left band mutated to contain x = 0; grids and radii are unmutated");
    }
    return b;
}

// ---------------------------------------------------------------- small systems

Generator build_cat_map() {
    TorusRule r;
    r.levels[0] = {Region::full(), PwMap::affine(Affine2::linear(2, 1, 1, 1))};
    return {"f", SpaceKind::Torus, r, std::nullopt};
}

CompactGenSystem build_boxed_cat_map() {
    const PwMap cat = PwMap::affine(Affine2::linear(2, 1, 1, 1));
    auto box = [](Rat lo, Rat hi) { return Region::box(Arc::open(lo, hi), Arc::open(lo, hi)); };
    TorusRule inner, outer;
    inner.levels[0] = {box(Rat(1, 4), Rat(3, 4)), cat};
    outer.levels[0] = {box(Rat(1, 8), Rat(7, 8)), cat};
    CompactGenSystem sys;
    sys.name = "boxed-cat-map";
    sys.F = {{"f|U", SpaceKind::Torus, inner, std::nullopt}};
    sys.Ftilde = {{"f|U~", SpaceKind::Torus, outer, std::string("f|U")}};
    return sys;
}

std::vector<Generator> build_cantor() {
    return {{"f", SpaceKind::Cantor, CantorRule{CantorRule::Move::Shift}, std::nullopt},
            {"g", SpaceKind::Cantor, CantorRule{CantorRule::Move::Climb}, std::nullopt}};
}

Generator build_line() { return {"t", SpaceKind::Line, TranslationRule{Rat(1)}, std::nullopt}; }

Generator build_identity() {
    TorusRule r;
    r.levels[0] = {Region::full(), PwMap()};
    return {"id", SpaceKind::Torus, r, std::nullopt};
}

// ---------------------------------------------------------------- exports

namespace {

nlohmann::json points_json(const std::vector<TorusPoint>& ps) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : ps) a.push_back(to_json(p));
    return a;
}

nlohmann::json generator_summary(const Generator& g) {
    nlohmann::json j{{"id", g.id}, {"space", to_string(g.space)}};
    if (g.extension_of) j["extension_of"] = *g.extension_of;
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, TorusRule>) {
                j["rule"] = "piecewise_affine";
                j["level_shift"] = r.level_shift;
                nlohmann::json levels = nlohmann::json::array();
                for (const auto& [lv, pm] : r.levels) levels.push_back(lv);
                j["levels"] = levels;
            } else if constexpr (std::is_same_v<T, CantorRule>) {
                j["rule"] = r.move == CantorRule::Move::Shift ? "sequence_shift" : "level_shift";
            } else {
                j["rule"] = "translation";
                j["shift"] = r.shift.str();
            }
        },
        g.rule);
    return j;
}

}  // namespace

nlohmann::json manifest_generators(const std::string& name, const std::vector<Generator>& gens) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& g : gens) arr.push_back(generator_summary(g));
    return {{"name", name}, {"generators", arr}};
}

nlohmann::json manifest_family_b(const FamilyB& b) {
    nlohmann::json levels = nlohmann::json::array();
    for (long n = 0; n <= b.n_max; ++n) {
        const auto i = static_cast<std::size_t>(n);
        nlohmann::json lv{{"n", n},
                          {"Q_size", b.Q[i].size()},
                          {"Qtilde_size", b.Qtilde[i].size()},
                          {"radius_exponent", b.radius_exponent[i]},
                          {"r_sq", to_json(b.r_sq[i])}};
        if (n >= 1) {
            lv["l_minus"] = family_b_l_minus(n).str();
            lv["r_minus"] = family_b_r_minus(n).str();
            lv["l_plus"] = family_b_l_plus(n).str();
            lv["r_plus"] = family_b_r_plus(n).str();
        }
        if (b.Q[i].size() <= 64) lv["Q"] = points_json(b.Q[i]);
        levels.push_back(lv);
    }
    nlohmann::json j = manifest_generators("family-b", b.gens());
    j["parameters"] = {{"n_max", b.n_max}};
    j["H"] = to_json(Arc::closed(Rat(1, 8), Rat(7, 8)));
    j["V0"] = to_json(Arc::closed(Rat(1, 6), Rat(5, 6)));
    j["levels"] = levels;
    j["notes"] = b.notes;
    return j;
}

nlohmann::json manifest_family_a(const FamilyA& a) {
    nlohmann::json p = nlohmann::json::object();
    for (long z = -a.max_level; z <= a.max_level + 1; ++z) p[std::to_string(z)] = family_a_p(z).str();
    nlohmann::json j = manifest_generators("family-a", a.group());
    j["parameters"] = {{"max_level", a.max_level}};
    j["p"] = p;
    j["S"] = manifest_generators(a.S.name, a.S.F);
    j["S_extensions"] = manifest_generators(a.S.name, a.S.Ftilde);
    return j;
}

nlohmann::json manifest_linked_twist(const LinkedTwistSpec& spec, const LinkedTwistSystem& sys) {
    auto list = [](const std::vector<TwistInterval>& ts) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& t : ts) a.push_back({{"arc", to_json(t.arc)}, {"multiple", t.multiple}});
        return a;
    };
    return {{"name", "linked-twist"},
            {"h_intervals", list(spec.h_intervals)},
            {"v_intervals", list(spec.v_intervals)},
            {"T", to_json(sys.T)},
            {"M", to_json(sys.M)},
            {"Delta", to_json(sys.Delta)}};
}

std::string family_b_q_csv(const FamilyB& b) {
    std::ostringstream os;
    os << "n,set,x,y\n";
    for (long n = 1; n <= b.n_max; ++n) {
        for (const auto& p : b.Q[static_cast<std::size_t>(n)])
            os << n << ",Q," << p.x.value().str() << ',' << p.y.value().str() << '\n';
        for (const auto& p : b.Qtilde[static_cast<std::size_t>(n)])
            os << n << ",Qtilde," << p.x.value().str() << ',' << p.y.value().str() << '\n';
    }
    return os.str();
}

}  // namespace pdyn
