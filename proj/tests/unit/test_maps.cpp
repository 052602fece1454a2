#include <doctest.h>

#include <random>

#include "pseudodyn/maps.hpp"

using namespace pdyn;

namespace {

TorusPoint pt(const Rat& x, const Rat& y) { return {ModOne(x), ModOne(y)}; }

TorusPoint random_point(std::mt19937_64& rng, long den = 997) {
    return pt(Rat(static_cast<long>(rng() % den), den), Rat(static_cast<long>(rng() % den), den));
}

PwMap cat_map() { return PwMap::affine(Affine2::linear(2, 1, 1, 1)); }

// Level-one twist pair of the two-band-direction family.
PwMap level_one_Th() {
    return PwMap::twist_stage({{Axis::Horizontal, Arc::closed(Rat(1, 8), Rat(7, 8)), Rat(6), Rat(1, 6)}});
}
PwMap level_one_Tv() {
    return PwMap::twist_stage({
        {Axis::Vertical, Arc::closed(Rat(1, 6), Rat(5, 6)), Rat(6), Rat(1, 6)},
        {Axis::Vertical, Arc::closed(Rat(1, 12), Rat(1, 6)), Rat(12), Rat(1, 12)},
        {Axis::Vertical, Arc::closed(Rat(5, 6), Rat(11, 12)), Rat(12), Rat(5, 6)},
    });
}

// Direct formula for T_1 = T_v o T_h.
TorusPoint level_one_formula(const TorusPoint& p) {
    Rat x = p.x.value(), y = p.y.value();
    if (Rat(1, 8) <= y && y <= Rat(7, 8)) x = (x + Rat(6) * (y - Rat(1, 6))).frac();
    if (Rat(1, 6) <= x && x <= Rat(5, 6)) y = y + Rat(6) * (x - Rat(1, 6));
    else if (Rat(1, 12) <= x && x <= Rat(1, 6)) y = y + Rat(12) * (x - Rat(1, 12));
    else if (Rat(5, 6) <= x && x <= Rat(11, 12)) y = y + Rat(12) * (x - Rat(5, 6));
    return pt(x, y);
}

}  // namespace

TEST_CASE("cat map evaluation and inverse matrix") {
    PwMap f = cat_map();
    CHECK(f.apply(pt(Rat(1, 2), Rat(1, 2))) == pt(Rat(1, 2), Rat(0)));
    Affine2 inv = Affine2::linear(2, 1, 1, 1).inverse();
    CHECK(inv.m[0] == Rat(1));
    CHECK(inv.m[1] == Rat(-1));
    CHECK(inv.m[2] == Rat(-1));
    CHECK(inv.m[3] == Rat(2));
    CHECK(Affine2::linear(2, 1, 1, 1).det() == Rat(1));
}

TEST_CASE("twist stage with a single band") {
    // phi(t) = (t - 1/4) / (1/2) across [1/4, 3/4], multiple 1.
    PwMap t = PwMap::twist_stage({{Axis::Horizontal, Arc::closed(Rat(1, 4), Rat(3, 4)), Rat(2), Rat(1, 4)}});
    CHECK(t.apply(pt(Rat(0), Rat(1, 2))) == pt(Rat(1, 2), Rat(1, 2)));
    CHECK(t.apply(pt(Rat(0), Rat(3, 4))) == pt(Rat(0), Rat(3, 4)));
    CHECK(t.apply(pt(Rat(1, 3), Rat(0))) == pt(Rat(1, 3), Rat(0)));
}

TEST_CASE("property: exact inverse round trip") {
    std::mt19937_64 rng(5);
    PwMap T = level_one_Tv().after(level_one_Th());
    for (const PwMap& m : {cat_map(), level_one_Th(), level_one_Tv(), T}) {
        for (int i = 0; i < 1000; ++i) {
            TorusPoint p = random_point(rng);
            auto back = m.apply_inverse(m.apply(p));
            REQUIRE(back.has_value());
            REQUIRE(*back == p);
        }
    }
}

TEST_CASE("composition of the twists equals the level-one formula") {
    std::mt19937_64 rng(17);
    PwMap T = compose({Region::full(), level_one_Tv()}, {Region::full(), level_one_Th()}).map;
    for (int i = 0; i < 1000; ++i) {
        TorusPoint p = random_point(rng, 1009);
        REQUIRE(T.apply(p) == level_one_formula(p));
    }
}

TEST_CASE("property: composition domain law") {
    std::mt19937_64 rng(23);
    const Region A = Region::box(Arc::open(Rat(1, 8), Rat(5, 8)), Arc::open(Rat(1, 4), Rat(7, 8)));
    const Region B = Region::band(Axis::Vertical, Arc::closed(Rat(1, 3), Rat(2, 3)));
    PartialMap f{A, level_one_Th()};
    PartialMap g{B, cat_map()};
    PartialMap gf = compose(g, f);
    for (int i = 0; i < 1000; ++i) {
        TorusPoint p = random_point(rng);
        auto fp = f.apply(p);
        bool expected = fp && g.domain.contains(*fp);
        REQUIRE(gf.domain.contains(p) == expected);
        if (expected) REQUIRE(*gf.apply(p) == *g.apply(*fp));
    }
}

TEST_CASE("restrict then compose with the inverse is the identity") {
    std::mt19937_64 rng(29);
    const Region box = Region::box(Arc::open(Rat(1, 5), Rat(4, 5)), Arc::open(Rat(1, 5), Rat(4, 5)));
    PartialMap f = restrict({Region::full(), cat_map()}, box);
    PartialMap id = compose(invert(f), f);
    for (int i = 0; i < 1000; ++i) {
        TorusPoint p = random_point(rng);
        REQUIRE(id.domain.contains(p) == box.contains(p));
        if (box.contains(p)) REQUIRE(*id.apply(p) == p);
    }
}

TEST_CASE("preimage through a piecewise map") {
    PwMap th = level_one_Th();
    Region line = Region::band(Axis::Vertical, Arc::point(Rat(1, 6)));
    Region pre = th.preimage(line);
    // Inside H the line x = 1/6 pulls back to x + 6y = 1/6 + 1.
    CHECK(pre.contains(pt(Rat(1, 6) - Rat(6, 4) + Rat(2), Rat(1, 4))));
    CHECK(pre.contains(pt(Rat(1, 6), Rat(0))));
    CHECK_FALSE(pre.contains(pt(Rat(1, 6), Rat(1, 4))));
}

TEST_CASE("combine: disjoint, compatible and conflicting maps") {
    const Region A = Region::box(Arc::open(Rat(0), Rat(1, 4)), Arc::open(Rat(0), Rat(1, 4)));
    const Region B = Region::box(Arc::open(Rat(1, 2), Rat(3, 4)), Arc::open(Rat(1, 2), Rat(3, 4)));
    PartialMap u = combine({{A, cat_map()}, {B, cat_map()}});
    CHECK(u.domain.contains(pt(Rat(1, 8), Rat(1, 8))));
    CHECK(u.domain.contains(pt(Rat(5, 8), Rat(5, 8))));
    CHECK_FALSE(u.domain.contains(pt(Rat(3, 8), Rat(3, 8))));
    CHECK(*u.apply(pt(Rat(5, 8), Rat(5, 8))) == cat_map().apply(pt(Rat(5, 8), Rat(5, 8))));

    // identity near a point combined with a twist elsewhere
    const Region ball = Region::ball(pt(Rat(1, 2), Rat(1, 2)), Quad(Rat(1, 100)), false);
    const Region far = Region::box(Arc::open(Rat(0), Rat(1, 8)), Arc::open(Rat(0), Rat(1, 8)));
    PartialMap h = combine({{ball, PwMap()}, {far, cat_map()}});
    CHECK(*h.apply(pt(Rat(1, 2), Rat(1, 2))) == pt(Rat(1, 2), Rat(1, 2)));
    CHECK(*h.apply(pt(Rat(1, 16), Rat(1, 32))) == cat_map().apply(pt(Rat(1, 16), Rat(1, 32))));

    const Region C = Region::box(Arc::open(Rat(1, 8), Rat(5, 8)), Arc::open(Rat(1, 8), Rat(5, 8)));
    const Region D = Region::box(Arc::open(Rat(3, 8), Rat(7, 8)), Arc::open(Rat(3, 8), Rat(7, 8)));
    try {
        combine({{C, PwMap()}, {D, cat_map()}});
        FAIL("expected CompatibilityError");
    } catch (const CompatibilityError& e) {
        CHECK(C.contains(e.witness));
        CHECK(D.contains(e.witness));
        CHECK(e.image_a == e.witness);
        CHECK(e.image_b == cat_map().apply(e.witness));
        CHECK(e.image_a != e.image_b);
    }
}

TEST_CASE("property: combine compatibility") {
    // Restrictions of one map to random boxes always combine, and agree with it.
    std::mt19937_64 rng(31);
    PwMap T = level_one_Tv().after(level_one_Th());
    auto arc = [&]() {
        long a = static_cast<long>(rng() % 15), b = a + 1 + static_cast<long>(rng() % (16 - a - 1 + 1));
        return Arc::open(Rat(a, 16), Rat(std::min(b, 16L), 16));
    };
    for (int trial = 0; trial < 100; ++trial) {
        Region r1 = Region::box(arc(), arc()), r2 = Region::box(arc(), arc());
        PartialMap c = combine({{r1, T}, {r2, T}});
        for (int i = 0; i < 10; ++i) {
            TorusPoint p = random_point(rng);
            REQUIRE(c.domain.contains(p) == (r1.contains(p) || r2.contains(p)));
            if (c.domain.contains(p)) REQUIRE(*c.apply(p) == T.apply(p));
        }
    }
}

TEST_CASE("property: exact and float evaluation agree away from boundaries") {
    std::mt19937_64 rng(37);
    PwMap T = level_one_Tv().after(level_one_Th());
    int checked = 0;
    for (int i = 0; i < 10000; ++i) {
        TorusPoint p = random_point(rng, 100003);
        double x = p.x.to_double(), y = p.y.to_double();
        // Skip points near the band edges, before or after the horizontal stage.
        auto near = [](double v, std::initializer_list<double> edges) {
            for (double e : edges)
                if (std::abs(v - e) < 1e-6) return true;
            return false;
        };
        if (near(y, {1.0 / 8, 7.0 / 8})) continue;
        TorusPoint mid = level_one_Th().apply(p);
        if (near(mid.x.to_double(), {1.0 / 12, 1.0 / 6, 5.0 / 6, 11.0 / 12})) continue;
        T.apply_f(x, y);
        TorusPoint q = T.apply(p);
        REQUIRE(circle_dist_f(x, q.x.to_double()) < 1e-9);
        REQUIRE(circle_dist_f(y, q.y.to_double()) < 1e-9);
        ++checked;
    }
    CHECK(checked > 9900);
}

TEST_CASE("inverse map and flatten") {
    std::mt19937_64 rng(41);
    PwMap T = level_one_Tv().after(level_one_Th());
    PwMap inv = T.inverse();
    PwMap single = PwMap({T.flatten()});
    for (int i = 0; i < 500; ++i) {
        TorusPoint p = random_point(rng);
        REQUIRE(inv.apply(T.apply(p)) == p);
        REQUIRE(single.apply(p) == T.apply(p));
    }
    CHECK(to_json(T).size() == 2);
}
