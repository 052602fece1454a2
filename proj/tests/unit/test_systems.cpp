#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "pseudodyn/systems.hpp"

using namespace pdyn;

namespace {

TorusPoint pt(const Rat& x, const Rat& y) { return {ModOne(x), ModOne(y)}; }

std::set<std::string> keys(const std::vector<TorusPoint>& ps) {
    std::set<std::string> out;
    for (const auto& p : ps) out.insert(point_key(p));
    return out;
}

const FamilyB& family_b4() {
    static const FamilyB b = build_family_B(4);
    return b;
}

}  // namespace

TEST_CASE("linked twist builder") {
    LinkedTwistSpec one{{parse_twist_interval("[1/4,3/4]:1")}, {}};
    LinkedTwistSystem s = build_linked_twist(one);
    CHECK(s.T.apply(pt(Rat(0), Rat(1, 2))) == pt(Rat(1, 2), Rat(1, 2)));

    LinkedTwistSystem empty = build_linked_twist({});
    CHECK(empty.T.is_identity());
    CHECK(empty.M.is_empty());

    LinkedTwistSystem a = build_linked_twist({{parse_twist_interval("[1/4,3/4]:1")}, {}});
    CHECK(a.T_h.apply(pt(Rat(0), Rat(3, 4))) == pt(Rat(0), Rat(3, 4)));

    CHECK_THROWS_AS(build_linked_twist({{parse_twist_interval("[0,1/2]:1"), parse_twist_interval("[1/4,3/4]:1")}, {}}),
                    OverlappingIntervals);
    CHECK_NOTHROW(build_linked_twist({{parse_twist_interval("[0,1/2]:1"), parse_twist_interval("[1/2,3/4]:1")}, {}}));
    CHECK_THROWS_AS(parse_twist_interval("1/4,3/4:1"), ParseError);
    CHECK_THROWS_AS(parse_twist_interval("[1/4,3/4]:1/2"), ParseError);

    TwistInterval half_open = parse_twist_interval("(1/8,7/8]:2");
    CHECK_FALSE(half_open.arc.contains(ModOne(1, 8)));
    CHECK(half_open.arc.contains(ModOne(7, 8)));
}

TEST_CASE("linked twist Delta matches the boundary lines") {
    LinkedTwistSpec spec{{parse_twist_interval("[1/8,7/8]:3")}, {parse_twist_interval("[1/6,5/6]:1")}};
    LinkedTwistSystem s = build_linked_twist(spec);
    CHECK(s.Delta.contains(pt(Rat(1, 3), Rat(1, 8))));
    CHECK(s.Delta.contains(pt(Rat(1, 6), Rat(0))));
    // inside H: T_h(x, y) = (x + 4 (y - 1/8), y), so (1/3, 1/2) lands on x = 5/6
    TorusPoint on = pt(Rat(1, 3), Rat(1, 2));
    CHECK(s.T_h.apply(on).x == ModOne(5, 6));
    CHECK(s.Delta.contains(on));
    CHECK_FALSE(s.Delta.contains(pt(Rat(1, 4), Rat(1, 2))));
    CHECK_FALSE(s.Delta.contains(pt(Rat(1, 6), Rat(1, 2))));
}

TEST_CASE("family A constants and maps") {
    CHECK(family_a_p(0) == Rat(1, 4));
    CHECK(family_a_p(1) == Rat(3, 4));
    CHECK(family_a_p(-1) == Rat(1, 8));
    CHECK(family_a_p(2) == Rat(7, 8));
    FamilyA a = build_family_A(3);
    CHECK(a.T[0].apply(pt(Rat(0), Rat(3, 4))) == pt(Rat(0), Rat(3, 4)));
    CHECK(a.T[0].apply(pt(Rat(0), Rat(1, 2))) == pt(Rat(1, 2), Rat(1, 2)));
    for (long m = 0; m <= 3; ++m) {
        CHECK_FALSE(a.M[static_cast<std::size_t>(m)].contains(pt(Rat(0), Rat(0))));
        SqDistance d = sq_dist_to(a.M[static_cast<std::size_t>(m)], pt(Rat(0), Rat(0)));
        REQUIRE(d.exact);
        Rat r = Rat::pow2(-m - 2);
        CHECK(*d.exact == Quad(r * r));
    }
    // complement of the union is {0} x ([0,1/4) u (3/4,1])
    const Region& M3 = a.M[3];
    CHECK_FALSE(M3.contains(pt(Rat(0), Rat(1, 5))));
    CHECK(M3.contains(pt(Rat(0), Rat(1, 2))));
    CHECK(M3.contains(pt(Rat(1, 2), Rat(0))));
    auto q = apply_generator(a.sigma, 1, TorusLevelPoint{pt(Rat(0), Rat(0)), -2});
    REQUIRE(q);
    CHECK(std::get<TorusLevelPoint>(*q) == TorusLevelPoint{pt(Rat(0), Rat(0)), -2});
    auto up = apply_generator(a.tau, 1, TorusLevelPoint{pt(Rat(1, 3), Rat(0)), -3});
    REQUIRE(up);
    CHECK(std::get<TorusLevelPoint>(*up).level == -2);
    CHECK_FALSE(apply_generator(a.tau, 1, TorusLevelPoint{pt(Rat(1, 3), Rat(0)), 3}));
}

TEST_CASE("family A: sigma and tau do not commute") {
    // tau then sigma uses T at the shifted level; witness where they differ.
    FamilyA a = build_family_A(3);
    TorusLevelPoint p{pt(Rat(3, 16), Rat(0)), 0};
    auto ts = apply_generator(a.sigma, 1, *apply_generator(a.tau, 1, p));
    auto st = apply_generator(a.tau, 1, *apply_generator(a.sigma, 1, p));
    REQUIRE(ts);
    REQUIRE(st);
    CHECK(*ts != *st);
}

TEST_CASE("family B constants and Q_1") {
    CHECK(family_b_l_minus(1) == Rat(1, 12));
    CHECK(family_b_r_minus(1) == Rat(1, 6));
    CHECK(family_b_l_plus(1) == Rat(5, 6));
    CHECK(family_b_r_plus(1) == Rat(11, 12));
    const FamilyB& b = family_b4();
    CHECK(keys(b.Q[1]) == keys({pt(Rat(0), Rat(1, 2)), pt(Rat(1, 2), Rat(1, 2)), pt(Rat(1, 2), Rat(0))}));
    for (const auto& p : b.Q[1]) CHECK(b.T[1].apply(p) == p);
    CHECK(b.Qtilde[0].empty());
    CHECK(b.r_sq[0] == Quad::sqrt2_times(Rat(1)));
}

TEST_CASE("family B: Q_n invariance, nesting and avoidance of Delta") {
    const FamilyB& b = family_b4();
    for (long n = 1; n <= 4; ++n) {
        const auto& Q = b.Q[static_cast<std::size_t>(n)];
        const auto& Qt = b.Qtilde[static_cast<std::size_t>(n)];
        auto base = keys(Q);
        for (long m = 0; m <= 4; ++m) {
            std::vector<TorusPoint> img, img_t;
            for (const auto& p : Q) img.push_back(b.T[static_cast<std::size_t>(m)].apply(p));
            for (const auto& p : Qt) img_t.push_back(b.T[static_cast<std::size_t>(m)].apply(p));
            CHECK(keys(img) == base);
            CHECK(keys(img_t) == keys(Qt));
        }
        auto prev = keys(b.Q[static_cast<std::size_t>(n - 1)]);
        CHECK(std::includes(base.begin(), base.end(), prev.begin(), prev.end()));
        for (const auto& p : Q) {
            CHECK(b.M[static_cast<std::size_t>(n)].contains(p));
            CHECK_FALSE(b.Delta[static_cast<std::size_t>(n)].contains(p));
        }
    }
}

TEST_CASE("family B: T_m preserves M_m on the 2^-8 grid and is injective") {
    const FamilyB& b = family_b4();
    for (long m : {1L, 3L}) {
        const PwMap& T = b.T[static_cast<std::size_t>(m)];
        const Region& M = b.M[static_cast<std::size_t>(m)];
        for (long i = 0; i < 256; i += 3)
            for (long j = 0; j < 256; j += 5) {
                TorusPoint p = pt(Rat(i, 256), Rat(j, 256));
                REQUIRE(M.contains(T.apply(p)) == M.contains(p));
                auto back = T.apply_inverse(p);
                REQUIRE(back);
                REQUIRE(M.contains(*back) == M.contains(p));
            }
    }
    std::mt19937_64 rng(77);
    std::set<std::string> seen;
    std::set<std::string> images;
    for (int i = 0; i < 10000; ++i) {
        TorusPoint p = pt(Rat(static_cast<long>(rng() % 4099), 4099), Rat(static_cast<long>(rng() % 4099), 4099));
        if (!seen.insert(point_key(p)).second) continue;
        TorusPoint q = b.T[4].apply(p);
        REQUIRE(images.insert(point_key(q)).second);
        REQUIRE(*b.T[4].apply_inverse(q) == p);
    }
}

TEST_CASE("family B radii") {
    const FamilyB& b = family_b4();
    for (long n = 1; n <= 4; ++n) {
        CHECK(b.radius_exponent[static_cast<std::size_t>(n)] > b.radius_exponent[static_cast<std::size_t>(n - 1)]);
        CHECK(quad_cmp(b.r_sq[static_cast<std::size_t>(n)], b.r_sq[static_cast<std::size_t>(n - 1)]) ==
              std::strong_ordering::less);
        CHECK_FALSE(b.r_sq[static_cast<std::size_t>(n)].is_rational());
    }
    RadiusCheck rc = verify_radii(b);
    CHECK_MESSAGE(rc.ok, rc.failure);

    // (ii) distance to Delta via lines agrees with direct point tests
    DeltaLines lines = family_b_delta_lines(1);
    CHECK(family_b_delta_sq_dist(lines, pt(Rat(1, 6), Rat(0))) == Rat(0));
    CHECK(family_b_delta_sq_dist(lines, pt(Rat(1, 2), Rat(1, 8))) == Rat(0));
    for (const auto& c : b.Qtilde[1]) CHECK(family_b_delta_sq_dist(lines, c) > Rat(0));
}

TEST_CASE("family B: radius checker rejects a corrupted radius") {
    FamilyB b = build_family_B(2);
    b.r_sq[1] = Quad::sqrt2_times(Rat(1, 4));
    CHECK_FALSE(verify_radii(b).ok);
}

TEST_CASE("family B generators") {
    const FamilyB& b = family_b4();
    // g~ climbs from (0,0) while (0,0) stays away from every ball
    SpacePoint origin = TorusLevelPoint{pt(Rat(0), Rat(0)), 0};
    for (long n = 0; n < 4; ++n) {
        auto q = apply_generator(b.g, 1, TorusLevelPoint{pt(Rat(0), Rat(0)), n});
        REQUIRE(q);
        CHECK(level_of(*q) == n + 1);
    }
    CHECK_FALSE(apply_generator(b.g, 1, TorusLevelPoint{pt(Rat(0), Rat(0)), 4}));
    auto f0 = apply_generator(b.f, 1, origin);
    REQUIRE(f0);
    CHECK(*f0 == origin);
    // f~ is undefined on Delta
    CHECK_FALSE(apply_generator(b.f, 1, TorusLevelPoint{pt(Rat(1, 2), Rat(1, 8)), 1}));
    // g~ is undefined at the centers
    for (long n = 1; n <= 4; ++n)
        for (const auto& c : b.Qtilde[static_cast<std::size_t>(n)])
            CHECK_FALSE(apply_generator(b.g, 1, TorusLevelPoint{c, n}));
}

TEST_CASE("negative control mutates the top band") {
    FamilyBOptions opts;
    opts.mutate_top_band = true;
    FamilyB b = build_family_B(2, opts);
    CHECK(b.M[2].contains(pt(Rat(0), Rat(0))));
    CHECK_FALSE(b.M[1].contains(pt(Rat(0), Rat(0))));
    CHECK(b.T[2].local_affine(pt(Rat(0), Rat(0))).m[2] != Rat(0));
}

TEST_CASE("small systems and manifests") {
    Generator cat = build_cat_map();
    const auto& rule = std::get<TorusRule>(cat.rule);
    CHECK(rule.levels.at(0).map.local_affine(pt(Rat(0), Rat(0))).det() == Rat(1));

    auto cantor = build_cantor();
    SpacePoint p = CantorPoint{0, BiSeq::zeros()};
    for (long n = 1; n <= 12; ++n) {
        auto q = apply_generator(cantor[1], 1, p);
        REQUIRE(q);
        CHECK(level_of(*q) == n);
        p = *q;
    }

    std::vector<Generator> line{build_line()};
    OrbitBounds bounds;
    bounds.max_depth = 10;
    OrbitGraph g = orbit_bfs(line, LinePoint{Rat(0)}, bounds);
    int inside = 0;
    for (const auto& n : g.nodes) {
        const Rat& t = std::get<LinePoint>(n).t;
        if (Rat(0) < t && t < Rat(3, 2)) {
            CHECK(t == Rat(1));
            ++inside;
        }
    }
    CHECK(inside == 1);

    const FamilyB& b = family_b4();
    auto j = manifest_family_b(b);
    CHECK(j["parameters"]["n_max"] == 4);
    CHECK(j["levels"].size() == 5);
    CHECK(j["levels"][1]["Q"].size() == 3);
    std::string csv = family_b_q_csv(b);
    CHECK(csv.rfind("n,set,x,y\n", 0) == 0);
    CHECK(manifest_family_a(build_family_A(2))["generators"].size() == 2);
}
