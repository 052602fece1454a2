#include <doctest.h>

#include <cmath>
#include <optional>
#include <random>

#include "pseudodyn/exact.hpp"

using namespace pdyn;

namespace {

TorusPoint pt(long xn, long xd, long yn, long yd) { return {ModOne(xn, xd), ModOne(yn, yd)}; }

// Brute-force oracle: min over the nine integer shifts of the lifted difference.
Rat sq_dist_oracle(const TorusPoint& p, const TorusPoint& q) {
    Rat dx = p.x.value() - q.x.value();
    Rat dy = p.y.value() - q.y.value();
    std::optional<Rat> best;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
            Rat ex = dx + Rat(i), ey = dy + Rat(j);
            Rat v = ex * ex + ey * ey;
            if (!best || v < *best) best = v;
        }
    return *best;
}

}  // namespace

TEST_CASE("Rat normalizes and parses") {
    CHECK(Rat(2, 4) == Rat(1, 2));
    CHECK(Rat(3, -6) == Rat(-1, 2));
    CHECK(Rat(3, -6).den() == 2);
    CHECK(Rat::parse("-6/8") == Rat(-3, 4));
    CHECK(Rat::parse("5") == Rat(5));
    CHECK(Rat(7).str() == "7/1");
    CHECK_THROWS_AS(Rat::parse("1/0"), ParseError);
    CHECK_THROWS_AS(Rat::parse("1.5"), ParseError);
    CHECK_THROWS_AS(Rat::parse("1/-2"), ParseError);
    CHECK_THROWS_AS(Rat(1) / Rat(0), std::domain_error);
    CHECK(Rat::pow2(-3) == Rat(1, 8));
    CHECK(Rat::pow2(4) == Rat(16));
    CHECK(Rat(-1, 4).frac() == Rat(3, 4));
    CHECK(Rat(-1, 4).floor() == -1);
}

TEST_CASE("ModOne wraps") {
    CHECK(ModOne(Rat(5, 4)).value() == Rat(1, 4));
    CHECK(ModOne(Rat(-1, 3)).value() == Rat(2, 3));
    CHECK((ModOne(3, 4) + ModOne(1, 2)).value() == Rat(1, 4));
    CHECK((ModOne(1, 4) - ModOne(1, 2)).value() == Rat(3, 4));
}

TEST_CASE("sq_dist examples") {
    CHECK(sq_dist(pt(0, 1, 0, 1), pt(0, 1, 0, 1)) == Rat(0));
    CHECK(sq_dist(pt(0, 1, 0, 1), pt(1, 2, 1, 2)) == Rat(1, 2));
    CHECK(sq_dist(pt(0, 1, 0, 1), pt(3, 4, 0, 1)) == Rat(1, 16));
}

TEST_CASE("quad_cmp examples") {
    CHECK(quad_cmp(Quad(1), Quad(Rat(0), Rat(1))) == std::strong_ordering::less);
    CHECK(quad_cmp(Quad(3), Quad(Rat(0), Rat(2))) == std::strong_ordering::greater);
    CHECK(quad_cmp(Quad(0), Quad(0)) == std::strong_ordering::equal);
    CHECK(Quad(Rat(-3), Rat(2)).sign() == -1);  // -3 + 2.83
    CHECK(Quad(Rat(3), Rat(-2)).sign() == 1);
    CHECK(Quad(Rat(-1), Rat(1)).sign() == 1);
}

TEST_CASE("ball_test examples") {
    Quad r_sq = Quad::sqrt2_times(Rat(1, 16));
    TorusPoint origin = pt(0, 1, 0, 1);
    CHECK(ball_test(origin, origin, r_sq, false));
    CHECK(ball_test(pt(1, 4, 0, 1), origin, r_sq, false));
    CHECK_FALSE(ball_test(pt(1, 2, 0, 1), origin, r_sq, false));
    // Boundary point of a rational-radius ball.
    CHECK(ball_test(pt(1, 4, 0, 1), origin, Quad(Rat(1, 16)), true));
    CHECK_FALSE(ball_test(pt(1, 4, 0, 1), origin, Quad(Rat(1, 16)), false));
}

TEST_CASE("property: sq_dist symmetric, nonnegative, matches shift oracle") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> num(-200, 200), den(1, 97);
    for (int i = 0; i < 1000; ++i) {
        TorusPoint p = pt(num(rng), den(rng), num(rng), den(rng));
        TorusPoint q = pt(num(rng), den(rng), num(rng), den(rng));
        Rat d = sq_dist(p, q);
        CHECK(d == sq_dist(q, p));
        CHECK(d.sign() >= 0);
        CHECK((d.is_zero() == (p == q)));
        CHECK(d == sq_dist_oracle(p, q));
    }
}

TEST_CASE("property: triangle inequality") {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<long> num(0, 1000);
    for (int i = 0; i < 1000; ++i) {
        TorusPoint p = pt(num(rng), 1000, num(rng), 1000);
        TorusPoint q = pt(num(rng), 1000, num(rng), 1000);
        TorusPoint r = pt(num(rng), 1000, num(rng), 1000);
        double lhs = sq_dist(p, r).to_double();
        double rhs = std::pow(std::sqrt(sq_dist(p, q).to_double()) + std::sqrt(sq_dist(q, r).to_double()), 2);
        CHECK(lhs <= rhs + 1e-12);
    }
}

TEST_CASE("property: quad_cmp agrees with floating evaluation") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<long> num(-10000, 10000), den(1, 500);
    int checked = 0;
    for (int i = 0; i < 10000; ++i) {
        Quad u(Rat(num(rng), den(rng)), Rat(num(rng), den(rng)));
        double v = u.to_double();
        if (std::fabs(v) <= 1e-6) continue;
        ++checked;
        CHECK(u.sign() == (v > 0 ? 1 : -1));
    }
    CHECK(checked > 9000);
}

TEST_CASE("property: a rational never equals a quad with irrational part") {
    std::mt19937_64 rng(14);
    std::uniform_int_distribution<long> num(-1000, 1000), den(1, 100);
    for (int i = 0; i < 1000; ++i) {
        Rat b(num(rng), den(rng));
        if (b.is_zero()) continue;
        Quad q(Rat(num(rng), den(rng)), b);
        Rat r(num(rng), den(rng));
        CHECK(quad_cmp(Quad(r), q) != std::strong_ordering::equal);
        // Squares of (a + b sqrt2) are rational only when a*b = 0.
        Quad sq = q * q;
        CHECK(sq.is_rational() == q.a().is_zero());
    }
}
