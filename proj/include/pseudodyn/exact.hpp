#pragma once

// Exact scalar and point arithmetic on the flat torus.
//
// Rat is an arbitrary precision rational (GMP backed). Quad is an element
// a + b*sqrt(2) of Q(sqrt 2); it carries squared radii so that ball tests
// against rational points stay exact. No square root is ever extracted on
// the exact path.

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace pdyn {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Rat {
public:
    Rat() = default;
    Rat(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
    Rat(int v) : q_(v) {}   // NOLINT(google-explicit-constructor)
    Rat(long num, long den);
    explicit Rat(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

    /// Parses "p/q" or "p" (decimal integers, optional leading '-').
    static Rat parse(std::string_view text);
    /// 2^e for any integer e.
    static Rat pow2(long e);

    const mpq_class& raw() const { return q_; }
    mpz_class num() const { return q_.get_num(); }
    mpz_class den() const { return q_.get_den(); }

    int sign() const { return sgn(q_); }
    bool is_zero() const { return sgn(q_) == 0; }
    bool is_integer() const { return q_.get_den() == 1; }
    double to_double() const { return q_.get_d(); }

    /// Largest integer <= value.
    mpz_class floor() const;
    /// value - floor(value), in [0,1).
    Rat frac() const;
    Rat abs() const { return Rat(::abs(q_)); }

    /// Always "p/q", also for integers ("3/1"), so the format is fixed.
    std::string str() const;

    Rat operator-() const { return Rat(mpq_class(-q_)); }
    friend Rat operator+(const Rat& a, const Rat& b) { return Rat(mpq_class(a.q_ + b.q_)); }
    friend Rat operator-(const Rat& a, const Rat& b) { return Rat(mpq_class(a.q_ - b.q_)); }
    friend Rat operator*(const Rat& a, const Rat& b) { return Rat(mpq_class(a.q_ * b.q_)); }
    friend Rat operator/(const Rat& a, const Rat& b);
    Rat& operator+=(const Rat& o) { q_ += o.q_; return *this; }
    Rat& operator-=(const Rat& o) { q_ -= o.q_; return *this; }
    Rat& operator*=(const Rat& o) { q_ *= o.q_; return *this; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.q_ == b.q_; }
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
        int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

private:
    mpq_class q_;
};

std::ostream& operator<<(std::ostream& os, const Rat& r);

inline Rat min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

/// A coordinate on R/Z, stored as its representative in [0,1).
class ModOne {
public:
    ModOne() = default;
    ModOne(const Rat& r) : v_(r.frac()) {}  // NOLINT(google-explicit-constructor)
    ModOne(long num, long den) : v_(Rat(num, den).frac()) {}

    const Rat& value() const { return v_; }
    double to_double() const { return v_.to_double(); }

    friend ModOne operator+(const ModOne& a, const ModOne& b) { return ModOne(a.v_ + b.v_); }
    friend ModOne operator-(const ModOne& a, const ModOne& b) { return ModOne(a.v_ - b.v_); }
    friend bool operator==(const ModOne&, const ModOne&) = default;
    friend auto operator<=>(const ModOne& a, const ModOne& b) { return a.v_ <=> b.v_; }

private:
    Rat v_;
};

/// a + b*sqrt(2) with rational a, b.
class Quad {
public:
    Quad() = default;
    Quad(Rat a) : a_(std::move(a)) {}  // NOLINT(google-explicit-constructor)
    Quad(long a) : a_(a) {}            // NOLINT(google-explicit-constructor)
    Quad(Rat a, Rat b) : a_(std::move(a)), b_(std::move(b)) {}

    static Quad sqrt2_times(Rat b) { return Quad(Rat(0), std::move(b)); }

    const Rat& a() const { return a_; }
    const Rat& b() const { return b_; }
    bool is_rational() const { return b_.is_zero(); }

    /// Exact sign of a + b*sqrt(2).
    int sign() const;
    double to_double() const;

    Quad operator-() const { return {-a_, -b_}; }
    friend Quad operator+(const Quad& u, const Quad& v) { return {u.a_ + v.a_, u.b_ + v.b_}; }
    friend Quad operator-(const Quad& u, const Quad& v) { return {u.a_ - v.a_, u.b_ - v.b_}; }
    friend Quad operator*(const Quad& u, const Quad& v) {
        return {u.a_ * v.a_ + Rat(2) * u.b_ * v.b_, u.a_ * v.b_ + u.b_ * v.a_};
    }

    friend bool operator==(const Quad&, const Quad&) = default;

private:
    Rat a_;
    Rat b_;
};

std::strong_ordering quad_cmp(const Quad& u, const Quad& v);
inline std::strong_ordering operator<=>(const Quad& u, const Quad& v) { return quad_cmp(u, v); }
std::ostream& operator<<(std::ostream& os, const Quad& q);

/// Quad extended with +infinity, for distances that may be unbounded.
struct ExtQuad {
    Quad value;
    bool infinite = false;

    static ExtQuad inf() { return {Quad{}, true}; }
    double to_double() const;
    friend bool operator==(const ExtQuad&, const ExtQuad&) = default;
    friend std::strong_ordering operator<=>(const ExtQuad& u, const ExtQuad& v);
};

struct TorusPoint {
    ModOne x;
    ModOne y;

    TorusPoint() = default;
    TorusPoint(ModOne x_, ModOne y_) : x(std::move(x_)), y(std::move(y_)) {}

    friend bool operator==(const TorusPoint&, const TorusPoint&) = default;
    friend auto operator<=>(const TorusPoint&, const TorusPoint&) = default;
};

std::ostream& operator<<(std::ostream& os, const TorusPoint& p);

/// Circular distance on R/Z between two coordinates, in [0, 1/2].
Rat circle_dist(const ModOne& u, const ModOne& v);

/// Squared flat-torus (quotient L2) distance. Always rational.
Rat sq_dist(const TorusPoint& p, const TorusPoint& q);

/// Membership in the open (or closed) ball of squared radius r_sq.
bool ball_test(const TorusPoint& p, const TorusPoint& center, const Quad& r_sq, bool closed);

// Floating twins. The exact path is authoritative.
double circle_dist_f(double u, double v);
double sq_dist_f(double px, double py, double qx, double qy);
inline double frac_f(double v) {
    double r = v - __builtin_floor(v);
    return r >= 1.0 ? 0.0 : r;
}

}  // namespace pdyn
