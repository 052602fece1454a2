#include "pseudodyn/exact.hpp"

#include <cmath>
#include <ostream>

namespace pdyn {

Rat::Rat(long num, long den) {
    if (den == 0) throw std::domain_error("Rat: zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
}

Rat operator/(const Rat& a, const Rat& b) {
    if (b.is_zero()) throw std::domain_error("Rat: division by zero");
    return Rat(mpq_class(a.q_ / b.q_));
}

Rat Rat::parse(std::string_view text) {
    auto valid_int = [](std::string_view s) {
        if (s.empty()) return false;
        size_t i = (s[0] == '-') ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    auto slash = text.find('/');
    std::string_view n = text.substr(0, slash);
    std::string_view d = slash == std::string_view::npos ? "1" : text.substr(slash + 1);
    if (!valid_int(n) || !valid_int(d) || d[0] == '-')
        throw ParseError("malformed rational: '" + std::string(text) + "'");
    mpz_class num(std::string(n), 10);
    mpz_class den(std::string(d), 10);
    if (den == 0) throw ParseError("zero denominator: '" + std::string(text) + "'");
    mpq_class q(num, den);
    return Rat(q);
}

Rat Rat::pow2(long e) {
    mpz_class p = 1;
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(e < 0 ? -e : e));
    return e >= 0 ? Rat(mpq_class(p)) : Rat(mpq_class(mpz_class(1), p));
}

mpz_class Rat::floor() const {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
    return r;
}

Rat Rat::frac() const {
    return Rat(mpq_class(q_ - mpq_class(floor())));
}

std::string Rat::str() const {
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

int Quad::sign() const {
    int sa = a_.sign();
    int sb = b_.sign();
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    // Opposite signs: the larger of |a| and |b|*sqrt(2) wins, decided on squares.
    Rat a2 = a_ * a_;
    Rat b2 = Rat(2) * b_ * b_;
    return a2 > b2 ? sa : sb;
}

double Quad::to_double() const { return a_.to_double() + b_.to_double() * std::sqrt(2.0); }

std::strong_ordering quad_cmp(const Quad& u, const Quad& v) {
    int s = (u - v).sign();
    return s < 0 ? std::strong_ordering::less
         : s > 0 ? std::strong_ordering::greater
                 : std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Quad& q) {
    return os << q.a() << " + " << q.b() << "*sqrt2";
}

double ExtQuad::to_double() const { return infinite ? HUGE_VAL : value.to_double(); }

std::strong_ordering operator<=>(const ExtQuad& u, const ExtQuad& v) {
    if (u.infinite || v.infinite) {
        if (u.infinite && v.infinite) return std::strong_ordering::equal;
        return u.infinite ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    return quad_cmp(u.value, v.value);
}

std::ostream& operator<<(std::ostream& os, const TorusPoint& p) {
    return os << "(" << p.x.value() << ", " << p.y.value() << ")";
}

Rat circle_dist(const ModOne& u, const ModOne& v) {
    Rat d = (u.value() - v.value()).abs();
    Rat e = Rat(1) - d;
    return min(d, e);
}

Rat sq_dist(const TorusPoint& p, const TorusPoint& q) {
    Rat dx = circle_dist(p.x, q.x);
    Rat dy = circle_dist(p.y, q.y);
    return dx * dx + dy * dy;
}

bool ball_test(const TorusPoint& p, const TorusPoint& center, const Quad& r_sq, bool closed) {
    auto c = quad_cmp(Quad(sq_dist(p, center)), r_sq);
    return closed ? c != std::strong_ordering::greater : c == std::strong_ordering::less;
}

double circle_dist_f(double u, double v) {
    double d = std::fabs(u - v);
    d -= std::floor(d);
    return std::min(d, 1.0 - d);
}

double sq_dist_f(double px, double py, double qx, double qy) {
    double dx = circle_dist_f(px, qx);
    double dy = circle_dist_f(py, qy);
    return dx * dx + dy * dy;
}

}  // namespace pdyn
