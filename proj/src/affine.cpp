#include "pseudodyn/affine.hpp"

#include <cmath>
#include <stdexcept>

namespace pdyn {

TorusPoint Affine2::apply(const TorusPoint& p) const {
    const Rat& x = p.x.value();
    const Rat& y = p.y.value();
    return {ModOne(m[0] * x + m[1] * y + t[0]), ModOne(m[2] * x + m[3] * y + t[1])};
}

void Affine2::apply_f(double& x, double& y) const {
    double nx = m[0].to_double() * x + m[1].to_double() * y + t[0].to_double();
    double ny = m[2].to_double() * x + m[3].to_double() * y + t[1].to_double();
    x = frac_f(nx);
    y = frac_f(ny);
}

bool Affine2::integer_linear() const {
    for (const auto& v : m)
        if (!v.is_integer()) return false;
    return true;
}

bool Affine2::identity_linear() const {
    return m[0] == Rat(1) && m[1].is_zero() && m[2].is_zero() && m[3] == Rat(1);
}

Affine2 Affine2::inverse() const {
    Rat d = det();
    if (d.is_zero()) throw std::domain_error("Affine2::inverse: singular linear part");
    Affine2 inv;
    inv.m = {m[3] / d, -m[1] / d, -m[2] / d, m[0] / d};
    inv.t = {-(inv.m[0] * t[0] + inv.m[1] * t[1]), -(inv.m[2] * t[0] + inv.m[3] * t[1])};
    return inv;
}

Affine2 Affine2::after(const Affine2& first) const {
    Affine2 r;
    r.m = {m[0] * first.m[0] + m[1] * first.m[2], m[0] * first.m[1] + m[1] * first.m[3],
           m[2] * first.m[0] + m[3] * first.m[2], m[2] * first.m[1] + m[3] * first.m[3]};
    r.t = {m[0] * first.t[0] + m[1] * first.t[1] + t[0],
           m[2] * first.t[0] + m[3] * first.t[1] + t[1]};
    return r;
}

double Affine2::norm_bound() const {
    // sqrt of the largest eigenvalue of L^T L, padded upward.
    double a = m[0].to_double(), b = m[1].to_double(), c = m[2].to_double(), d = m[3].to_double();
    double p = a * a + c * c, q = a * b + c * d, r = b * b + d * d;
    double tr = p + r;
    double disc = std::sqrt(std::max(0.0, (p - r) * (p - r) + 4 * q * q));
    double lam = 0.5 * (tr + disc);
    return std::sqrt(lam) * (1 + 1e-12) + 1e-15;
}

bool same_torus_map(const Affine2& a, const Affine2& b) {
    return a.m == b.m && (a.t[0] - b.t[0]).is_integer() && (a.t[1] - b.t[1]).is_integer();
}

}  // namespace pdyn
