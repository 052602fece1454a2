#pragma once

#include <array>

#include "pseudodyn/exact.hpp"

namespace pdyn {

/// p -> L p + t on the lifted representatives in [0,1)^2, reduced mod 1.
///
/// With an integer linear part this is a well defined torus map. Rational
/// linear parts are only meaningful on a piece that does not straddle the
/// seam of a coordinate carrying a non-integer coefficient (twist bands).
struct Affine2 {
    std::array<Rat, 4> m{Rat(1), Rat(0), Rat(0), Rat(1)};  // row major
    std::array<Rat, 2> t{Rat(0), Rat(0)};

    static Affine2 identity() { return {}; }
    static Affine2 linear(long a, long b, long c, long d) {
        return {{Rat(a), Rat(b), Rat(c), Rat(d)}, {Rat(0), Rat(0)}};
    }
    static Affine2 translation(const Rat& tx, const Rat& ty) {
        return {{Rat(1), Rat(0), Rat(0), Rat(1)}, {tx, ty}};
    }

    TorusPoint apply(const TorusPoint& p) const;
    void apply_f(double& x, double& y) const;

    Rat det() const { return m[0] * m[3] - m[1] * m[2]; }
    bool integer_linear() const;
    bool identity_linear() const;
    bool is_identity() const { return identity_linear() && t[0].is_zero() && t[1].is_zero(); }

    /// Exact inverse of the affine map on R^2 (det must be nonzero).
    Affine2 inverse() const;
    /// (*this) after (first): p -> this(first(p)) on R^2.
    Affine2 after(const Affine2& first) const;

    /// Upper bound on the spectral norm of the linear part.
    double norm_bound() const;

    friend bool operator==(const Affine2&, const Affine2&) = default;
};

/// Equality of two affine torus maps (offsets compared mod 1).
bool same_torus_map(const Affine2& a, const Affine2& b);

}  // namespace pdyn
