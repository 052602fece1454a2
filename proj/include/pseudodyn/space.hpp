#pragma once

// Phase spaces: the plain torus, torus levels, the Cantor levels built from
// bi-infinite 0/1 sequences, and the real line.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pseudodyn/exact.hpp"

namespace pdyn {

/// Eventually periodic bi-infinite 0/1 sequence
/// (left)^inf . center . (right)^inf, kept in canonical form.
///
/// Layout: center occupies indices [start, start + |center|); the left period
/// repeats below start, the right period above the center. Canonical form has
/// primitive periods, the left periodic run extended as far right as it goes
/// and the right run as far left, so equal sequences have equal fields. A
/// purely periodic sequence is stored with start 0, empty center and
/// left == right.
class BiSeq {
public:
    using Word = std::string;  // characters '0' / '1'

    BiSeq(Word left, Word center, Word right, long start);

    static BiSeq zeros() { return BiSeq("0", "", "0", 0); }
    /// Purely periodic sequence with alpha_i = period[i mod |period|].
    static BiSeq periodic(const Word& period) { return BiSeq(period, "", period, 0); }
    /// Parses "L|C|R@start", the format produced by key().
    static BiSeq parse(std::string_view text);

    int at(long i) const;
    /// alpha_i = 0 for every |i| < n.
    bool in_U(long n) const;
    bool is_periodic() const { return center_.empty() && left_ == right_; }

    /// (shift alpha)_i = alpha_{i+1}.
    BiSeq shift() const;
    BiSeq unshift() const;
    BiSeq shifted(long k) const;

    const Word& left() const { return left_; }
    const Word& center() const { return center_; }
    const Word& right() const { return right_; }
    long start() const { return start_; }
    /// Position of index 0 relative to the start of the center frame.
    long origin_offset() const { return -start_; }

    /// Smallest m with alpha_m != beta_m or alpha_{-m} != beta_{-m}; -1 if equal.
    long first_difference(const BiSeq& other) const;

    std::string key() const;

    friend bool operator==(const BiSeq&, const BiSeq&) = default;

private:
    void canonicalize();
    Word left_, center_, right_;
    long start_ = 0;
};

struct TorusLevelPoint {
    TorusPoint p;
    long level = 0;
    friend bool operator==(const TorusLevelPoint&, const TorusLevelPoint&) = default;
};

struct CantorPoint {
    long level = 0;
    BiSeq seq = BiSeq::zeros();
    friend bool operator==(const CantorPoint&, const CantorPoint&) = default;
};

struct LinePoint {
    Rat t;
    friend bool operator==(const LinePoint&, const LinePoint&) = default;
};

enum class SpaceKind { Torus, TorusLevel, Cantor, Line };

using SpacePoint = std::variant<TorusPoint, TorusLevelPoint, CantorPoint, LinePoint>;

class SpaceMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

SpaceKind kind_of(const SpacePoint& p);
std::string to_string(SpaceKind k);

/// Level of a point (0 for the plain torus and the line).
long level_of(const SpacePoint& p);

/// CantorX points require seq in U_level.
bool well_formed(const SpacePoint& p);

/// Squared distance; infinite across levels or kinds. Exact for every space
/// (the Cantor distance 2^-m squares to 4^-m).
ExtQuad space_sq_dist(const SpacePoint& a, const SpacePoint& b);

/// Canonical string identifying the point, used as the orbit node key.
std::string point_key(const SpacePoint& p);

nlohmann::json to_json(const SpacePoint& p);
SpacePoint space_point_from_json(const nlohmann::json& j);

}  // namespace pdyn
