#include "pseudodyn/space.hpp"

#include "pseudodyn/regions.hpp"

#include <algorithm>

namespace pdyn {

namespace {

long floor_mod(long a, long m) {
    long r = a % m;
    return r < 0 ? r + m : r;
}

BiSeq::Word primitive(const BiSeq::Word& w) {
    const std::size_t n = w.size();
    for (std::size_t d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        bool ok = true;
        for (std::size_t i = d; i < n && ok; ++i) ok = w[i] == w[i - d];
        if (ok) return w.substr(0, d);
    }
    return w;
}

void check_bits(const BiSeq::Word& w, const char* what) {
    if (!std::all_of(w.begin(), w.end(), [](char c) { return c == '0' || c == '1'; }))
        throw std::invalid_argument(std::string("BiSeq: ") + what + " must be a 0/1 word");
}

}  // namespace

BiSeq::BiSeq(Word left, Word center, Word right, long start)
    : left_(std::move(left)), center_(std::move(center)), right_(std::move(right)), start_(start) {
    if (left_.empty() || right_.empty()) throw std::invalid_argument("BiSeq: periods must be nonempty");
    check_bits(left_, "left period");
    check_bits(center_, "center");
    check_bits(right_, "right period");
    canonicalize();
}

BiSeq BiSeq::parse(std::string_view text) {
    auto bar1 = text.find('|');
    auto bar2 = bar1 == std::string_view::npos ? bar1 : text.find('|', bar1 + 1);
    auto at = bar2 == std::string_view::npos ? bar2 : text.find('@', bar2 + 1);
    if (at == std::string_view::npos) throw ParseError("malformed sequence: '" + std::string(text) + "'");
    long start = 0;
    try {
        std::size_t used = 0;
        std::string tail(text.substr(at + 1));
        start = std::stol(tail, &used);
        if (used != tail.size()) throw ParseError("trailing characters");
    } catch (const std::exception&) {
        throw ParseError("malformed sequence start: '" + std::string(text) + "'");
    }
    try {
        return BiSeq(std::string(text.substr(0, bar1)), std::string(text.substr(bar1 + 1, bar2 - bar1 - 1)),
                     std::string(text.substr(bar2 + 1, at - bar2 - 1)), start);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

int BiSeq::at(long i) const {
    const long nl = static_cast<long>(left_.size());
    const long nc = static_cast<long>(center_.size());
    const long nr = static_cast<long>(right_.size());
    if (i < start_) return left_[static_cast<std::size_t>(floor_mod(i - start_, nl))] - '0';
    if (i < start_ + nc) return center_[static_cast<std::size_t>(i - start_)] - '0';
    return right_[static_cast<std::size_t>(floor_mod(i - start_ - nc, nr))] - '0';
}

bool BiSeq::in_U(long n) const {
    for (long i = -n + 1; i < n; ++i)
        if (at(i) != 0) return false;
    return true;
}

void BiSeq::canonicalize() {
    left_ = primitive(left_);
    right_ = primitive(right_);
    const long nl = static_cast<long>(left_.size());
    const long nc = static_cast<long>(center_.size());
    const long nr = static_cast<long>(right_.size());

    // End of the left periodic run.
    long a = start_;
    const long a_limit = start_ + nc + nl + nr + 1;
    while (a <= a_limit && at(a) == at(a - nl)) ++a;
    if (a > a_limit) {
        Word period;
        for (long k = 0; k < nl; ++k) period.push_back(static_cast<char>('0' + at(k)));
        left_ = right_ = period;
        center_.clear();
        start_ = 0;
        return;
    }
    // Start of the right periodic run.
    long b = start_ + nc - 1;
    while (at(b) == at(b + nr)) --b;
    ++b;

    const long e = std::max(a, b);
    Word nleft, ncenter, nright;
    for (long k = 0; k < nl; ++k) nleft.push_back(static_cast<char>('0' + at(a - nl + k)));
    for (long i = a; i < e; ++i) ncenter.push_back(static_cast<char>('0' + at(i)));
    for (long k = 0; k < nr; ++k) nright.push_back(static_cast<char>('0' + at(e + k)));
    left_ = std::move(nleft);
    center_ = std::move(ncenter);
    right_ = std::move(nright);
    start_ = a;
}

BiSeq BiSeq::shifted(long k) const {
    BiSeq r = *this;
    r.start_ -= k;
    r.canonicalize();
    return r;
}

BiSeq BiSeq::shift() const { return shifted(1); }
BiSeq BiSeq::unshift() const { return shifted(-1); }

long BiSeq::first_difference(const BiSeq& other) const {
    if (*this == other) return -1;
    auto span = [](const BiSeq& s) {
        return std::abs(s.start_) + static_cast<long>(s.center_.size());
    };
    const long bound = span(*this) + span(other) +
                       static_cast<long>(left_.size() * other.left_.size() + right_.size() * other.right_.size()) + 2;
    for (long m = 0; m <= bound; ++m)
        if (at(m) != other.at(m) || at(-m) != other.at(-m)) return m;
    throw std::logic_error("BiSeq::first_difference: distinct canonical forms without a difference");
}

std::string BiSeq::key() const {
    return left_ + "|" + center_ + "|" + right_ + "@" + std::to_string(start_);
}

// ---------------------------------------------------------------- points

SpaceKind kind_of(const SpacePoint& p) {
    return static_cast<SpaceKind>(p.index());
}

std::string to_string(SpaceKind k) {
    switch (k) {
        case SpaceKind::Torus: return "torus";
        case SpaceKind::TorusLevel: return "torus_level";
        case SpaceKind::Cantor: return "cantor";
        case SpaceKind::Line: return "line";
    }
    return "unknown";
}

long level_of(const SpacePoint& p) {
    if (auto* t = std::get_if<TorusLevelPoint>(&p)) return t->level;
    if (auto* c = std::get_if<CantorPoint>(&p)) return c->level;
    return 0;
}

bool well_formed(const SpacePoint& p) {
    if (auto* c = std::get_if<CantorPoint>(&p)) return c->level >= 0 && c->seq.in_U(c->level);
    return true;
}

ExtQuad space_sq_dist(const SpacePoint& a, const SpacePoint& b) {
    if (a.index() != b.index()) return ExtQuad::inf();
    switch (kind_of(a)) {
        case SpaceKind::Torus:
            return {Quad(sq_dist(std::get<TorusPoint>(a), std::get<TorusPoint>(b)))};
        case SpaceKind::TorusLevel: {
            const auto& u = std::get<TorusLevelPoint>(a);
            const auto& v = std::get<TorusLevelPoint>(b);
            if (u.level != v.level) return ExtQuad::inf();
            return {Quad(sq_dist(u.p, v.p))};
        }
        case SpaceKind::Cantor: {
            const auto& u = std::get<CantorPoint>(a);
            const auto& v = std::get<CantorPoint>(b);
            if (u.level != v.level) return ExtQuad::inf();
            long m = u.seq.first_difference(v.seq);
            return {Quad(m < 0 ? Rat(0) : Rat::pow2(-2 * m))};
        }
        case SpaceKind::Line: {
            Rat d = std::get<LinePoint>(a).t - std::get<LinePoint>(b).t;
            return {Quad(d * d)};
        }
    }
    return ExtQuad::inf();
}

std::string point_key(const SpacePoint& p) {
    auto torus = [](const TorusPoint& t) { return t.x.value().str() + "," + t.y.value().str(); };
    switch (kind_of(p)) {
        case SpaceKind::Torus: return "T(" + torus(std::get<TorusPoint>(p)) + ")";
        case SpaceKind::TorusLevel: {
            const auto& t = std::get<TorusLevelPoint>(p);
            return "T" + std::to_string(t.level) + "(" + torus(t.p) + ")";
        }
        case SpaceKind::Cantor: {
            const auto& c = std::get<CantorPoint>(p);
            return "C" + std::to_string(c.level) + "(" + c.seq.key() + ")";
        }
        case SpaceKind::Line: return "R(" + std::get<LinePoint>(p).t.str() + ")";
    }
    return {};
}

using nlohmann::json;

json to_json(const SpacePoint& p) {
    switch (kind_of(p)) {
        case SpaceKind::Torus: {
            json j = to_json(std::get<TorusPoint>(p));
            j["kind"] = "torus";
            return j;
        }
        case SpaceKind::TorusLevel: {
            const auto& t = std::get<TorusLevelPoint>(p);
            json j = to_json(t.p);
            j["kind"] = "torus_level";
            j["level"] = t.level;
            return j;
        }
        case SpaceKind::Cantor: {
            const auto& c = std::get<CantorPoint>(p);
            return {{"kind", "cantor"}, {"level", c.level}, {"seq", c.seq.key()}};
        }
        case SpaceKind::Line: return {{"kind", "line"}, {"t", std::get<LinePoint>(p).t.str()}};
    }
    return {};
}

SpacePoint space_point_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "torus") return torus_point_from_json(j);
    if (kind == "torus_level") return TorusLevelPoint{torus_point_from_json(j), j.at("level").get<long>()};
    if (kind == "cantor") {
        CantorPoint c{j.at("level").get<long>(), BiSeq::parse(j.at("seq").get<std::string>())};
        if (!well_formed(c)) throw ParseError("cantor point violates the level invariant");
        return c;
    }
    if (kind == "line") return LinePoint{Rat::parse(j.at("t").get<std::string>())};
    throw ParseError("unknown point kind: " + kind);
}

}  // namespace pdyn
