#include "pseudodyn/catalog.hpp"

#include <random>

namespace pdyn {

Region box_around(const Rat& cx, const Rat& cy, const Rat& half) {
    return Region::box(Arc::make((cx - half).frac(), (cx + half).frac(), false, false),
                       Arc::make((cy - half).frac(), (cy + half).frac(), false, false));
}

Generator family_b_level_twist(const FamilyB& b, long n) {
    if (n < 0 || n > b.n_max) throw std::out_of_range("family B level out of range");
    TorusRule r;
    r.levels[0] = {b.M[static_cast<std::size_t>(n)], b.T[static_cast<std::size_t>(n)]};
    return {"T" + std::to_string(n), SpaceKind::Torus, r, std::nullopt};
}

std::vector<TorusPoint> random_grid_points(std::size_t count, long den, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> coord(0, den - 1);
    std::vector<TorusPoint> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const long a = coord(rng), b = coord(rng);
        out.push_back({ModOne(Rat(a, den)), ModOne(Rat(b, den))});
    }
    return out;
}

DpoSetup line_dpo_setup(const Rat& lo, const Rat& hi, std::size_t count) {
    if (!(lo < hi)) throw std::invalid_argument("line interval must have lo < hi");
    DpoSetup s;
    s.gens = {build_line()};
    s.U = [lo, hi](const SpacePoint& p) {
        const Rat& t = std::get<LinePoint>(p).t;
        return lo < t && t < hi;
    };
    s.U_description = "(" + lo.str() + "," + hi.str() + ")";
    s.line_interval = std::make_pair(lo, hi);
    const Rat width = hi - lo;
    for (std::size_t k = 0; k < count; ++k)
        s.samples.push_back(LinePoint{lo + width * Rat(static_cast<long>(2 * k + 1), static_cast<long>(2 * count))});
    s.eps = Rat(0);
    return s;
}

DpoSetup cat_map_dpo_setup(long den) {
    DpoSetup s;
    s.gens = {build_cat_map()};
    s.U = [](const SpacePoint&) { return true; };
    s.U_description = "T^2";
    for (long i = 0; i < 2 * den; ++i)
        for (long j = 0; j < 2 * den; ++j)
            s.samples.push_back(TorusPoint{ModOne(Rat(2 * i + 1, 4 * den)), ModOne(Rat(2 * j + 1, 4 * den))});
    s.candidates = [den](const SpacePoint& p) {
        const auto& t = std::get<TorusPoint>(p);
        const Rat fx(mpq_class((t.x.value() * Rat(den)).floor())), fy(mpq_class((t.y.value() * Rat(den)).floor()));
        std::vector<SpacePoint> out;
        for (long dx : {0, 1})
            for (long dy : {0, 1})
                out.push_back(TorusPoint{ModOne((fx + Rat(dx)) / Rat(den)), ModOne((fy + Rat(dy)) / Rat(den))});
        return out;
    };
    s.eps = Rat(1, den);
    return s;
}

DpoSetup cantor_dpo_setup(std::size_t count) {
    DpoSetup s;
    s.gens = build_cantor();
    s.U = [](const SpacePoint& p) { return std::get<CantorPoint>(p).level == 0; };
    s.U_description = "level 0";
    long k = 0;
    while ((1L << (2 * k + 1)) < static_cast<long>(count)) ++k;
    const long width = 2 * k + 1;
    for (long bits = 0; bits < (1L << width) && s.samples.size() < count; ++bits) {
        std::string w;
        for (long i = 0; i < width; ++i) w += ((bits >> i) & 1) ? '1' : '0';
        s.samples.push_back(CantorPoint{0, BiSeq("0", w, "0", -k)});
    }
    s.candidates = [k](const SpacePoint& p) {
        const auto& c = std::get<CantorPoint>(p);
        std::string w;
        for (long i = -k; i <= k; ++i) w += static_cast<char>('0' + c.seq.at(i));
        return std::vector<SpacePoint>{CantorPoint{0, BiSeq::periodic(w + "1").shifted(k)}};
    };
    s.eps = Rat::pow2(-k);
    s.bounds.max_level = 64;
    return s;
}

}  // namespace pdyn
