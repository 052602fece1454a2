#include <doctest.h>

#include "pseudodyn/diagnostics.hpp"
#include "pseudodyn/systems.hpp"

using namespace pdyn;

namespace {

TorusPoint pt(const Rat& x, const Rat& y) { return {ModOne(x), ModOne(y)}; }

Region box_around(const Rat& cx, const Rat& cy, const Rat& half) {
    return Region::box(Arc::make((cx - half).frac(), (cx + half).frac(), false, false),
                       Arc::make((cy - half).frac(), (cy + half).frac(), false, false));
}

Generator level_one_T1(const FamilyB& b) {
    TorusRule r;
    r.levels[0] = {b.M[1], b.T[1]};
    return {"T1", SpaceKind::Torus, r, std::nullopt};
}

}  // namespace

TEST_CASE("transitivity: identity stays in one cell, cat map covers the torus") {
    TransitivityOptions opt;
    opt.max_steps = 1000;
    ProbeReport id = probe_transitivity("identity", {build_identity()}, {0.1, 0.1, 0}, Region::full(), opt);
    CHECK(id.metrics["covered_cells"] == 1);
    CHECK(id.metrics["target_cells"] == 1024);
    CHECK(id.verdict == Verdict::NoWitnessUpToBound);

    opt.max_steps = 100000;
    ProbeReport cat = probe_transitivity("cat-map", {build_cat_map()}, {0.1, 0.1, 0}, Region::full(), opt);
    CHECK(cat.metrics["coverage"].get<double>() >= 0.95);
    CHECK(cat.verdict == Verdict::EvidenceFor);
    CHECK(cat.payload() ==
          probe_transitivity("cat-map", {build_cat_map()}, {0.1, 0.1, 0}, Region::full(), opt).payload());
}

TEST_CASE("transitivity: kernel ensemble over the level-one linked twist") {
    FamilyB b = build_family_B(1);
    TransitivityOptions opt;
    opt.max_steps = 200000;
    opt.walkers = 64;
    ProbeReport r = probe_transitivity("family-b", {level_one_T1(b)}, {0.3, 0.4, 0}, b.M[1], opt);
    CHECK(r.metrics["mode"] == "ensemble");
    CHECK(r.metrics["coverage"].get<double>() >= 0.95);
}

TEST_CASE("dpo: line lattice, cat map grid, Cantor cylinders") {
    const Rat lo(0), hi(3, 2);
    DpoSetup line;
    line.gens = {build_line()};
    line.U = [&](const SpacePoint& p) {
        const Rat& t = std::get<LinePoint>(p).t;
        return lo < t && t < hi;
    };
    line.U_description = "(0,3/2)";
    line.line_interval = std::make_pair(lo, hi);
    for (long k = 1; k <= 10; ++k) line.samples.push_back(LinePoint{Rat(3 * k, 22)});
    line.eps = Rat(1, 100);
    ProbeReport r = probe_dpo("line", line);
    CHECK(r.verdict == Verdict::Established);
    CHECK(r.metrics["max_restricted_orbit_size"].get<std::size_t>() <= 2);
    CHECK(line_restricted_orbit(line.gens, Rat(1, 4), lo, hi) == std::vector<Rat>{Rat(1, 4), Rat(5, 4)});

    line.samples.push_back(LinePoint{Rat(2)});
    CHECK_THROWS_AS(probe_dpo("line", line), PointOutsideU);

    std::vector<SpacePoint> starts;
    for (long k = 0; k < 100; ++k) starts.push_back(LinePoint{Rat(k, 37)});
    CHECK(global_finite_orbit_search(line.gens, starts, 1000).finite_found == 0);

    DpoSetup cat;
    cat.gens = {build_cat_map()};
    cat.U = [](const SpacePoint&) { return true; };
    cat.U_description = "T^2";
    for (long i = 0; i < 8; ++i)
        for (long j = 0; j < 8; ++j) cat.samples.push_back(pt(Rat(2 * i + 1, 16), Rat(2 * j + 1, 16)));
    cat.candidates = [](const SpacePoint& s) { return std::vector<SpacePoint>{s}; };
    cat.eps = Rat(1, 16);
    CHECK(probe_dpo("cat-map", cat).verdict == Verdict::Established);
}

TEST_CASE("sensitivity: cat map separates, identity and isometries do not") {
    std::vector<Generator> cat{build_cat_map()};
    SensitivityOptions opt;
    opt.radii = {1.0 / 128};
    opt.depth = 8;
    opt.threshold = 0.25;
    ProbeReport r = probe_sensitivity("cat-map", cat, {pt(Rat(0), Rat(0))}, opt);
    CHECK(r.metrics["c_hat"].get<double>() >= 0.25);
    CHECK(r.metrics["exact_confirmed"] == 1);

    // exact oracle: y = (1/128, 0) under the cat map
    SpacePoint x = pt(Rat(0), Rat(0)), y = pt(Rat(1, 128), Rat(0));
    bool reached = false;
    for (std::size_t n = 1; n <= 8 && !reached; ++n) {
        Word w(n, Letter{0, 1});
        ExtQuad d = space_sq_dist(*apply_word(cat, w, x).point, *apply_word(cat, w, y).point);
        reached = d.value >= Quad(Rat(1, 16));
    }
    CHECK(reached);

    CHECK(probe_sensitivity("identity", {}, {pt(Rat(0), Rat(0))}, opt).metrics["c_hat"] == 0.0);

    FamilyA a = build_family_A(8);
    SensitivityOptions iso;
    iso.radii = {std::ldexp(1.0, -20)};
    iso.depth = 6;
    ProbeReport s = probe_sensitivity("family-a-S", a.S.F, {TorusLevelPoint{pt(Rat(0), Rat(0)), 0}}, iso);
    CHECK(s.verdict == Verdict::NoWitnessUpToBound);
}

TEST_CASE("property: sensitivity estimate is monotone in depth") {
    FamilyB b = build_family_B(2);
    std::vector<SpacePoint> samples;
    for (long k = 1; k <= 4; ++k) samples.push_back(TorusLevelPoint{pt(Rat(k, 5), Rat(2 * k, 11)), 0});
    double prev = 0;
    for (std::size_t d = 1; d <= 6; ++d) {
        SensitivityOptions opt;
        opt.radii = {1.0 / 256};
        opt.depth = d;
        opt.seed = 5;
        double c = probe_sensitivity("family-b", b.gens(), samples, opt).metrics["c_hat"].get<double>();
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("isometry certificates") {
    OrbitBounds bounds;
    FamilyB b = build_family_B(4);
    auto cb = certify_orbit_isometry(b.gens(), TorusLevelPoint{pt(Rat(0), Rat(0)), 0}, bounds);
    CHECK(cb.verdict == Verdict::Established);
    CHECK(cb.nodes.size() == 5);

    FamilyBOptions mutate;
    mutate.mutate_top_band = true;
    FamilyB bm = build_family_B(4, mutate);
    auto cm = certify_orbit_isometry(bm.gens(), TorusLevelPoint{pt(Rat(0), Rat(0)), 0}, bounds);
    CHECK(cm.verdict == Verdict::CounterexampleFound);
    CHECK(isometry_report("family-b-mutated", cm, "p:widetildegnotsic").witnesses.size() == 1);

    FamilyA a = build_family_A(6);
    CHECK(certify_orbit_isometry(a.S.F, TorusLevelPoint{pt(Rat(0), Rat(0)), 0}, bounds).verdict ==
          Verdict::Established);

    OrbitBounds levels;
    levels.max_level = 10;
    auto cc = certify_orbit_isometry(build_cantor(), CantorPoint{0, BiSeq::zeros()}, levels);
    CHECK(cc.verdict == Verdict::Established);
    CHECK(cc.orbit_status == OrbitStatus::TruncatedByLevelBound);

    CHECK(certify_orbit_isometry({build_cat_map()}, pt(Rat(0), Rat(0)), bounds).verdict ==
          Verdict::CounterexampleFound);
}

TEST_CASE("halo dichotomy") {
    ProbeReport cat = halo_dichotomy_probe(build_boxed_cat_map(), pt(Rat(1, 2), Rat(1, 2)), {});
    CHECK(cat.metrics["branch"] == "ii");
    REQUIRE(cat.witnesses.size() == 1);
    CHECK(cat.witnesses[0]["depth"].get<std::size_t>() <= 6);

    FamilyA a = build_family_A(8);
    HaloOptions opt;
    opt.rho_schedule = {Rat::pow2(-20)};
    ProbeReport fa = halo_dichotomy_probe(a.S, TorusLevelPoint{pt(Rat(0), Rat(0)), 0}, opt);
    CHECK(fa.metrics["branch"] == "i");

    Generator f = build_cat_map();
    CompactGenSystem total{"total", {f}, {f}};
    total.Ftilde[0].extension_of = f.id;
    ProbeReport t = halo_dichotomy_probe(total, pt(Rat(1, 3), Rat(1, 5)), {});
    CHECK(t.metrics["branch"] == "i");
    CHECK(t.metrics["rho"] == "1/32");
}

TEST_CASE("naive sensitivity demonstration") {
    NaiveDemoOptions opt;
    opt.W1 = box_around(Rat(0), Rat(1, 4), Rat(1, 16));
    opt.W2 = box_around(Rat(0), Rat(3, 4), Rat(1, 16));
    opt.c = Rat(1, 8);
    ProbeReport r = naive_sensitivity_demo("cat-map", {build_cat_map()}, pt(Rat(0), Rat(0)), Rat(1, 8), opt);
    CHECK(r.verdict == Verdict::EvidenceFor);
    CHECK(r.witnesses.size() == 2);
    CHECK_THROWS_AS(naive_sensitivity_demo("identity", {build_identity()}, pt(Rat(0), Rat(0)), Rat(1, 8), opt),
                    SearchFailed);

    FamilyB b = build_family_B(2);
    opt.W1 = box_around(Rat(1, 2), Rat(1, 4), Rat(1, 16));
    opt.W2 = box_around(Rat(1, 2), Rat(3, 4), Rat(1, 16));
    ProbeReport fb = naive_sensitivity_demo("family-b", b.gens(), pt(Rat(1, 2), Rat(1, 2)), Rat(1, 64), opt);
    CHECK(fb.verdict == Verdict::EvidenceFor);
}

TEST_CASE("reports serialize with a schema version and a CSV row") {
    ProbeReport r;
    r.probe = "x";
    r.system = "s";
    r.anchor = "a";
    r.metrics = {{"k", 1}};
    CHECK(r.payload()["schema_version"] == kReportSchemaVersion);
    CHECK(r.to_json("t")["run"]["timestamp"] == "t");
    CHECK(r.csv_row() == "x,s,a,NoWitnessUpToBound,\"{\"\"k\"\":1}\"");
}
