#include "pseudodyn/verify.hpp"

#include <algorithm>
#include <chrono>
#include <set>

namespace pdyn {

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ProbeReport start(const std::string& name, const std::string& system, const std::string& anchor,
                  nlohmann::json params) {
    ProbeReport r;
    r.probe = "verify-" + name;
    r.system = system;
    r.anchor = anchor;
    r.parameters = std::move(params);
    r.verdict = Verdict::Established;
    return r;
}

void fail(ProbeReport& r, nlohmann::json witness) {
    if (r.verdict == Verdict::Established) r.witnesses.push_back(std::move(witness));
    r.verdict = Verdict::CounterexampleFound;
}

TorusPoint pt(const Rat& x, const Rat& y) { return {ModOne(x), ModOne(y)}; }

}  // namespace

ProbeReport verify_tq(long n_max, long m_max) {
    Stopwatch clock;
    ProbeReport r = start("tq", "family-b", "l:tq", {{"n", n_max}, {"m", m_max}});
    FamilyB b = build_family_B(std::max(n_max, m_max));
    std::vector<TorusPoint> q1{pt(Rat(0), Rat(1, 2)), pt(Rat(1, 2), Rat(1, 2)), pt(Rat(1, 2), Rat(0))};
    std::vector<TorusPoint> got = b.Q[1];
    std::sort(q1.begin(), q1.end());
    std::sort(got.begin(), got.end());
    if (got != q1) fail(r, {{"reason", "Q_1 differs"}, {"size", got.size()}});
    std::size_t checked = 0;
    for (long n = 1; n <= n_max; ++n) {
        std::vector<TorusPoint> Q = b.Q[static_cast<std::size_t>(n)];
        std::sort(Q.begin(), Q.end());
        for (long m = 0; m <= m_max; ++m) {
            std::vector<TorusPoint> img;
            for (const auto& p : Q) img.push_back(b.T[static_cast<std::size_t>(m)].apply(p));
            std::sort(img.begin(), img.end());
            checked += Q.size();
            if (img == Q) continue;
            for (const auto& p : Q) {
                TorusPoint q = b.T[static_cast<std::size_t>(m)].apply(p);
                if (!std::binary_search(Q.begin(), Q.end(), q)) {
                    fail(r, {{"n", n}, {"m", m}, {"point", to_json(p)}, {"image", to_json(q)}});
                    break;
                }
            }
        }
    }
    nlohmann::json sizes = nlohmann::json::array();
    for (long n = 1; n <= n_max; ++n) sizes.push_back(b.Q[static_cast<std::size_t>(n)].size());
    r.metrics = {{"points_checked", checked}, {"Q_sizes", sizes}};
    r.runtime_seconds = clock.seconds();
    return r;
}

ProbeReport verify_finite_orbits(long n_max) {
    Stopwatch clock;
    ProbeReport r = start("finiteorbits", "family-b", "l:finiteorbits", {{"n", n_max}});
    FamilyB b = build_family_B(n_max);
    const auto gens = b.gens();
    std::size_t orbits = 0, nodes = 0;
    for (long n = 1; n <= n_max; ++n) {
        const auto& Qt = b.Qtilde[static_cast<std::size_t>(n)];
        std::set<TorusPoint> members(Qt.begin(), Qt.end());
        std::set<std::string> done;
        for (const auto& p : Qt) {
            for (long m = 0; m <= n; ++m) {
                const SpacePoint base = TorusLevelPoint{p, m};
                if (done.contains(point_key(base))) continue;
                OrbitGraph g = orbit_bfs(gens, base, {});
                ++orbits;
                nodes += g.nodes.size();
                if (g.status != OrbitStatus::Complete) {
                    fail(r, {{"base", to_json(base)}, {"status", to_string(g.status)}});
                    continue;
                }
                for (const auto& node : g.nodes) {
                    done.insert(point_key(node));
                    const auto& tl = std::get<TorusLevelPoint>(node);
                    if (!members.contains(tl.p) || tl.level < 0 || tl.level > n)
                        fail(r, {{"base", to_json(base)}, {"escaped", to_json(node)}});
                }
            }
            if (apply_generator(b.g, 1, TorusLevelPoint{p, n}))
                fail(r, {{"reason", "g~ defined at the top of its level"}, {"point", to_json(TorusLevelPoint{p, n})}});
        }
    }
    r.metrics = {{"orbits", orbits}, {"nodes", nodes}};
    r.runtime_seconds = clock.seconds();
    return r;
}

std::vector<BiSeq> periodic_sequences(long max_period) {
    std::vector<BiSeq> out;
    std::set<std::string> seen;
    for (long p = 1; p <= max_period; ++p)
        for (long bits = 0; bits < (1L << p); ++bits) {
            std::string w;
            for (long i = 0; i < p; ++i) w += ((bits >> i) & 1) ? '1' : '0';
            BiSeq s = BiSeq::periodic(w);
            if (seen.insert(s.key()).second) out.push_back(s);
        }
    return out;
}

ProbeReport verify_gna(long max_period, long levels) {
    Stopwatch clock;
    ProbeReport r = start("gna", "cantor", "l:gna", {{"period", max_period}, {"levels", levels}});
    const auto gens = build_cantor();
    OrbitBounds bounds;
    bounds.max_level = levels;
    std::size_t checked = 0;
    for (const auto& alpha : periodic_sequences(max_period)) {
        // Characterization: shifts of alpha sitting in U_m.
        std::set<std::string> expected;
        const long period = static_cast<long>(alpha.left().size());
        for (long k = 0; k < period; ++k) {
            BiSeq beta = alpha.shifted(k);
            for (long m = 0; m <= levels; ++m)
                if (beta.in_U(m)) expected.insert(point_key(CantorPoint{m, beta}));
        }
        OrbitGraph g = orbit_bfs(gens, CantorPoint{0, alpha}, bounds);
        std::set<std::string> got;
        for (const auto& n : g.nodes) got.insert(point_key(n));
        ++checked;
        const bool is_mu = alpha == BiSeq::zeros();
        if (got != expected) fail(r, {{"alpha", alpha.key()}, {"bfs_nodes", got.size()}, {"expected", expected.size()}});
        if (!is_mu && g.status != OrbitStatus::Complete)
            fail(r, {{"alpha", alpha.key()}, {"status", to_string(g.status)}});
    }
    r.metrics = {{"sequences", checked}};
    r.runtime_seconds = clock.seconds();
    return r;
}

ProbeReport verify_radius_conditions(long n_max) {
    Stopwatch clock;
    ProbeReport r = start("radii", "family-b", "l:radii", {{"n_max", n_max}});
    FamilyB b;
    try {
        b = build_family_B(n_max);
    } catch (const RadiusSearchExhausted& e) {
        fail(r, {{"reason", e.what()}});
        r.runtime_seconds = clock.seconds();
        return r;
    }
    RadiusCheck check = verify_radii(b);
    if (!check.ok) fail(r, {{"reason", check.failure}});
    for (std::size_t n = 1; n < b.r_sq.size(); ++n)
        if (!(b.r_sq[n] < b.r_sq[n - 1])) fail(r, {{"reason", "radii not decreasing"}, {"n", n}});
    nlohmann::json k = b.radius_exponent;
    r.metrics = {{"radius_exponents", k}};
    r.runtime_seconds = clock.seconds();
    return r;
}

ProbeReport verify_isometry_b(long n_max, bool mutate) {
    Stopwatch clock;
    FamilyBOptions opts;
    opts.mutate_top_band = mutate;
    FamilyB b = build_family_B(n_max, opts);
    IsometryCertificate cert = certify_orbit_isometry(b.gens(), TorusLevelPoint{pt(Rat(0), Rat(0)), 0}, {});
    ProbeReport r = isometry_report(mutate ? "family-b-mutated" : "family-b", cert, "p:widetildegnotsic");
    r.probe = "verify-isometry-b";
    r.parameters = {{"n_max", n_max}, {"mutate", mutate}, {"base", r.parameters["base"]}};
    r.metrics["certificate"] = cert.to_json();
    r.runtime_seconds = clock.seconds();
    return r;
}

ProbeReport verify_isometry_a(long max_level) {
    Stopwatch clock;
    FamilyA a = build_family_A(max_level);
    IsometryCertificate cert = certify_orbit_isometry(a.S.F, TorusLevelPoint{pt(Rat(0), Rat(0)), 0}, {});
    ProbeReport r = isometry_report(a.S.name, cert, "p:gmathcalg");
    r.probe = "verify-isometry-a";
    r.parameters = {{"max_level", max_level}, {"base", r.parameters["base"]}};
    r.metrics["certificate"] = cert.to_json();
    r.runtime_seconds = clock.seconds();
    return r;
}

ProbeReport verify_cantor_mu(long levels) {
    Stopwatch clock;
    ProbeReport r = start("cantor-mu", "cantor", "l:zeroezroinf", {{"levels", levels}});
    const auto gens = build_cantor();
    for (long n = 0; n <= levels; ++n)
        if (apply_generator(gens[0], 1, CantorPoint{n, BiSeq::zeros()}))
            fail(r, {{"reason", "f defined at (n, mu)"}, {"n", n}});
    OrbitBounds bounds;
    bounds.max_level = levels;
    IsometryCertificate cert = certify_orbit_isometry(gens, CantorPoint{0, BiSeq::zeros()}, bounds);
    if (cert.verdict != Verdict::Established) fail(r, {{"reason", "non-isometric letter on the orbit of (0, mu)"}});
    r.metrics = {{"orbit_nodes", cert.nodes.size()}, {"orbit_status", to_string(cert.orbit_status)},
                 {"piece_checks", cert.checks.size()}};
    r.runtime_seconds = clock.seconds();
    return r;
}

ProbeReport verify_dpo_rz(std::size_t samples, std::size_t global_samples, std::size_t node_bound) {
    Stopwatch clock;
    ProbeReport r = start("dpo-rz", "line", "d:dpo",
                          {{"samples", samples}, {"global_samples", global_samples}, {"node_bound", node_bound}});
    const Rat lo(0), hi(3, 2);
    DpoSetup s;
    s.gens = {build_line()};
    s.U = [lo, hi](const SpacePoint& p) {
        const Rat& t = std::get<LinePoint>(p).t;
        return lo < t && t < hi;
    };
    s.U_description = "(0,3/2)";
    s.line_interval = std::make_pair(lo, hi);
    s.eps = Rat(0);
    for (std::size_t k = 0; k < samples; ++k)
        s.samples.push_back(LinePoint{hi * Rat(static_cast<long>(2 * k + 1), static_cast<long>(2 * samples))});
    ProbeReport dpo = probe_dpo("line", s);
    if (dpo.verdict != Verdict::Established) fail(r, {{"reason", "restricted orbit without witness"}});
    if (dpo.metrics["max_restricted_orbit_size"].get<std::size_t>() > 2)
        fail(r, {{"reason", "restricted orbit larger than 2"}});

    std::vector<SpacePoint> starts;
    for (std::size_t k = 0; k < global_samples; ++k)
        starts.push_back(LinePoint{Rat(static_cast<long>(k), 7) - Rat(3)});
    GlobalFiniteSearch g = global_finite_orbit_search(s.gens, starts, node_bound);
    if (g.finite_found != 0) fail(r, {{"reason", "a global orbit closed"}, {"count", g.finite_found}});
    r.metrics = {{"restricted", dpo.metrics}, {"global_samples", g.samples}, {"global_finite_found", g.finite_found}};
    r.witnesses = dpo.witnesses;
    r.runtime_seconds = clock.seconds();
    return r;
}

}  // namespace pdyn
