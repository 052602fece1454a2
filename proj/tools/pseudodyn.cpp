// Command-line front end: build named systems, run exact verifications and
// bounded probes, write JSON reports and CSV summaries.

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pseudodyn/catalog.hpp"
#include "pseudodyn/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pdyn;

namespace {

class BadParams : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    std::string command;
    std::string target;  // system, lemma or probe name
    std::string system;
    json params = json::object();
    std::uint64_t seed = 1;
    std::string mode = "both";
    std::string out = ".";

    json to_json() const {
        return {{"command", command}, {"target", target}, {"system", system}, {"params", params},
                {"seed", seed},       {"mode", mode},     {"out", out}};
    }
};

std::uint64_t default_seed() {
    const char* env = std::getenv("PSEUDODYN_SEED");
    if (!env || !*env) return 1;
    try {
        return std::stoull(env);
    } catch (const std::exception&) {
        throw BadParams(std::string("PSEUDODYN_SEED is not an integer: ") + env);
    }
}

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

Rat rat_param(const std::string& text, const char* what) {
    try {
        return Rat::parse(text);
    } catch (const std::exception& e) {
        throw BadParams(std::string(what) + ": " + e.what());
    }
}

std::pair<Rat, Rat> pair_param(const std::string& text, char sep, const char* what) {
    const auto at = text.find(sep);
    if (at == std::string::npos) throw BadParams(std::string(what) + ": expected two values separated by '" + sep + "'");
    return {rat_param(text.substr(0, at), what), rat_param(text.substr(at + 1), what)};
}

TorusPoint point_param(const std::string& text, const char* what) {
    auto [x, y] = pair_param(text, ',', what);
    return {ModOne(x), ModOne(y)};
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
}

void write_report(const RunConfig& cfg, ProbeReport rep, const std::string& stem) {
    rep.parameters["config"] = cfg.to_json();
    const fs::path dir(cfg.out);
    write_file(dir / (stem + ".json"), rep.to_json(utc_timestamp()).dump(2) + "\n");
    const fs::path csv = dir / "summary.csv";
    const bool fresh = !fs::exists(csv);
    std::ofstream os(csv, std::ios::app);
    if (fresh) os << ProbeReport::csv_header() << '\n';
    os << rep.csv_row() << '\n';
    json brief = rep.metrics;
    brief.erase("certificate");
    std::cout << rep.probe << ' ' << rep.system << ' ' << to_string(rep.verdict) << ' ' << brief.dump() << '\n';
}

// ---------------------------------------------------------------- build

struct BuildArgs {
    std::vector<std::string> h, v;
    long max_level = 8;
    long n_max = 4;
    bool mutate = false;
};

int run_build(RunConfig& cfg, const BuildArgs& a) {
    json manifest;
    const fs::path dir(cfg.out);
    if (cfg.target == "linked-twist") {
        if (a.h.empty() && a.v.empty()) throw BadParams("linked-twist needs --h or --v intervals");
        LinkedTwistSpec spec;
        try {
            for (const auto& s : a.h) spec.h_intervals.push_back(parse_twist_interval(s));
            for (const auto& s : a.v) spec.v_intervals.push_back(parse_twist_interval(s));
        } catch (const std::exception& e) {
            throw BadParams(e.what());
        }
        cfg.params = {{"h", a.h}, {"v", a.v}};
        manifest = manifest_linked_twist(spec, build_linked_twist(spec));
    } else if (cfg.target == "family-a") {
        if (a.max_level < 0) throw BadParams("--max-level must be >= 0");
        cfg.params = {{"max_level", a.max_level}};
        manifest = manifest_family_a(build_family_A(a.max_level));
    } else if (cfg.target == "family-b") {
        if (a.n_max < 1) throw BadParams("--n-max must be >= 1");
        cfg.params = {{"n_max", a.n_max}, {"mutate", a.mutate}};
        FamilyBOptions opts;
        opts.mutate_top_band = a.mutate;
        FamilyB b = build_family_B(a.n_max, opts);
        manifest = manifest_family_b(b);
        write_file(dir / "family_b_Q.csv", family_b_q_csv(b));
    } else if (cfg.target == "cat-map") {
        manifest = manifest_generators("cat-map", {build_cat_map()});
    } else if (cfg.target == "cantor") {
        manifest = manifest_generators("cantor", build_cantor());
    } else if (cfg.target == "line") {
        manifest = manifest_generators("line", {build_line()});
    } else {
        throw UnknownSystem("unknown system: " + cfg.target);
    }
    cfg.system = cfg.target;
    json doc = {{"schema_version", kReportSchemaVersion}, {"config", cfg.to_json()}, {"system", manifest}};
    write_file(dir / "systems.json", doc.dump(2) + "\n");
    std::cout << "wrote " << (dir / "systems.json").string() << '\n';
    return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    long n = 5, m = 5;
    long n_max = 8;
    long period = 4, levels = 6;
    bool mutate = false;
    std::string certificate;
};

int run_verify(RunConfig& cfg, const VerifyArgs& a) {
    ProbeReport rep;
    const std::string& id = cfg.target;
    if (cfg.mode == "float") throw BadParams("verifications are exact; --mode float does not apply");
    if (id == "tq") {
        rep = verify_tq(a.n, a.m);
    } else if (id == "finiteorbits") {
        rep = verify_finite_orbits(a.n);
    } else if (id == "gna") {
        rep = verify_gna(a.period, a.levels);
    } else if (id == "radii") {
        rep = verify_radius_conditions(a.n);
    } else if (id == "isometry-b") {
        rep = verify_isometry_b(a.n_max, a.mutate);
        const fs::path cert = a.certificate.empty() ? fs::path(cfg.out) / "isometry_b_certificate.json"
                                                    : fs::path(a.certificate);
        write_file(cert, rep.metrics["certificate"].dump(2) + "\n");
    } else if (id == "isometry-a") {
        rep = verify_isometry_a(a.levels);
    } else if (id == "cantor-mu") {
        rep = verify_cantor_mu(a.levels);
    } else if (id == "dpo-rz") {
        rep = verify_dpo_rz(64, 100, 1000);
    } else {
        throw BadParams("unknown lemma: " + id);
    }
    cfg.system = rep.system;
    cfg.params = rep.parameters;
    write_report(cfg, rep, "verify_" + id);
    if (rep.verdict == Verdict::Established) return 0;
    std::cerr << "verification failed: " << rep.witnesses.dump() << '\n';
    return 1;
}

// ---------------------------------------------------------------- probes

struct ProbeArgs {
    std::string system;
    long level = 1;
    std::size_t steps = 1000000;
    std::size_t grid = 32;
    std::size_t walkers = 1;
    std::string start = "3/10,2/5";
    std::string u = "0:3/2";
    std::string eps;
    long den = 16;
    std::size_t samples = 0;  // 0: per-system default
    std::size_t depth = 0;  // 0: per-probe default
    std::string radius = "1/1024";
    std::string threshold = "1/4";
    std::string point;
    std::vector<std::string> rho;
    long max_level = 8;
    std::string r = "1/8", c = "1/8", half = "1/16";
    std::string w1, w2;
    std::vector<std::string> h, v;
};

Generator torus_map_generator(const std::string& id, const Region& dom, const PwMap& map) {
    TorusRule r;
    r.levels[0] = {dom, map};
    return {id, SpaceKind::Torus, r, std::nullopt};
}

ProbeReport probe_transitivity_cmd(RunConfig& cfg, const ProbeArgs& a) {
    if (cfg.mode == "exact") throw BadParams("transitivity is a float measurement; use --mode float or both");
    TransitivityOptions opt;
    opt.grid = a.grid;
    opt.max_steps = a.steps;
    opt.seed = cfg.seed;
    opt.walkers = a.walkers;
    auto [sx, sy] = pair_param(a.start, ',', "--start");
    const FloatTorusPoint start{sx.to_double(), sy.to_double(), 0};
    cfg.params = {{"level", a.level}, {"steps", a.steps}, {"grid", a.grid}, {"walkers", a.walkers}, {"start", a.start}};
    if (a.system == "cat-map") return probe_transitivity("cat-map", {build_cat_map()}, start, Region::full(), opt);
    if (a.system == "family-b") {
        if (a.level < 0) throw BadParams("--level must be >= 0");
        FamilyB b = build_family_B(std::max(a.level, 1L));
        return probe_transitivity("family-b", {family_b_level_twist(b, a.level)}, start,
                                  b.M[static_cast<std::size_t>(a.level)], opt);
    }
    if (a.system == "family-a") {
        if (a.level < 0) throw BadParams("--level must be >= 0");
        FamilyA fa = build_family_A(a.level);
        const auto l = static_cast<std::size_t>(a.level);
        return probe_transitivity("family-a", {torus_map_generator("T" + std::to_string(a.level), fa.M[l], fa.T[l])},
                                  start, fa.M[l], opt);
    }
    if (a.system == "linked-twist") {
        LinkedTwistSpec spec;
        for (const auto& s : a.h) spec.h_intervals.push_back(parse_twist_interval(s));
        for (const auto& s : a.v) spec.v_intervals.push_back(parse_twist_interval(s));
        LinkedTwistSystem sys = build_linked_twist(spec);
        cfg.params["h"] = a.h;
        cfg.params["v"] = a.v;
        return probe_transitivity("linked-twist", {torus_map_generator("T", sys.M, sys.T)}, start, sys.M, opt);
    }
    throw UnknownSystem("transitivity: unknown system " + a.system);
}

ProbeReport probe_dpo_cmd(RunConfig& cfg, const ProbeArgs& a) {
    if (a.system == "line") {
        auto [lo, hi] = pair_param(a.u, ':', "--u");
        DpoSetup s = line_dpo_setup(lo, hi, a.samples ? a.samples : 64);
        if (!a.eps.empty()) s.eps = rat_param(a.eps, "--eps");
        cfg.params = {{"u", a.u}, {"samples", s.samples.size()}, {"eps", s.eps.str()}};
        return probe_dpo("line", s);
    }
    if (a.system == "cat-map") {
        if (a.den < 1) throw BadParams("--den must be >= 1");
        cfg.params = {{"den", a.den}};
        return probe_dpo("cat-map", cat_map_dpo_setup(a.den));
    }
    if (a.system == "cantor") {
        const std::size_t n = a.samples ? a.samples : 20;
        cfg.params = {{"samples", n}};
        return probe_dpo("cantor", cantor_dpo_setup(n));
    }
    throw UnknownSystem("dpo: unknown system " + a.system);
}

std::vector<SpacePoint> torus_samples(std::size_t count, std::uint64_t seed, bool levelled) {
    std::vector<SpacePoint> out;
    for (const auto& p : random_grid_points(count, 1024, seed)) {
        if (levelled) out.push_back(TorusLevelPoint{p, 0});
        else out.push_back(p);
    }
    return out;
}

ProbeReport probe_sensitivity_cmd(RunConfig& cfg, const ProbeArgs& a) {
    SensitivityOptions opt;
    opt.radii = {rat_param(a.radius, "--radius").to_double()};
    opt.depth = a.depth ? a.depth : 10;
    opt.seed = cfg.seed;
    opt.threshold = rat_param(a.threshold, "--threshold").to_double();
    opt.confirm_exact = cfg.mode != "float";
    const std::size_t n = a.samples ? a.samples : 32;
    cfg.params = {{"depth", opt.depth}, {"radius", a.radius}, {"threshold", a.threshold}, {"samples", n}};
    if (a.system == "cat-map") return probe_sensitivity("cat-map", {build_cat_map()}, torus_samples(n, cfg.seed, false), opt);
    if (a.system == "family-a") {
        FamilyA fa = build_family_A(a.max_level);
        cfg.params["max_level"] = a.max_level;
        return probe_sensitivity("family-a", fa.group(), torus_samples(n, cfg.seed, true), opt);
    }
    if (a.system == "family-a-s") {
        FamilyA fa = build_family_A(a.max_level);
        cfg.params["max_level"] = a.max_level;
        return probe_sensitivity(fa.S.name, fa.S.F, torus_samples(n, cfg.seed, true), opt);
    }
    if (a.system == "family-b") {
        FamilyB b = build_family_B(std::max(a.level, 1L));
        cfg.params["n_max"] = std::max(a.level, 1L);
        return probe_sensitivity("family-b", b.gens(), torus_samples(n, cfg.seed, true), opt);
    }
    throw UnknownSystem("sensitivity: unknown system " + a.system);
}

ProbeReport probe_halo_cmd(RunConfig& cfg, const ProbeArgs& a) {
    HaloOptions opt;
    opt.seed = cfg.seed;
    if (a.depth) opt.depth = a.depth;
    for (const auto& s : a.rho) opt.rho_schedule.push_back(rat_param(s, "--rho"));
    if (!a.rho.empty()) opt.rho_schedule.erase(opt.rho_schedule.begin());
    cfg.params = {{"depth", opt.depth}, {"rho", a.rho}};
    if (a.system == "boxed-cat-map") {
        const TorusPoint x = point_param(a.point.empty() ? "1/2,1/2" : a.point, "--point");
        cfg.params["point"] = to_json(x);
        return halo_dichotomy_probe(build_boxed_cat_map(), x, opt);
    }
    if (a.system == "family-a") {
        if (a.rho.empty()) opt.rho_schedule = {Rat::pow2(-20)};
        const TorusPoint x = point_param(a.point.empty() ? "0,0" : a.point, "--point");
        cfg.params["point"] = to_json(x);
        cfg.params["max_level"] = a.max_level;
        return halo_dichotomy_probe(build_family_A(a.max_level).S, TorusLevelPoint{x, 0}, opt);
    }
    throw UnknownSystem("halo: unknown system " + a.system);
}

ProbeReport probe_naive_cmd(RunConfig& cfg, const ProbeArgs& a) {
    NaiveDemoOptions opt;
    opt.seed = cfg.seed;
    opt.c = rat_param(a.c, "--c");
    if (a.depth) opt.depth = a.depth;
    const Rat half = rat_param(a.half, "--half"), r = rat_param(a.r, "--r");
    std::vector<Generator> gens;
    TorusPoint x;
    std::string w1 = a.w1, w2 = a.w2;
    if (a.system == "cat-map") {
        gens = {build_cat_map()};
        x = point_param(a.point.empty() ? "0,0" : a.point, "--point");
        if (w1.empty()) w1 = "0,1/4";
        if (w2.empty()) w2 = "0,3/4";
    } else if (a.system == "family-b") {
        gens = build_family_B(2).gens();
        x = point_param(a.point.empty() ? "1/2,1/2" : a.point, "--point");
        if (w1.empty()) w1 = "1/2,1/4";
        if (w2.empty()) w2 = "1/2,3/4";
    } else {
        throw UnknownSystem("naive-demo: unknown system " + a.system);
    }
    auto [ax, ay] = pair_param(w1, ',', "--w1");
    auto [bx, by] = pair_param(w2, ',', "--w2");
    opt.W1 = box_around(ax, ay, half);
    opt.W2 = box_around(bx, by, half);
    cfg.params = {{"point", to_json(x)}, {"r", a.r}, {"c", a.c}, {"w1", w1}, {"w2", w2}, {"half", a.half},
                  {"depth", opt.depth}};
    return naive_sensitivity_demo(a.system, gens, x, r, opt);
}

int run_probe(RunConfig& cfg, const ProbeArgs& a) {
    cfg.system = a.system;
    ProbeReport rep;
    if (cfg.target == "transitivity") rep = probe_transitivity_cmd(cfg, a);
    else if (cfg.target == "dpo") rep = probe_dpo_cmd(cfg, a);
    else if (cfg.target == "sensitivity") rep = probe_sensitivity_cmd(cfg, a);
    else if (cfg.target == "halo") rep = probe_halo_cmd(cfg, a);
    else if (cfg.target == "naive-demo") rep = probe_naive_cmd(cfg, a);
    else throw BadParams("unknown probe: " + cfg.target);
    write_report(cfg, rep, "probe_" + cfg.target);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudogroup dynamics: systems, exact verifications and probes"};
    app.set_help_flag("--help", "print help");  // --h is a twist-interval flag
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    app.set_config("--config", "", "flat key=value file mirroring the flags");

    RunConfig cfg;
    try {
        cfg.seed = default_seed();
    } catch (const BadParams& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    app.add_option("--seed", cfg.seed, "RNG seed (default: PSEUDODYN_SEED or 1)");
    app.add_option("--mode", cfg.mode, "numeric mode")->check(CLI::IsMember({"exact", "float", "both"}));
    app.add_option("--out", cfg.out, "output directory");

    BuildArgs build_args;
    auto* build = app.add_subcommand("build", "build a named system and write systems.json");
    build->add_option("name", cfg.target, "linked-twist | family-a | family-b | cat-map | cantor | line")->required();
    build->add_option("--h", build_args.h, "horizontal twist interval, e.g. \"[1/4,3/4]:1\"");
    build->add_option("--v", build_args.v, "vertical twist interval");
    build->add_option("--max-level", build_args.max_level);
    build->add_option("--n-max", build_args.n_max);
    build->add_flag("--mutate", build_args.mutate, "family-b negative control");

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "exact check of one lemma; exit 0 iff established");
    verify->add_option("lemma", cfg.target,
                       "tq | finiteorbits | gna | radii | isometry-b | isometry-a | cantor-mu | dpo-rz")
        ->required();
    verify->add_option("--n", verify_args.n);
    verify->add_option("--m", verify_args.m);
    verify->add_option("--n-max", verify_args.n_max);
    verify->add_option("--period", verify_args.period);
    verify->add_option("--levels", verify_args.levels);
    verify->add_flag("--mutate", verify_args.mutate);
    verify->add_option("--certificate", verify_args.certificate, "certificate path for isometry-b");

    ProbeArgs probe_args;
    auto* probe = app.add_subcommand("probe", "bounded measurement; exit 0 on any verdict");
    probe->add_option("probe", cfg.target, "transitivity | dpo | sensitivity | halo | naive-demo")->required();
    probe->add_option("--system", probe_args.system)->required();
    probe->add_option("--level", probe_args.level);
    probe->add_option("--steps", probe_args.steps);
    probe->add_option("--grid", probe_args.grid);
    probe->add_option("--walkers", probe_args.walkers);
    probe->add_option("--start", probe_args.start, "\"x,y\"");
    probe->add_option("--u", probe_args.u, "\"lo:hi\"");
    probe->add_option("--eps", probe_args.eps);
    probe->add_option("--den", probe_args.den);
    probe->add_option("--samples", probe_args.samples);
    probe->add_option("--depth", probe_args.depth);
    probe->add_option("--radius", probe_args.radius);
    probe->add_option("--threshold", probe_args.threshold);
    probe->add_option("--point", probe_args.point, "\"x,y\"");
    probe->add_option("--rho", probe_args.rho);
    probe->add_option("--max-level", probe_args.max_level);
    probe->add_option("--r", probe_args.r);
    probe->add_option("--c", probe_args.c);
    probe->add_option("--w1", probe_args.w1, "\"x,y\" centre of W1");
    probe->add_option("--w2", probe_args.w2, "\"x,y\" centre of W2");
    probe->add_option("--half", probe_args.half, "half-width of the W boxes");
    probe->add_option("--h", probe_args.h);
    probe->add_option("--v", probe_args.v);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*build) {
            cfg.command = "build";
            return run_build(cfg, build_args);
        }
        if (*verify) {
            cfg.command = "verify";
            return run_verify(cfg, verify_args);
        }
        cfg.command = "probe";
        return run_probe(cfg, probe_args);
    } catch (const UnknownSystem& e) {
        std::cerr << "unknown system: " << e.what() << '\n';
        return 2;
    } catch (const BadParams& e) {
        std::cerr << "bad parameters: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "bad parameters: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
