#include "pseudodyn/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "pseudodyn/kernels.hpp"

namespace pdyn {

namespace {

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

FloatTorusPoint to_float(const SpacePoint& p) {
    if (const auto* t = std::get_if<TorusPoint>(&p)) return {t->x.to_double(), t->y.to_double(), 0};
    if (const auto* t = std::get_if<TorusLevelPoint>(&p)) return {t->p.x.to_double(), t->p.y.to_double(), t->level};
    throw SpaceMismatch("float probes need torus points, got " + to_string(kind_of(p)));
}

const TorusPoint& torus_of(const SpacePoint& p) {
    if (const auto* t = std::get_if<TorusPoint>(&p)) return *t;
    if (const auto* t = std::get_if<TorusLevelPoint>(&p)) return t->p;
    throw SpaceMismatch("expected a torus point, got " + to_string(kind_of(p)));
}

SpacePoint with_torus(const SpacePoint& like, const TorusPoint& q) {
    if (std::holds_alternative<TorusPoint>(like)) return q;
    return TorusLevelPoint{q, level_of(like)};
}

const TorusRule& torus_rule(const Generator& g) {
    const auto* r = std::get_if<TorusRule>(&g.rule);
    if (!r) throw UnsupportedRegion("generator " + g.id + " is not a torus map");
    return *r;
}

double float_dist(const FloatTorusPoint& a, const FloatTorusPoint& b) {
    if (a.level != b.level) return HUGE_VAL;
    return std::sqrt(sq_dist_f(a.x, a.y, b.x, b.y));
}

Rat exact_of(double v) { return Rat(mpq_class(v)); }

// Upper bound for r^2 as an exact rational.
Quad sq_upper(double r) { return Quad(exact_of(std::nextafter(r * r * (1 + 1e-12), HUGE_VAL))); }

nlohmann::json linear_json(const Affine2& a) {
    using nlohmann::json;
    return json::array({json::array({a.m[0].str(), a.m[1].str()}), json::array({a.m[2].str(), a.m[3].str()})});
}

// ---------------------------------------------------------------- word search

struct SeparationResult {
    double best = 0;
    Word word;
    std::size_t y_index = 0;
    std::size_t layers = 0;
    std::size_t words = 0;
    bool truncated = false;  // frontier cap hit before `depth`
};

// Frontier nodes carry every perturbed point; this keeps a layer near 100 MB.
constexpr std::size_t kMaxFrontier = std::size_t{1} << 18;

// Layered search over reduced nonempty words; stops after the first layer at
// which the best separation reaches stop_at, or when the frontier cap is hit.
SeparationResult search_separation(const std::vector<Generator>& gens, const FloatTorusPoint& x,
                                   const std::vector<FloatTorusPoint>& ys, std::size_t depth, double stop_at) {
    struct Node {
        Word word;
        FloatTorusPoint x;
        std::vector<FloatTorusPoint> ys;
        std::vector<char> alive;
    };
    SeparationResult r;
    std::vector<Node> layer{{{}, x, ys, std::vector<char>(ys.size(), 1)}};
    for (std::size_t d = 1; d <= depth && !layer.empty(); ++d) {
        std::vector<Node> next;
        for (const Node& n : layer) {
            for (std::size_t gi = 0; gi < gens.size(); ++gi) {
                for (int e : {1, -1}) {
                    if (!n.word.empty() && n.word.back().gen == gi && n.word.back().exponent == -e) continue;
                    FloatTorusPoint nx = n.x;
                    if (!apply_generator_f(gens[gi], e, nx)) continue;
                    Node c{n.word, nx, n.ys, n.alive};
                    c.word.push_back({gi, e});
                    bool any = false;
                    for (std::size_t i = 0; i < c.ys.size(); ++i) {
                        if (!c.alive[i]) continue;
                        if (!apply_generator_f(gens[gi], e, c.ys[i])) {
                            c.alive[i] = 0;
                            continue;
                        }
                        any = true;
                        const double sep = float_dist(nx, c.ys[i]);
                        if (sep > r.best) {
                            r.best = sep;
                            r.word = c.word;
                            r.y_index = i;
                        }
                    }
                    ++r.words;
                    if (any) next.push_back(std::move(c));
                }
            }
        }
        r.layers = d;
        if (r.best >= stop_at) break;
        if (next.size() > kMaxFrontier && d < depth) {
            r.truncated = true;
            break;
        }
        layer = std::move(next);
    }
    return r;
}

std::vector<FloatTorusPoint> float_perturbations(const FloatTorusPoint& x, double r, std::size_t count,
                                                 std::mt19937_64& rng) {
    std::vector<FloatTorusPoint> ys;
    for (std::size_t k = 0; k < count; ++k) {
        double angle, rad;
        if (k < 8) {
            angle = 2 * std::numbers::pi * static_cast<double>(k) / 8;
            rad = 0.999 * r;
        } else {
            angle = 2 * std::numbers::pi * unit_draw(rng);
            rad = 0.999 * r * std::sqrt(unit_draw(rng));
        }
        ys.push_back({frac_f(x.x + rad * std::cos(angle)), frac_f(x.y + rad * std::sin(angle)), x.level});
    }
    return ys;
}

// Exact offsets of norm < 1: eight fixed rational directions, then seeded
// lattice points of the unit disc.
std::vector<std::array<Rat, 2>> exact_offsets(std::size_t count, std::mt19937_64& rng) {
    static const long dirs[8][2] = {{5, 0}, {0, 5}, {-5, 0}, {0, -5}, {3, 4}, {4, -3}, {-3, -4}, {-4, 3}};
    std::vector<std::array<Rat, 2>> out;
    for (std::size_t k = 0; k < count && k < 8; ++k)
        out.push_back({Rat(dirs[k][0] * 99, 500), Rat(dirs[k][1] * 99, 500)});
    while (out.size() < count) {
        long a = static_cast<long>(rng() % 2001) - 1000, b = static_cast<long>(rng() % 2001) - 1000;
        if (a * a + b * b >= 1000000) continue;
        out.push_back({Rat(a, 1000), Rat(b, 1000)});
    }
    return out;
}

// Float clearance of a path through one stage sequence, measured at the
// start point and scaled back by the norms of the pieces already applied.
double map_clearance_f(const PwMap& map, double x, double y) {
    double clear = HUGE_VAL, norm = 1;
    for (const auto& stage : map.stages()) {
        int used = -1;
        for (std::size_t k = 0; k < stage.size(); ++k) {
            clear = std::min(clear, stage[k].region.boundary_clearance_f(x, y) / norm);
            if (used < 0 && stage[k].region.contains_f(x, y)) used = static_cast<int>(k);
        }
        PwMap({stage}).apply_f(x, y);
        if (used >= 0) norm *= stage[static_cast<std::size_t>(used)].map.norm_bound();
    }
    return clear;
}

int first_piece(const Stage& s, const TorusPoint& p) {
    for (std::size_t k = 0; k < s.size(); ++k)
        if (s[k].region.contains(p)) return static_cast<int>(k);
    return -1;
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Established: return "Established";
        case Verdict::EvidenceFor: return "EvidenceFor";
        case Verdict::NoWitnessUpToBound: return "NoWitnessUpToBound";
        case Verdict::CounterexampleFound: return "CounterexampleFound";
    }
    return "unknown";
}

// ---------------------------------------------------------------- report

nlohmann::json ProbeReport::payload() const {
    return {{"schema_version", kReportSchemaVersion},
            {"probe", probe},
            {"system", system},
            {"anchor", anchor},
            {"parameters", parameters},
            {"verdict", to_string(verdict)},
            {"metrics", metrics},
            {"witnesses", witnesses}};
}

nlohmann::json ProbeReport::to_json(const std::string& timestamp) const {
    nlohmann::json j = payload();
    j["run"] = {{"runtime_seconds", runtime_seconds}, {"timestamp", timestamp}};
    return j;
}

std::string ProbeReport::csv_header() { return "probe,system,anchor,verdict,metrics"; }

std::string ProbeReport::csv_row() const {
    std::string m = metrics.dump();
    std::string quoted;
    for (char ch : m) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return probe + ',' + system + ',' + anchor + ',' + to_string(verdict) + ",\"" + quoted + '"';
}

// ---------------------------------------------------------------- transitivity

ProbeReport probe_transitivity(const std::string& system, const std::vector<Generator>& gens,
                               const FloatTorusPoint& start, const Region& target, const TransitivityOptions& opt) {
    Stopwatch clock;
    ProbeReport rep;
    rep.probe = "transitivity";
    rep.system = system;
    rep.anchor = "t:twisttt";
    nlohmann::json ids = nlohmann::json::array();
    for (const auto& g : gens) ids.push_back(g.id);
    rep.parameters = {{"generators", ids},     {"grid", opt.grid},     {"max_steps", opt.max_steps},
                      {"seed", opt.seed},      {"level", opt.level},   {"threshold", opt.threshold},
                      {"walkers", opt.walkers}, {"start", {num(start.x), num(start.y), start.level}}};

    const std::size_t G = opt.grid;
    std::vector<char> is_target(G * G, 0), seen(G * G, 0);
    std::size_t targets = 0;
    for (std::size_t i = 0; i < G; ++i)
        for (std::size_t j = 0; j < G; ++j) {
            bool meets = false;
            for (int a = 0; a < 5 && !meets; ++a)
                for (int b = 0; b < 5 && !meets; ++b)
                    meets = target.contains_f((static_cast<double>(i) + (a + 0.5) / 5) / static_cast<double>(G),
                                              (static_cast<double>(j) + (b + 0.5) / 5) / static_cast<double>(G));
            is_target[i * G + j] = meets;
            targets += meets;
        }
    auto cell = [&](double x, double y) {
        auto i = std::min(G - 1, static_cast<std::size_t>(x * static_cast<double>(G)));
        auto j = std::min(G - 1, static_cast<std::size_t>(y * static_cast<double>(G)));
        return i * G + j;
    };
    auto visit = [&](const FloatTorusPoint& p) {
        if (p.level == opt.level) seen[cell(p.x, p.y)] = 1;
    };

    std::mt19937_64 rng(opt.seed);
    std::size_t steps = 0;
    bool stuck = false;
    std::string mode = "walk";

    std::optional<kernels::Program> prog;
    const PartialMap* pm = nullptr;
    if (opt.walkers > 1 && gens.size() == 1) {
        if (const auto* r = std::get_if<TorusRule>(&gens[0].rule); r && r->level_shift == 0) {
            auto it = r->levels.find(start.level);
            if (it != r->levels.end()) {
                prog = kernels::compile(it->second.map);
                pm = &it->second;
            }
        }
    }

    if (prog) {
        mode = "ensemble";
        const std::size_t W = opt.walkers;
        std::vector<double> xs(W), ys(W);
        std::vector<char> alive(W, 1);
        for (std::size_t k = 0; k < W; ++k) {
            xs[k] = frac_f(start.x + 1e-6 * (unit_draw(rng) - 0.5));
            ys[k] = frac_f(start.y + 1e-6 * (unit_draw(rng) - 0.5));
        }
        visit(start);
        const std::size_t rounds = opt.max_steps / W;
        for (std::size_t s = 0; s < rounds; ++s) {
            kernels::run(*prog, xs.data(), ys.data(), W);
            for (std::size_t k = 0; k < W; ++k) {
                if (!alive[k]) continue;
                if (!pm->domain.contains_f(xs[k], ys[k])) {
                    alive[k] = 0;
                    continue;
                }
                visit({xs[k], ys[k], start.level});
                ++steps;
            }
        }
        rep.metrics["kernel_isa"] = kernels::active_isa() == kernels::Isa::Avx2 ? "avx2" : "scalar";
    } else {
        FloatTorusPoint p = start;
        visit(p);
        std::optional<Letter> last;
        std::vector<Letter> letters;
        for (std::size_t gi = 0; gi < gens.size(); ++gi)
            for (int e : {1, -1}) letters.push_back({gi, e});
        for (; steps < opt.max_steps; ++steps) {
            std::vector<Letter> order;
            for (const auto& l : letters)
                if (!last || !(l.gen == last->gen && l.exponent == -last->exponent)) order.push_back(l);
            std::shuffle(order.begin(), order.end(), rng);
            bool moved = false;
            for (const auto& l : order) {
                FloatTorusPoint q = p;
                if (!apply_generator_f(gens[l.gen], l.exponent, q)) continue;
                p = q;
                last = l;
                moved = true;
                break;
            }
            if (!moved) {
                stuck = true;
                break;
            }
            visit(p);
        }
    }

    std::size_t covered = 0;
    for (std::size_t k = 0; k < G * G; ++k) covered += is_target[k] && seen[k];
    const double coverage = targets ? static_cast<double>(covered) / static_cast<double>(targets) : 0.0;
    rep.metrics["mode"] = mode;
    rep.metrics["target_cells"] = targets;
    rep.metrics["covered_cells"] = covered;
    rep.metrics["coverage"] = coverage;
    rep.metrics["steps"] = steps;
    rep.metrics["stuck"] = stuck;
    rep.verdict = coverage >= opt.threshold ? Verdict::EvidenceFor : Verdict::NoWitnessUpToBound;
    rep.runtime_seconds = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------- DPO

std::vector<Rat> line_restricted_orbit(const std::vector<Generator>& gens, const Rat& t, const Rat& lo,
                                       const Rat& hi) {
    // The translations generate d Z with d the gcd of the shifts.
    mpq_class d = 0;
    for (const auto& g : gens) {
        const auto* tr = std::get_if<TranslationRule>(&g.rule);
        if (!tr) throw SpaceMismatch("line orbit needs translation generators: " + g.id);
        mpq_class s = abs(tr->shift.raw());
        if (d == 0) {
            d = s;
        } else if (s != 0) {
            mpz_class n = gcd(mpz_class(d.get_num() * s.get_den()), mpz_class(s.get_num() * d.get_den()));
            d = mpq_class(n, mpz_class(d.get_den() * s.get_den()));
            d.canonicalize();
        }
    }
    std::vector<Rat> out;
    if (d == 0) {
        if (lo < t && t < hi) out.push_back(t);
        return out;
    }
    const Rat step(d);
    Rat k(mpq_class(((lo - t) / step).floor() + 1));
    for (Rat v = t + k * step; v < hi; v += step) out.push_back(v);
    return out;
}

ProbeReport probe_dpo(const std::string& system, const DpoSetup& setup) {
    Stopwatch clock;
    ProbeReport rep;
    rep.probe = "dpo";
    rep.system = system;
    rep.anchor = "d:dpo";
    rep.parameters = {{"U", setup.U_description},
                      {"eps", setup.eps.str()},
                      {"samples", setup.samples.size()},
                      {"max_nodes", setup.bounds.max_nodes},
                      {"method", setup.line_interval ? "lattice" : "orbit_bfs"}};
    const Quad eps_sq(setup.eps * setup.eps);
    std::size_t witnessed = 0, max_orbit = 0;
    for (const auto& s : setup.samples) {
        if (!setup.U(s)) throw PointOutsideU("dpo sample " + point_key(s) + " is outside U");
        std::vector<SpacePoint> cands;
        if (setup.line_interval) cands.push_back(s);
        if (setup.candidates) {
            auto more = setup.candidates(s);
            cands.insert(cands.end(), more.begin(), more.end());
        }
        nlohmann::json w = {{"sample", to_json(s)}};
        bool found = false;
        for (const auto& c : cands) {
            if (!setup.U(c)) continue;
            ExtQuad d = space_sq_dist(c, s);
            if (d.infinite || d.value > eps_sq) continue;
            std::size_t size = 0;
            if (setup.line_interval) {
                size = line_restricted_orbit(setup.gens, std::get<LinePoint>(c).t, setup.line_interval->first,
                                             setup.line_interval->second)
                           .size();
            } else {
                RestrictedOrbit ro = restricted_orbit(setup.gens, setup.U, c, setup.bounds);
                if (!ro.finite_count) continue;
                size = *ro.finite_count;
            }
            w["witness"] = to_json(c);
            w["restricted_orbit_size"] = size;
            max_orbit = std::max(max_orbit, size);
            found = true;
            break;
        }
        if (found) ++witnessed;
        else w["witness"] = nullptr;
        rep.witnesses.push_back(std::move(w));
    }
    rep.metrics = {{"samples", setup.samples.size()},
                   {"witnessed", witnessed},
                   {"max_restricted_orbit_size", max_orbit}};
    rep.verdict = !setup.samples.empty() && witnessed == setup.samples.size() ? Verdict::Established
                                                                              : Verdict::NoWitnessUpToBound;
    rep.runtime_seconds = clock.seconds();
    return rep;
}

GlobalFiniteSearch global_finite_orbit_search(const std::vector<Generator>& gens,
                                              const std::vector<SpacePoint>& samples, std::size_t node_bound) {
    GlobalFiniteSearch r{samples.size(), 0, node_bound};
    OrbitBounds b;
    b.max_nodes = node_bound;
    for (const auto& s : samples)
        if (orbit_bfs(gens, s, b).status == OrbitStatus::Complete) ++r.finite_found;
    return r;
}

// ---------------------------------------------------------------- sensitivity

ProbeReport probe_sensitivity(const std::string& system, const std::vector<Generator>& presentation,
                              const std::vector<SpacePoint>& samples, const SensitivityOptions& opt) {
    Stopwatch clock;
    ProbeReport rep;
    rep.probe = "sensitivity";
    rep.system = system;
    rep.anchor = "d:sensitivity";
    nlohmann::json ids = nlohmann::json::array(), radii = nlohmann::json::array();
    for (const auto& g : presentation) ids.push_back(g.id);
    for (double r : opt.radii) radii.push_back(r);
    rep.parameters = {{"presentation", ids}, {"metric", opt.metric},   {"radii", radii},
                      {"depth", opt.depth},  {"perturbations", opt.perturbations}, {"seed", opt.seed},
                      {"threshold", opt.threshold}, {"samples", samples.size()}, {"confirm_exact", opt.confirm_exact}};

    std::mt19937_64 rng(opt.seed);
    const Rat thr = exact_of(opt.threshold);
    const Quad thr_sq(thr * thr);
    double c_hat = samples.empty() || opt.radii.empty() ? 0.0 : HUGE_VAL;
    double max_sep = 0;
    std::size_t confirmed = 0, pairs = 0, words = 0, truncated = 0;
    for (const auto& s : samples) {
        const FloatTorusPoint x = to_float(s);
        for (double r : opt.radii) {
            auto ys = float_perturbations(x, r, opt.perturbations, rng);
            SeparationResult res = search_separation(presentation, x, ys, opt.depth, opt.threshold);
            ++pairs;
            words += res.words;
            truncated += res.truncated;
            c_hat = std::min(c_hat, res.best);
            max_sep = std::max(max_sep, res.best);
            nlohmann::json w = {{"sample", to_json(s)}, {"radius", r}, {"separation", num(res.best)},
                                {"layers", res.layers}};
            if (!res.word.empty()) {
                const auto& y = ys[res.y_index];
                const SpacePoint ye = with_torus(s, {ModOne(exact_of(y.x)), ModOne(exact_of(y.y))});
                w["y"] = to_json(ye);
                w["word"] = word_string(res.word, presentation);
                bool ok = false;
                if (opt.confirm_exact && res.best >= opt.threshold) {
                    WordResult wx = apply_word(presentation, res.word, s), wy = apply_word(presentation, res.word, ye);
                    if (wx.point && wy.point) {
                        ExtQuad d = space_sq_dist(*wx.point, *wy.point);
                        ok = d.infinite || d.value >= thr_sq;
                    }
                }
                if (opt.confirm_exact) w["exact_confirmed"] = ok;
                confirmed += ok;
            }
            rep.witnesses.push_back(std::move(w));
        }
    }
    rep.metrics = {{"c_hat", num(c_hat)},         {"max_separation", num(max_sep)}, {"pairs", pairs},
                   {"exact_confirmed", confirmed}, {"words_evaluated", words}, {"frontier_truncated", truncated}};
    rep.verdict = c_hat >= opt.threshold ? Verdict::EvidenceFor : Verdict::NoWitnessUpToBound;
    rep.runtime_seconds = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------- isometry

nlohmann::json IsometryCertificate::to_json() const {
    nlohmann::json ns = nlohmann::json::array(), cs = nlohmann::json::array();
    for (const auto& n : nodes) ns.push_back(pdyn::to_json(n));
    for (const auto& c : checks)
        cs.push_back({{"node", c.node},
                      {"generator", c.generator},
                      {"exponent", c.exponent},
                      {"kind", c.kind},
                      {"pieces", c.pieces},
                      {"linear", c.linear},
                      {"isometric", c.isometric}});
    return {{"nodes", ns}, {"orbit_status", to_string(orbit_status)}, {"checks", cs}, {"verdict", to_string(verdict)}};
}

IsometryCertificate certify_orbit_isometry(const std::vector<Generator>& presentation, const SpacePoint& base,
                                           const OrbitBounds& bounds) {
    OrbitGraph g = orbit_bfs(presentation, base, bounds);
    IsometryCertificate cert;
    cert.orbit_status = g.status;
    bool bad = false;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const SpacePoint& node = g.nodes[i];
        for (const auto& gen : presentation) {
            for (int e : {1, -1}) {
                auto img = apply_generator(gen, e, node);
                if (!img) continue;
                PieceCheck pc{i, gen.id, e, "", {}, nullptr, true};
                std::visit(overloaded{
                               [&](const TorusRule& r) {
                                   const long level = level_of(node);
                                   const long source = e > 0 ? level : level - r.level_shift;
                                   const PartialMap& pm = r.levels.at(source);
                                   const TorusPoint& at = torus_of(e > 0 ? node : *img);
                                   Affine2 a = pm.map.local_affine(at);
                                   if (e < 0) a = a.inverse();
                                   pc.pieces = pm.map.pieces_at(at);
                                   pc.linear = linear_json(a);
                                   pc.isometric = a.identity_linear();
                                   pc.kind = r.level_shift != 0 && a.identity_linear() ? "level-shift" : "affine";
                               },
                               [&](const CantorRule& r) {
                                   const bool climb = r.move == CantorRule::Move::Climb;
                                   pc.kind = climb ? "level-shift" : "sequence-shift";
                                   pc.isometric = climb;
                               },
                               [&](const TranslationRule&) { pc.kind = "translation"; },
                           },
                           gen.rule);
                bad = bad || !pc.isometric;
                cert.checks.push_back(std::move(pc));
            }
        }
    }
    cert.nodes = std::move(g.nodes);
    const bool orbit_ok =
        cert.orbit_status == OrbitStatus::Complete || cert.orbit_status == OrbitStatus::TruncatedByLevelBound;
    cert.verdict = bad ? Verdict::CounterexampleFound : orbit_ok ? Verdict::Established : Verdict::NoWitnessUpToBound;
    return cert;
}

ProbeReport isometry_report(const std::string& system, const IsometryCertificate& cert, const std::string& anchor) {
    ProbeReport rep;
    rep.probe = "isometry";
    rep.system = system;
    rep.anchor = anchor;
    rep.parameters = {{"base", cert.nodes.empty() ? nlohmann::json(nullptr) : to_json(cert.nodes.front())}};
    rep.verdict = cert.verdict;
    std::size_t non_iso = 0;
    for (const auto& c : cert.checks)
        if (!c.isometric) {
            if (non_iso == 0)
                rep.witnesses.push_back({{"node", to_json(cert.nodes[c.node])},
                                         {"generator", c.generator},
                                         {"exponent", c.exponent},
                                         {"kind", c.kind},
                                         {"pieces", c.pieces},
                                         {"linear", c.linear}});
            ++non_iso;
        }
    rep.metrics = {{"orbit_nodes", cert.nodes.size()},
                   {"orbit_status", to_string(cert.orbit_status)},
                   {"piece_checks", cert.checks.size()},
                   {"non_isometric", non_iso}};
    return rep;
}

// ---------------------------------------------------------------- halo

namespace {

// True only when the ball certainly misses the region. Undecidable cases
// count as meeting it, which only adds checks.
bool misses(const Region& r, const TorusPoint& p, const Quad& R2) {
    try {
        return sq_dist_to(r, p).exceeds(R2);
    } catch (const UnsupportedRegion&) {
        return false;
    }
}

struct Transport {
    const CompactGenSystem& sys;
    std::size_t checked = 0;
    nlohmann::json failure;

    // Radius after pushing a ball of radius R around p through `map`, or
    // nullopt when the ball may straddle pieces.
    std::optional<double> through(const PwMap& map, TorusPoint p, double R) {
        for (const auto& stage : map.stages()) {
            const Quad R2 = sq_upper(R);
            const int k = first_piece(stage, p);
            if (k >= 0 && !sq_dist_to_complement(stage[static_cast<std::size_t>(k)].region, p).exceeds(R2))
                return std::nullopt;
            const std::size_t before = k >= 0 ? static_cast<std::size_t>(k) : stage.size();
            for (std::size_t j = 0; j < before; ++j)
                if (!sq_dist_to(stage[j].region, p).exceeds(R2)) return std::nullopt;
            p = PwMap({stage}).apply(p);
            if (k >= 0) R *= stage[static_cast<std::size_t>(k)].map.norm_bound();
        }
        return R;
    }

    bool run(const SpacePoint& c, double R, std::size_t depth_left, Word& word) {
        if (depth_left == 0) return true;
        const TorusPoint& p = torus_of(c);
        const Quad R2 = sq_upper(R);
        for (std::size_t gi = 0; gi < sys.F.size(); ++gi) {
            for (int e : {1, -1}) {
                if (!word.empty() && word.back().gen == gi && word.back().exponent == -e) continue;
                const TorusRule& r = torus_rule(sys.F[gi]);
                const long level = level_of(c);
                const long source = e > 0 ? level : level - r.level_shift;
                auto it = r.levels.find(source);
                if (it == r.levels.end()) continue;
                const Region dom = e > 0 ? it->second.domain : invert(it->second).domain;
                if (dom.is_empty() || misses(dom, p, R2)) continue;
                ++checked;
                word.push_back({gi, e});
                auto fail = [&](const std::string& why) {
                    failure = {{"word", word_string(word, sys.F)}, {"center", to_json(c)}, {"radius", R},
                               {"reason", why}};
                    return false;
                };
                const TorusRule& rt = torus_rule(sys.Ftilde[gi]);
                auto jt = rt.levels.find(source);
                if (jt == rt.levels.end()) return fail("extension undefined on this level");
                const PartialMap tilde = e > 0 ? jt->second : invert(jt->second);
                if (!sq_dist_to_complement(tilde.domain, p).exceeds(R2)) return fail("ball leaves the extension domain");
                auto R_next = through(tilde.map, p, R);
                if (!R_next) return fail("ball straddles pieces");
                auto next = apply_generator(sys.Ftilde[gi], e, c);
                if (!next) return fail("extension undefined at the centre");
                if (!run(*next, *R_next, depth_left - 1, word)) return false;
                word.pop_back();
            }
        }
        return true;
    }
};

}  // namespace

ProbeReport halo_dichotomy_probe(const CompactGenSystem& sys, const SpacePoint& x, const HaloOptions& opt) {
    Stopwatch clock;
    ProbeReport rep;
    rep.probe = "halo";
    rep.system = sys.name;
    rep.anchor = "p:halo";
    nlohmann::json rhos = nlohmann::json::array();
    for (const auto& r : opt.rho_schedule) rhos.push_back(r.str());
    rep.parameters = {{"x", to_json(x)},         {"depth", opt.depth}, {"rho_schedule", rhos},
                      {"perturbations", opt.perturbations}, {"seed", opt.seed}};

    const SqDistance sigma = sigma_of_system(sys);
    rep.metrics["sigma_sq"] = sigma.infinite ? nlohmann::json("inf")
                              : sigma.exact  ? nlohmann::json(to_json(*sigma.exact))
                                             : num(sigma.approx);
    rep.metrics["branch"] = nullptr;
    const FloatTorusPoint xf = to_float(x);
    const TorusPoint& xp = torus_of(x);

    // Branch (ii): a word of F~ separating x from a nearby y by sigma / 2.
    if (!sigma.infinite && sigma.exact) {
        const double half = std::sqrt(sigma.approx) / 2;
        std::mt19937_64 rng(opt.seed);
        for (const auto& rho : opt.rho_schedule) {
            std::vector<SpacePoint> ys;
            std::vector<FloatTorusPoint> yfs;
            for (const auto& off : exact_offsets(opt.perturbations, rng)) {
                TorusPoint q{ModOne(xp.x.value() + rho * off[0]), ModOne(xp.y.value() + rho * off[1])};
                ys.push_back(with_torus(x, q));
                yfs.push_back(to_float(ys.back()));
            }
            SeparationResult res = search_separation(sys.Ftilde, xf, yfs, opt.depth, half);
            if (res.truncated) rep.metrics["search_truncated"] = true;
            if (res.best < half) continue;
            const SpacePoint& y = ys[res.y_index];
            WordResult wx = apply_word(sys.Ftilde, res.word, x), wy = apply_word(sys.Ftilde, res.word, y);
            if (!wx.point || !wy.point) continue;
            ExtQuad d = space_sq_dist(*wx.point, *wy.point);
            if (!d.infinite && d.value * Quad(4) < *sigma.exact) continue;
            rep.metrics["branch"] = "ii";
            rep.metrics["rho"] = rho.str();
            rep.witnesses.push_back({{"y", to_json(y)},
                                     {"word", word_string(res.word, sys.Ftilde)},
                                     {"depth", res.word.size()},
                                     {"separation_sq", d.infinite ? nlohmann::json("inf") : to_json(d.value)}});
            rep.verdict = Verdict::EvidenceFor;
            rep.runtime_seconds = clock.seconds();
            return rep;
        }
    }

    // Branch (i): the ball around x stays inside the extension domains.
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& rho : opt.rho_schedule) {
        Transport t{sys, 0, nullptr};
        Word word;
        if (t.run(x, rho.to_double(), opt.depth, word)) {
            rep.metrics["branch"] = "i";
            rep.metrics["rho"] = rho.str();
            rep.metrics["letters_checked"] = t.checked;
            rep.verdict = Verdict::EvidenceFor;
            rep.runtime_seconds = clock.seconds();
            return rep;
        }
        failures.push_back({{"rho", rho.str()}, {"failure", t.failure}});
    }
    rep.metrics["branch_i_failures"] = failures;
    rep.verdict = Verdict::NoWitnessUpToBound;
    rep.runtime_seconds = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------- naive sensitivity

ProbeReport naive_sensitivity_demo(const std::string& system, const std::vector<Generator>& gens,
                                   const TorusPoint& x, const Rat& r, const NaiveDemoOptions& opt) {
    Stopwatch clock;
    ProbeReport rep;
    rep.probe = "naive-demo";
    rep.system = system;
    rep.anchor = "l:naivefail";
    rep.parameters = {{"x", to_json(x)},       {"r", r.str()},         {"c", opt.c.str()},
                      {"W1", to_json(opt.W1)}, {"W2", to_json(opt.W2)}, {"depth", opt.depth},
                      {"tries", opt.tries},    {"seed", opt.seed},      {"level", opt.level}};

    std::vector<Generator> letters_gens;
    for (const auto& g : gens) {
        const auto* tr = std::get_if<TorusRule>(&g.rule);
        if (tr && tr->level_shift == 0 && tr->levels.contains(opt.level)) letters_gens.push_back(g);
    }
    auto lift = [&](const TorusPoint& p) -> SpacePoint {
        if (!gens.empty() && gens.front().space == SpaceKind::TorusLevel) return TorusLevelPoint{p, opt.level};
        return p;
    };

    std::mt19937_64 rng(opt.seed);
    const Quad inner_sq(r * r / Rat(4));
    const Quad c_sq(opt.c * opt.c);
    std::optional<std::size_t> chosen;
    for (int i = 0; i < 2; ++i) {
        const Region& W = i == 0 ? opt.W1 : opt.W2;
        bool found = false;
        for (std::size_t t = 0; t < opt.tries && !found; ++t) {
            long a = static_cast<long>(rng() % 2001) - 1000, b = static_cast<long>(rng() % 2001) - 1000;
            const long n2 = a * a + b * b;
            if (n2 <= 300000 || n2 >= 900000) continue;  // |y - x| strictly between r/2 and r
            const TorusPoint y{ModOne(x.x.value() + r * Rat(a, 1000)), ModOne(x.y.value() + r * Rat(b, 1000))};
            const SpacePoint ys = lift(y);

            // Float breadth-first search for a word landing in W.
            struct Node {
                Word word;
                FloatTorusPoint p;
            };
            std::vector<Node> layer{{{}, to_float(ys)}};
            std::optional<Word> hit;
            for (std::size_t d = 1; d <= opt.depth && !hit && !layer.empty(); ++d) {
                std::vector<Node> next;
                for (const auto& n : layer) {
                    for (std::size_t gi = 0; gi < letters_gens.size() && !hit; ++gi)
                        for (int e : {1, -1}) {
                            if (!n.word.empty() && n.word.back().gen == gi && n.word.back().exponent == -e) continue;
                            FloatTorusPoint q = n.p;
                            if (!apply_generator_f(letters_gens[gi], e, q)) continue;
                            Word w = n.word;
                            w.push_back({gi, e});
                            if (W.contains_f(q.x, q.y) && W.boundary_clearance_f(q.x, q.y) > 1e-9) {
                                hit = w;
                                break;
                            }
                            next.push_back({std::move(w), q});
                        }
                    if (hit) break;
                }
                layer = std::move(next);
            }
            if (!hit) continue;

            // Exact affine map of the word at y and a float clearance radius.
            WordResult wr = apply_word(letters_gens, *hit, ys);
            if (!wr.point || !W.contains(torus_of(*wr.point))) continue;
            Affine2 A = Affine2::identity();
            double clear = HUGE_VAL, norm = 1;
            for (std::size_t k = 0; k < hit->size(); ++k) {
                const Letter& l = (*hit)[k];
                const PartialMap& pm = std::get<TorusRule>(letters_gens[l.gen].rule).levels.at(opt.level);
                const TorusPoint& before = torus_of(wr.trace[k]);
                const TorusPoint& after = torus_of(wr.trace[k + 1]);
                const TorusPoint& pre = l.exponent > 0 ? before : after;
                Affine2 step = pm.map.local_affine(pre);
                double c = std::min(pm.domain.boundary_clearance_f(pre.x.to_double(), pre.y.to_double()),
                                    map_clearance_f(pm.map, pre.x.to_double(), pre.y.to_double()));
                if (l.exponent < 0) {
                    c /= step.norm_bound();
                    step = step.inverse();
                }
                clear = std::min(clear, c / norm);
                norm *= step.norm_bound();
                A = step.after(A);
            }
            if (!A.integer_linear() || !(A.apply(y) == torus_of(*wr.point))) continue;
            const double gap = std::sqrt(sq_dist(x, y).to_double()) - r.to_double() / 2;
            double delta = std::min(clear, gap) / 2;
            if (!(delta > 1e-12)) continue;
            const Rat delta_r = Rat::pow2(static_cast<long>(std::floor(std::log2(delta))));

            const Region D = Region::ball(y, Quad(delta_r * delta_r), false);
            PartialMap h = combine({{Region::ball(x, inner_sq, false), PwMap()}, {D, PwMap::affine(A)}});
            auto hx = h.apply(x), hy = h.apply(y);
            if (!hx || !hy || !(*hx == x) || !(*hy == torus_of(*wr.point))) continue;
            const Rat d2 = sq_dist(*hx, *hy);
            const bool separates = Quad(d2) >= c_sq;
            rep.witnesses.push_back({{"i", i + 1},
                                     {"y", to_json(y)},
                                     {"word", word_string(*hit, letters_gens)},
                                     {"g_domain_radius", delta_r.str()},
                                     {"affine", to_json(A)},
                                     {"h_x", to_json(*hx)},
                                     {"h_y", to_json(*hy)},
                                     {"sq_separation", d2.str()},
                                     {"separates", separates}});
            if (separates && !chosen) chosen = static_cast<std::size_t>(i + 1);
            found = true;
        }
        if (!found)
            throw SearchFailed("naive demo: no word of length <= " + std::to_string(opt.depth) + " sends the annulus into W" +
                               std::to_string(i + 1));
    }
    rep.metrics = {{"chosen", chosen ? nlohmann::json(*chosen) : nlohmann::json(nullptr)}};
    rep.verdict = chosen ? Verdict::EvidenceFor : Verdict::NoWitnessUpToBound;
    rep.runtime_seconds = clock.seconds();
    return rep;
}

}  // namespace pdyn
