#include "pseudodyn/pseudogroup.hpp"

#include <deque>
#include <sstream>
#include <unordered_map>

namespace pdyn {

namespace {

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_space(const Generator& g, const SpacePoint& p) {
    if (kind_of(p) != g.space)
        throw SpaceMismatch("generator " + g.id + " acts on " + to_string(g.space) + ", point is " +
                            to_string(kind_of(p)));
}

std::optional<SpacePoint> apply_torus(const Generator& g, const TorusRule& r, int exponent, const SpacePoint& p) {
    const bool levelled = g.space == SpaceKind::TorusLevel;
    const TorusPoint& pt = levelled ? std::get<TorusLevelPoint>(p).p : std::get<TorusPoint>(p);
    const long level = levelled ? std::get<TorusLevelPoint>(p).level : 0;
    const long source = exponent > 0 ? level : level - r.level_shift;
    auto it = r.levels.find(source);
    if (it == r.levels.end()) return std::nullopt;
    auto q = exponent > 0 ? it->second.apply(pt) : it->second.apply_inverse(pt);
    if (!q) return std::nullopt;
    if (!levelled) return SpacePoint(*q);
    return SpacePoint(TorusLevelPoint{*q, exponent > 0 ? level + r.level_shift : source});
}

std::optional<CantorPoint> cantor_forward(CantorRule::Move move, const CantorPoint& c) {
    if (move == CantorRule::Move::Shift) {
        BiSeq b = c.seq.shift();
        if (b.in_U(c.level + 2)) return std::nullopt;
        CantorPoint out{c.level, b};
        if (!well_formed(out)) return std::nullopt;
        return out;
    }
    if (!c.seq.in_U(c.level + 1)) return std::nullopt;
    return CantorPoint{c.level + 1, c.seq};
}

std::optional<SpacePoint> apply_cantor(const CantorRule& r, int exponent, const SpacePoint& p) {
    const auto& c = std::get<CantorPoint>(p);
    if (!well_formed(c)) return std::nullopt;
    if (exponent > 0) {
        auto q = cantor_forward(r.move, c);
        if (!q) return std::nullopt;
        return SpacePoint(*q);
    }
    CantorPoint cand = r.move == CantorRule::Move::Shift ? CantorPoint{c.level, c.seq.unshift()}
                                                          : CantorPoint{c.level - 1, c.seq};
    if (!well_formed(cand)) return std::nullopt;
    auto back = cantor_forward(r.move, cand);
    if (!back || !(*back == c)) return std::nullopt;
    return SpacePoint(cand);
}

}  // namespace

std::optional<SpacePoint> apply_generator(const Generator& g, int exponent, const SpacePoint& p) {
    check_space(g, p);
    if (exponent != 1 && exponent != -1) throw std::invalid_argument("exponent must be +1 or -1");
    return std::visit(
        overloaded{
            [&](const TorusRule& r) { return apply_torus(g, r, exponent, p); },
            [&](const CantorRule& r) { return apply_cantor(r, exponent, p); },
            [&](const TranslationRule& r) -> std::optional<SpacePoint> {
                const Rat& t = std::get<LinePoint>(p).t;
                return SpacePoint(LinePoint{exponent > 0 ? t + r.shift : t - r.shift});
            },
        },
        g.rule);
}

bool apply_generator_f(const Generator& g, int exponent, FloatTorusPoint& p) {
    const auto* r = std::get_if<TorusRule>(&g.rule);
    if (!r) throw SpaceMismatch("float evaluation needs a torus generator: " + g.id);
    const long source = exponent > 0 ? p.level : p.level - r->level_shift;
    auto it = r->levels.find(source);
    if (it == r->levels.end()) return false;
    const PartialMap& m = it->second;
    if (exponent > 0) {
        if (!m.domain.contains_f(p.x, p.y)) return false;
        m.map.apply_f(p.x, p.y);
        p.level += r->level_shift;
    } else {
        double x = p.x, y = p.y;
        m.map.apply_inverse_f(x, y);
        if (!m.domain.contains_f(x, y)) return false;
        p.x = x;
        p.y = y;
        p.level = source;
    }
    return true;
}

Word reduce(const Word& w) {
    Word out;
    for (const auto& l : w) {
        if (!out.empty() && out.back().gen == l.gen && out.back().exponent == -l.exponent) out.pop_back();
        else out.push_back(l);
    }
    return out;
}

bool is_reduced(const Word& w) {
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i].gen == w[i - 1].gen && w[i].exponent == -w[i - 1].exponent) return false;
    return true;
}

std::string word_string(const Word& w, const std::vector<Generator>& gens) {
    if (w.empty()) return "e";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += " ";
        s += gens.at(w[i].gen).id;
        if (w[i].exponent < 0) s += "^-1";
    }
    return s;
}

WordResult apply_word(const std::vector<Generator>& gens, const Word& w, const SpacePoint& p) {
    WordResult r;
    r.trace.push_back(p);
    SpacePoint cur = p;
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto q = apply_generator(gens.at(w[i].gen), w[i].exponent, cur);
        if (!q) {
            r.failed_step = i;
            return r;
        }
        cur = *q;
        r.trace.push_back(cur);
    }
    r.point = cur;
    return r;
}

std::string to_string(OrbitStatus s) {
    switch (s) {
        case OrbitStatus::Complete: return "Complete";
        case OrbitStatus::TruncatedByNodeBound: return "TruncatedByNodeBound";
        case OrbitStatus::TruncatedByLevelBound: return "TruncatedByLevelBound";
        case OrbitStatus::TruncatedByDepthBound: return "TruncatedByDepthBound";
    }
    return "unknown";
}

OrbitGraph orbit_bfs(const std::vector<Generator>& gens, const SpacePoint& p, const OrbitBounds& bounds) {
    OrbitGraph g;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::size_t> depth;
    g.nodes.push_back(p);
    depth.push_back(0);
    index.emplace(point_key(p), 0);
    bool node_cut = false, level_cut = false, depth_cut = false;

    for (std::size_t cur = 0; cur < g.nodes.size(); ++cur) {
        for (std::size_t gi = 0; gi < gens.size(); ++gi) {
            for (int e : {1, -1}) {
                auto q = apply_generator(gens[gi], e, g.nodes[cur]);
                if (!q) continue;
                if (std::labs(level_of(*q)) > bounds.max_level) {
                    level_cut = true;
                    continue;
                }
                std::string key = point_key(*q);
                auto it = index.find(key);
                if (it != index.end()) {
                    g.edges.push_back({cur, gi, e, it->second});
                    continue;
                }
                if (depth[cur] + 1 > bounds.max_depth) {
                    depth_cut = true;
                    continue;
                }
                if (g.nodes.size() >= bounds.max_nodes) {
                    node_cut = true;
                    continue;
                }
                const std::size_t id = g.nodes.size();
                g.nodes.push_back(*q);
                depth.push_back(depth[cur] + 1);
                index.emplace(std::move(key), id);
                g.edges.push_back({cur, gi, e, id});
            }
        }
    }
    g.status = node_cut    ? OrbitStatus::TruncatedByNodeBound
               : level_cut ? OrbitStatus::TruncatedByLevelBound
               : depth_cut ? OrbitStatus::TruncatedByDepthBound
                           : OrbitStatus::Complete;
    return g;
}

bool orbit_is_closed(const std::vector<Generator>& gens, const OrbitGraph& g) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) index.emplace(point_key(g.nodes[i]), i);
    for (const auto& n : g.nodes)
        for (const auto& gen : gens)
            for (int e : {1, -1}) {
                auto q = apply_generator(gen, e, n);
                if (q && !index.contains(point_key(*q))) return false;
            }
    return true;
}

RestrictedOrbit restricted_orbit(const std::vector<Generator>& gens, const PointSet& U, const SpacePoint& p,
                                 const OrbitBounds& bounds) {
    if (!U(p)) throw PointOutsideU("restricted orbit: base point " + point_key(p) + " is outside U");
    OrbitGraph g = orbit_bfs(gens, p, bounds);
    RestrictedOrbit r;
    r.status = g.status;
    for (const auto& n : g.nodes)
        if (U(n)) r.points.push_back(n);
    if (g.status == OrbitStatus::Complete) r.finite_count = r.points.size();
    return r;
}

namespace {

SqDistance min_margin(const SqDistance& a, const SqDistance& b) {
    if (a.infinite) return b;
    if (b.infinite) return a;
    if (a.exact && b.exact) return quad_cmp(*a.exact, *b.exact) == std::strong_ordering::greater ? b : a;
    SqDistance r = a.approx <= b.approx ? a : b;
    r.exact.reset();
    r.lower_bound = a.lower_bound || b.lower_bound;
    return r;
}

}  // namespace

SqDistance sigma_of_system(const CompactGenSystem& sys) {
    if (sys.F.size() != sys.Ftilde.size()) throw std::invalid_argument("sigma: F and F~ differ in size");
    SqDistance best = SqDistance::inf();
    for (std::size_t i = 0; i < sys.F.size(); ++i) {
        const auto* f = std::get_if<TorusRule>(&sys.F[i].rule);
        const auto* ft = std::get_if<TorusRule>(&sys.Ftilde[i].rule);
        if (!f || !ft) throw UnsupportedRegion("sigma: generator " + sys.F[i].id + " is not a torus map");
        for (const auto& [level, pm] : f->levels) {
            if (pm.domain.is_empty()) continue;
            auto it = ft->levels.find(level);
            if (it == ft->levels.end()) return SqDistance::of(Quad(0));
            best = min_margin(best, containment_margin(pm.domain, it->second.domain));
        }
    }
    return best;
}

nlohmann::json orbit_to_json(const OrbitGraph& g, const std::vector<Generator>& gens) {
    nlohmann::json nodes = nlohmann::json::array(), edges = nlohmann::json::array();
    for (const auto& n : g.nodes) nodes.push_back(to_json(n));
    for (const auto& e : g.edges)
        edges.push_back({{"from", e.from}, {"gen", gens.at(e.gen).id}, {"exp", e.exponent}, {"to", e.to}});
    return {{"base", 0}, {"status", to_string(g.status)}, {"nodes", nodes}, {"edges", edges}};
}

std::string orbit_edges_csv(const OrbitGraph& g, const std::vector<Generator>& gens) {
    std::ostringstream os;
    os << "from_index,gen,exp,to_index\n";
    for (const auto& e : g.edges) os << e.from << ',' << gens.at(e.gen).id << ',' << e.exponent << ',' << e.to << '\n';
    return os.str();
}

}  // namespace pdyn
