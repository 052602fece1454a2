#include "pseudodyn/kernels.hpp"

#include <cmath>

namespace pdyn::kernels {

namespace {

bool arc_contains(const PieceF& p, double v) {
    return p.wraps ? (v >= p.lo || v <= p.hi) : (v >= p.lo && v <= p.hi);
}

double frac(double v) {
    double r = v - std::floor(v);
    return r >= 1.0 ? 0.0 : r;
}

Isa& isa_slot() {
    static Isa isa = avx2_available() ? Isa::Avx2 : Isa::Scalar;
    return isa;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() { return isa_slot(); }

void set_isa(Isa isa) {
    if (isa == Isa::Avx2 && !avx2_available()) isa = Isa::Scalar;
    isa_slot() = isa;
}

std::optional<Program> compile(const PwMap& map) {
    Program prog;
    for (const auto& stage : map.stages()) {
        StageF out;
        for (const auto& pc : stage) {
            PieceF f;
            const auto& node = pc.region.node();
            if (std::holds_alternative<Region::Full>(node)) {
                f.kind = PieceKind::Full;
            } else if (const auto* b = std::get_if<Region::Band>(&node)) {
                f.kind = b->axis == Axis::Horizontal ? PieceKind::HorizontalBand : PieceKind::VerticalBand;
                f.lo = b->arc.lo.to_double();
                f.hi = b->arc.hi.to_double();
                f.wraps = b->arc.wraps;
            } else {
                return std::nullopt;
            }
            for (int k = 0; k < 4; ++k) f.m[k] = pc.map.m[static_cast<std::size_t>(k)].to_double();
            for (int k = 0; k < 2; ++k) {
                f.t[k] = pc.map.t[static_cast<std::size_t>(k)].to_double();
                f.lift[k] = pc.lift[static_cast<std::size_t>(k)].to_double();
            }
            out.pieces.push_back(f);
        }
        prog.stages.push_back(std::move(out));
    }
    return prog;
}

namespace scalar {

void stage_batch(const StageF& stage, double* xs, double* ys, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double x = xs[i], y = ys[i];
        for (const auto& p : stage.pieces) {
            bool in = p.kind == PieceKind::Full ||
                      arc_contains(p, p.kind == PieceKind::HorizontalBand ? y : x);
            if (!in) continue;
            const double lx = p.lift[0] + frac(x - p.lift[0]);
            const double ly = p.lift[1] + frac(y - p.lift[1]);
            const double nx = p.m[0] * lx + p.m[1] * ly + p.t[0];
            const double ny = p.m[2] * lx + p.m[3] * ly + p.t[1];
            xs[i] = frac(nx);
            ys[i] = frac(ny);
            break;
        }
    }
}

}  // namespace scalar

void stage_batch(const StageF& stage, double* xs, double* ys, std::size_t n) {
    if (active_isa() == Isa::Avx2) avx2::stage_batch(stage, xs, ys, n);
    else scalar::stage_batch(stage, xs, ys, n);
}

void run(const Program& prog, double* xs, double* ys, std::size_t n, std::size_t steps) {
    for (std::size_t s = 0; s < steps; ++s)
        for (const auto& st : prog.stages) stage_batch(st, xs, ys, n);
}

}  // namespace pdyn::kernels
