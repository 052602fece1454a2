#pragma once

// Batch float evaluation of piecewise-affine stages whose pieces are bands
// or the full torus. A scalar and an AVX2 implementation produce identical
// bits; the AVX2 path is picked at runtime when the CPU supports it.

#include <cstddef>
#include <optional>
#include <vector>

#include "pseudodyn/maps.hpp"

namespace pdyn::kernels {

enum class PieceKind { Full, HorizontalBand, VerticalBand };

struct PieceF {
    PieceKind kind = PieceKind::Full;
    double lo = 0, hi = 1;  // band arc, closed in float
    bool wraps = false;
    double m[4] = {1, 0, 0, 1};
    double t[2] = {0, 0};
    double lift[2] = {0, 0};
};

/// First matching piece applies, identity elsewhere.
struct StageF {
    std::vector<PieceF> pieces;
};

struct Program {
    std::vector<StageF> stages;
};

/// nullopt when some piece region is not a band or the full torus.
std::optional<Program> compile(const PwMap& map);

enum class Isa { Scalar, Avx2 };
bool avx2_available();
/// Active implementation; defaults to AVX2 when available.
Isa active_isa();
void set_isa(Isa isa);

void stage_batch(const StageF& stage, double* xs, double* ys, std::size_t n);
/// Applies the program `steps` times to every point.
void run(const Program& prog, double* xs, double* ys, std::size_t n, std::size_t steps = 1);

namespace scalar {
void stage_batch(const StageF& stage, double* xs, double* ys, std::size_t n);
}
namespace avx2 {
void stage_batch(const StageF& stage, double* xs, double* ys, std::size_t n);
}

}  // namespace pdyn::kernels
