// Compiled with -mavx2. Lane-wise the same operations, in the same order,
// as the scalar kernel.

#include "pseudodyn/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace pdyn::kernels::avx2 {

#if defined(__AVX2__)

namespace {

__m256d frac(__m256d v) {
    const __m256d r = _mm256_sub_pd(v, _mm256_floor_pd(v));
    return _mm256_blendv_pd(r, _mm256_setzero_pd(), _mm256_cmp_pd(r, _mm256_set1_pd(1.0), _CMP_GE_OQ));
}

__m256d arc_mask(const PieceF& p, __m256d v) {
    const __m256d ge = _mm256_cmp_pd(v, _mm256_set1_pd(p.lo), _CMP_GE_OQ);
    const __m256d le = _mm256_cmp_pd(v, _mm256_set1_pd(p.hi), _CMP_LE_OQ);
    return p.wraps ? _mm256_or_pd(ge, le) : _mm256_and_pd(ge, le);
}

}  // namespace

void stage_batch(const StageF& stage, double* xs, double* ys, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(xs + i), y = _mm256_loadu_pd(ys + i);
        __m256d rx = x, ry = y;
        __m256d done = _mm256_setzero_pd();
        for (const auto& p : stage.pieces) {
            __m256d in = p.kind == PieceKind::Full ? _mm256_castsi256_pd(_mm256_set1_epi64x(-1))
                         : arc_mask(p, p.kind == PieceKind::HorizontalBand ? y : x);
            in = _mm256_andnot_pd(done, in);
            if (_mm256_movemask_pd(in) == 0) continue;
            const __m256d l0 = _mm256_set1_pd(p.lift[0]), l1 = _mm256_set1_pd(p.lift[1]);
            const __m256d lx = _mm256_add_pd(l0, frac(_mm256_sub_pd(x, l0)));
            const __m256d ly = _mm256_add_pd(l1, frac(_mm256_sub_pd(y, l1)));
            const __m256d nx = _mm256_add_pd(
                _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(p.m[0]), lx), _mm256_mul_pd(_mm256_set1_pd(p.m[1]), ly)),
                _mm256_set1_pd(p.t[0]));
            const __m256d ny = _mm256_add_pd(
                _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(p.m[2]), lx), _mm256_mul_pd(_mm256_set1_pd(p.m[3]), ly)),
                _mm256_set1_pd(p.t[1]));
            rx = _mm256_blendv_pd(rx, frac(nx), in);
            ry = _mm256_blendv_pd(ry, frac(ny), in);
            done = _mm256_or_pd(done, in);
        }
        _mm256_storeu_pd(xs + i, rx);
        _mm256_storeu_pd(ys + i, ry);
    }
    if (i < n) scalar::stage_batch(stage, xs + i, ys + i, n - i);
}

#else

void stage_batch(const StageF& stage, double* xs, double* ys, std::size_t n) { scalar::stage_batch(stage, xs, ys, n); }

#endif

}  // namespace pdyn::kernels::avx2
