#include <doctest.h>

#include <cstring>
#include <random>

#include "pseudodyn/kernels.hpp"
#include "pseudodyn/systems.hpp"

using namespace pdyn;

namespace {

std::vector<PwMap> sample_maps() {
    FamilyB b = build_family_B(3);
    FamilyA a = build_family_A(2);
    return {PwMap::affine(Affine2::linear(2, 1, 1, 1)), b.T[0], b.T[3], a.T[2]};
}

}  // namespace

TEST_CASE("kernels compile band and affine maps only") {
    for (const auto& m : sample_maps()) CHECK(kernels::compile(m).has_value());
    Region box = Region::box(Arc::open(Rat(0), Rat(1, 2)), Arc::open(Rat(0), Rat(1, 2)));
    PwMap boxed({Stage{Piece{box, Affine2::linear(2, 1, 1, 1), {Rat(0), Rat(0)}}}});
    CHECK_FALSE(kernels::compile(boxed).has_value());
}

TEST_CASE("property: scalar and AVX2 kernels agree bit for bit") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& m : sample_maps()) {
        auto prog = *kernels::compile(m);
        std::vector<double> xs(1003), ys(1003);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            xs[i] = u(rng);
            ys[i] = u(rng);
        }
        // exact band edges hit the comparison branches too
        xs[0] = 1.0 / 6;
        ys[1] = 1.0 / 8;
        xs[2] = 0.0;
        auto xs2 = xs, ys2 = ys;
        for (int step = 0; step < 20; ++step)
            for (const auto& st : prog.stages) {
                kernels::scalar::stage_batch(st, xs.data(), ys.data(), xs.size());
                kernels::avx2::stage_batch(st, xs2.data(), ys2.data(), xs2.size());
            }
        REQUIRE(std::memcmp(xs.data(), xs2.data(), xs.size() * sizeof(double)) == 0);
        REQUIRE(std::memcmp(ys.data(), ys2.data(), ys.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("property: kernel program matches the float map") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& m : sample_maps()) {
        auto prog = *kernels::compile(m);
        int checked = 0;
        for (int i = 0; i < 2000; ++i) {
            double x = u(rng), y = u(rng), kx = x, ky = y;
            m.apply_f(x, y);
            kernels::run(prog, &kx, &ky, 1);
            REQUIRE(circle_dist_f(x, kx) < 1e-12);
            REQUIRE(circle_dist_f(y, ky) < 1e-12);
            ++checked;
        }
        CHECK(checked == 2000);
    }
}

TEST_CASE("isa selection falls back to scalar") {
    const kernels::Isa before = kernels::active_isa();
    kernels::set_isa(kernels::Isa::Scalar);
    CHECK(kernels::active_isa() == kernels::Isa::Scalar);
    kernels::set_isa(kernels::Isa::Avx2);
    CHECK(kernels::active_isa() == (kernels::avx2_available() ? kernels::Isa::Avx2 : kernels::Isa::Scalar));
    kernels::set_isa(before);
}
