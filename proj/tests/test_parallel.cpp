#include "crease/reference.hpp"
#include "crease/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace crease;

namespace {

HeightField random_bumpy_field(int w, int h, std::uint64_t seed) {
    HeightField f(w, h, 1e-3, 0.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(-0.006, 0.006);
    std::uniform_real_distribution<double> pos(12.0, w - 12.0);
    for (int k = 0; k < 10; ++k) {
        const double bx = pos(rng), by = pos(rng);
        const double a = amp(rng);
        const double s = 5.0 + (rng() % 9);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                f.z.at(x, y) += a
                                * std::exp(-0.5
                                           * ((x - bx) * (x - bx)
                                              + (y - by) * (y - by))
                                           / (s * s));
    }
    // A few holes so validity handling is exercised too.
    f.valid.at(20, 20) = 0;
    f.valid.at(45, 33) = 0;
    return f;
}

void check_fields_match(const ScalarField& got, const ScalarField& want,
                        double tol) {
    REQUIRE(got.v.width == want.v.width);
    REQUIRE(got.v.height == want.v.height);
    for (std::size_t i = 0; i < got.v.size(); ++i) {
        REQUIRE(got.valid.values[i] == want.valid.values[i]);
        if (!got.valid.values[i]) continue;
        const double scale = std::max(1.0, std::abs(want.v.values[i]));
        CHECK(std::abs(got.v.values[i] - want.v.values[i]) <= tol * scale);
    }
}

}  // namespace

TEST_CASE("separable OpenMP derivatives match the direct 2D reference") {
    const HeightField f = random_bumpy_field(72, 64, 11);
    for (auto [dx, dy] :
         {std::pair{1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}, {0, 0}}) {
        const ScalarField fast = gaussian_derivative(f, 2.5, dx, dy);
        const ScalarField ref = serial::gaussian_derivative(f, 2.5, dx, dy);
        check_fields_match(fast, ref, 1e-10);
    }
}

TEST_CASE("curvature maps match the serial reference") {
    const HeightField f = random_bumpy_field(80, 72, 23);
    const CurvatureMaps fast = curvature_maps(f, 3.0);
    const CurvatureMaps ref = serial::curvature_maps(f, 3.0);
    check_fields_match(fast.mean, ref.mean, 1e-9);
    check_fields_match(fast.gaussian, ref.gaussian, 1e-9);
    check_fields_match(fast.k_max, ref.k_max, 1e-9);
    check_fields_match(fast.k_min, ref.k_min, 1e-9);
    check_fields_match(fast.across, ref.across, 1e-9);
    check_fields_match(fast.theta, ref.theta, 1e-9);
}

TEST_CASE("laplacian template matches the serial reference") {
    const HeightField f = random_bumpy_field(64, 64, 37);
    for (int window : {15, 16}) {
        const ScalarField fast = laplacian_field(f, window);
        const ScalarField ref = serial::laplacian_field(f, window);
        check_fields_match(fast, ref, 1e-10);
    }
}

TEST_CASE("sliding-histogram rank filter equals the recount reference") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 4; ++trial) {
        ShapeTypeMap t(41, 29);
        for (auto& v : t.labels.values)
            v = static_cast<std::uint8_t>(rng() % 11);
        for (int window : {3, 5, 7}) {
            const ShapeTypeMap fast = majority_rank_filter(t, window);
            const ShapeTypeMap ref = serial::majority_rank_filter(t, window);
            CHECK(fast.labels.values == ref.labels.values);
        }
    }
}

TEST_CASE("repeated runs of the parallel kernels are deterministic") {
    SceneSpec spec;
    spec.kind = SceneKind::crossing_ridges;
    spec.width = 128;
    spec.height = 128;
    spec.noise_sigma_m = 2e-4;
    spec.seed = 5;
    const Scene scene = generate(spec);
    const CurvatureMaps a = curvature_maps(scene.field, 3.0);
    const CurvatureMaps b = curvature_maps(scene.field, 3.0);
    CHECK(a.mean.v.values == b.mean.v.values);
    CHECK(a.k_min.v.values == b.k_min.v.values);
    CHECK(a.theta.v.values == b.theta.v.values);
}
