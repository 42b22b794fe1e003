#include "crease/reference.hpp"
#include "crease/synth.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace crease;

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-24s %10.2f %12.2f %9.2fx\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark the OpenMP kernels against the serial reference"};
    int size = 512;
    double sigma = 3.0;
    int reps = 3;
    app.add_option("--size", size, "grid edge length")->default_val(512);
    app.add_option("--sigma", sigma, "derivative scale in pixels")->default_val(3.0);
    app.add_option("--reps", reps, "repetitions per measurement")->default_val(3);
    CLI11_PARSE(app, argc, argv);

    SceneSpec spec;
    spec.kind = SceneKind::crossing_ridges;
    spec.orientation_deg = 15.0;
    spec.orientation2_deg = -60.0;
    spec.width = size;
    spec.height = size;
    spec.pitch = 1e-3;
    spec.noise_sigma_m = 2e-4;
    const Scene scene = generate(spec);

#ifdef _OPENMP
    std::printf("grid %dx%d, sigma %.1f, %d reps, %d threads\n\n", size, size,
                sigma, reps, omp_get_max_threads());
#else
    std::printf("grid %dx%d, sigma %.1f, %d reps, OpenMP off\n\n", size, size,
                sigma, reps);
#endif
    std::printf("%-24s %10s %12s %9s\n", "kernel", "serial ms", "parallel ms",
                "speedup");

    row("gaussian d2/dx2",
        time_ms([&] { (void)serial::gaussian_derivative(scene.field, sigma, 2, 0); },
                reps),
        time_ms([&] { (void)gaussian_derivative(scene.field, sigma, 2, 0); },
                reps));

    row("curvature maps",
        time_ms([&] { (void)serial::curvature_maps(scene.field, sigma); }, reps),
        time_ms([&] { (void)curvature_maps(scene.field, sigma); }, reps));

    row("laplacian 16x16",
        time_ms([&] { (void)serial::laplacian_field(scene.field, 16); }, reps),
        time_ms([&] { (void)laplacian_field(scene.field, 16); }, reps));

    const ShapeTypeMap types =
        quantize_types(shape_index(curvature_maps(scene.field, sigma)));
    row("majority rank filter",
        time_ms([&] { (void)serial::majority_rank_filter(types, 5); }, reps),
        time_ms([&] { (void)majority_rank_filter(types, 5); }, reps));

    return 0;
}
