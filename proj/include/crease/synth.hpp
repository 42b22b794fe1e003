#pragma once

#include "crease/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace crease {

enum class SceneKind {
    plane,
    hemisphere,
    half_cylinder,
    gaussian_ridge,
    crossing_ridges,
    t_junction,
    multi_wrinkle,
    benchmark_oriented,
};

std::string scene_kind_name(SceneKind k);
SceneKind scene_kind_from_name(const std::string& name);

/// Closed-form scene description. Ridges use the profile
/// h(u) = A exp(-u^2 / 2 sigma^2) with u the signed distance to the crest
/// line in metres; overlapping features superpose by max.
struct SceneSpec {
    SceneKind kind = SceneKind::gaussian_ridge;
    double amplitude_m = 0.02;
    double sigma_m = 0.01;
    double radius_m = 0.05;
    double orientation_deg = 0.0;    // in [-90, 90]
    double orientation2_deg = 90.0;  // second crest for crossing scenes
    int count = 1;                   // parallel ridges in multi_wrinkle
    std::uint64_t seed = 0;
    int width = 256;
    int height = 256;
    double pitch = 1e-3;
    double noise_sigma_m = 0.0;
    int mask_margin_px = 4;          // garment rectangle inset
};

/// Exact geometry of the generated scene, in world coordinates.
struct GroundTruth {
    std::vector<std::vector<WorldPoint>> crest_polylines;
    std::vector<std::vector<WorldPoint>> contour_polylines;
    std::vector<double> crest_directions_deg;
    int wrinkle_count = 0;
    // Per-crest-point quantities are uniform along a ridge scene:
    double k_max = 0.0;              // 1/m at the crest
    double k_min = 0.0;              // 1/m at the crest
    double triplet_height_m = 0.0;   // crest height above the +-sigma chord
    double triplet_width_m = 0.0;    // chord between the inflection lines
    double slack_m = 0.0;            // arc minus chord across the profile
};

struct Scene {
    HeightField field;
    PixelMask mask;
    GroundTruth truth;
};

Scene generate(const SceneSpec& spec);

struct CurvaturePack {
    double mean = 0.0;
    double gaussian = 0.0;
    double k_max = 0.0;
    double k_min = 0.0;
};

/// Monge-patch curvatures of the generating surface at a world point;
/// throws std::domain_error where no closed form applies (feature
/// overlap, outside the modelled patch).
CurvaturePack analytic_curvature(const SceneSpec& spec, double x_m, double y_m);

/// Fine-trapezoid arc-minus-chord of the Gaussian ridge profile between
/// +-halfspan_m; the quadrature oracle for slack checks.
double gaussian_ridge_slack(double amplitude_m, double sigma_m,
                            double halfspan_m, int samples = 200000);

/// Arc-minus-chord of an arbitrary analytic profile between two world
/// points, sampled at `samples` points on the generating surface.
double profile_slack(const SceneSpec& spec, WorldPoint a, WorldPoint b,
                     int samples = 200000);

/// Amplitude that makes the ridge's +-sigma slack equal target_slack_m.
double amplitude_for_slack(double sigma_m, double target_slack_m);

/// Exact surface height of the noiseless generating formula.
double analytic_height(const SceneSpec& spec, double x_m, double y_m);

/// The eight single-wrinkle benchmark orientations, degrees.
std::vector<double> benchmark_orientations();

/// key=value (de)serialization, same format as the pipeline config.
SceneSpec parse_scene_spec(const std::string& text);
std::string scene_spec_to_text(const SceneSpec& spec);
SceneSpec load_scene_spec_file(const std::string& path);

}  // namespace crease
