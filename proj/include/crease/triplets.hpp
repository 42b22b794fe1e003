#pragma once

#include "crease/shape_types.hpp"

#include <optional>

namespace crease {

/// A ridge point with its two flanking contour points, plus the physical
/// measurements taken from the embedded triangle.
struct Triplet {
    Pixel ridge_px;
    Pixel contour_px_1;
    Pixel contour_px_2;
    WorldPoint ridge_w;
    WorldPoint contour_w1;
    WorldPoint contour_w2;
    double height_m = 0.0;   // triangle height over the contour chord
    double width_m = 0.0;    // contour chord length
    double slack_m = 0.0;    // cross-section arc minus chord
    double direction = 0.0;  // search direction used, radians
};

struct TripletMetrics {
    double height_m = 0.0;
    double width_m = 0.0;
};

/// Heron evaluation of the triangle (ridge, contour1, contour2); collinear
/// points give height 0, coincident contour points are an error.
TripletMetrics triplet_metrics(const WorldPoint& ridge, const WorldPoint& c1,
                               const WorldPoint& c2);

struct WalkParams {
    int max_steps = 60;
    double gravity_tol_m = 5e-4;  // permitted height increase per step
};

/// Walks two rays from the ridge pixel along +-direction with bilinear
/// height sampling. A ray succeeds on reaching a contour pixel (contours
/// dilated by one pixel); it aborts when the height climbs more than the
/// gravity tolerance, when it leaves the connected convex region of the
/// seed, when it leaves the grid, or after max_steps. Returns a triplet
/// only when both rays succeed.
std::optional<Triplet> match_triplet(Pixel ridge_px, double direction,
                                     const TopologyMasks& topo,
                                     const ShapeTypeMap& types,
                                     const HeightField& h,
                                     const WalkParams& params = {});

/// Arc length of the height profile along the straight contour-to-contour
/// segment minus the 3D chord, clamped at zero.
double geodesic_slack(const Triplet& t, const HeightField& h);

/// Direction for grasp-mode triplet search at a ridge pixel: the
/// k_max-gradient direction where defined, otherwise the Hessian
/// across-the-bump axis.
double search_direction(const CurvatureMaps& c, Pixel px);

}  // namespace crease
