#pragma once

#include "crease/wrinkles.hpp"

#include <optional>

namespace crease {

struct GraspCandidate {
    Triplet triplet;
    WorldPoint grasp_point;     // the ridge point
    double approach_dir = 0.0;  // across-wrinkle, radians
    double utility = 0.0;       // triplet height
    int wrinkle_index = -1;
};

struct FlattenPlan {
    int wrinkle_id = -1;
    WorldPoint grasp_a;  // at the max-projection end
    WorldPoint grasp_b;
    Vec2 pull_dir_a{1.0, 0.0};
    Vec2 pull_dir_b{-1.0, 0.0};
    double pull_dist_m = 0.0;  // per arm
    bool dual_arm = false;
};

/// Tallest triplet no wider than the gripper aperture, across all
/// wrinkles; ties go to the wrinkle with the larger score.
std::optional<GraspCandidate> select_grasp(const std::vector<Wrinkle>& wrinkles,
                                           double aperture_m);

/// Dominant covariance eigenvector of the wrinkle pixels, sign-normalized
/// to non-negative x (non-negative y when x vanishes). Throws
/// DegenerateDirectionError for isotropic point sets.
Vec2 principal_direction(const Wrinkle& w);

/// Grasp points are found by marching from the wrinkle's extreme points
/// outward along the principal axis to the garment-mask boundary; an arm
/// whose march leaves the image before reaching a boundary is dropped and
/// the plan falls back to single-arm.
FlattenPlan make_flatten_plan(const Wrinkle& w, int wrinkle_id,
                              const PixelMask& garment_mask,
                              const Calibration& calib,
                              double flat_slack_m = 0.005);

/// Halting criterion: every wrinkle's total slack (2 x per-arm pull) is
/// below the threshold, or there are no wrinkles at all.
bool is_flat(const std::vector<Wrinkle>& wrinkles, double flat_slack_m = 0.005);

/// Desk-scale stand-in for the robot pull: heights across the planned
/// wrinkle's triplet footprint relax toward the per-triplet chord line by
/// min(1, 2 * pull_dist / slack).
HeightField virtual_flatten_step(const HeightField& h, const FlattenPlan& plan,
                                 const std::vector<Wrinkle>& wrinkles);

}  // namespace crease
