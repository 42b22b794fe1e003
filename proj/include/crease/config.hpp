#pragma once

#include <string>

namespace crease {

/// Every tunable of the pipeline in one place. Defaults follow the values
/// the detection stack was validated with; all of them can be overridden
/// from a key=value config file or CLI flags.
struct PipelineConfig {
    // ingestion
    double pitch = 1e-3;         // metres per pixel
    double depth_offset = 1.0;   // metres

    // preprocessing (B-spline surface fit)
    int spline_spacing = 8;      // control-point spacing, pixels
    int spline_degree = 3;
    double spline_lambda = 1e-6; // second-difference regularizer weight

    // differential features
    double sigma = 3.0;          // Gaussian derivative scale, pixels
    int laplace_window = 16;     // Laplacian template support, pixels

    // classification / topology
    int rank_window = 5;             // majority filter window, odd
    double min_ridge_curvature = 10.0;  // 1/m; NMS seeds need |k_min| above it

    // triplet matching
    int max_walk_steps = 60;
    double gravity_tol_m = 5e-4;     // permitted per-step height increase

    // wrinkle detection
    int min_segment_px = 5;
    double max_turn_deg = 50.0;   // polyline tracing splits sharper bends
    int junction_window = 7;         // neighborhood for junction-label votes
    int junction_votes = 2;
    double group_gap_px = 24.0;
    double group_angle_deg = 20.0;
    double group_bridge_px = 48.0;
    double group_bridge_angle_deg = 12.0;
    double group_bridge_offset_px = 4.0;
    int min_wrinkle_points = 8;
    double hough_rmse_px = 2.0;      // fit-quality gate that triggers splitting
    double hough_alpha_deg = 20.0;   // non-locality constraint between peaks
    double hough_bin_alpha_deg = 1.0;
    double hough_bin_beta_px = 2.0;
    double hough_second_peak_ratio = 0.25;
    int max_split_depth = 4;

    // planning
    double aperture_m = 0.05;        // gripper opening
    double flat_slack_m = 0.005;     // halting criterion on total slack
};

/// Parse `key = value` lines (# comments allowed) into an existing config.
/// Unknown keys raise std::invalid_argument naming the key.
void apply_config_text(PipelineConfig& cfg, const std::string& text);

PipelineConfig load_config_file(const std::string& path);

std::string config_to_text(const PipelineConfig& cfg);

}  // namespace crease
