#pragma once

#include "crease/pipeline.hpp"
#include "crease/synth.hpp"

#include <optional>
#include <string>

namespace crease {

/// Machine-readable summary of one analysis run. Serializes to JSON with
/// schema_version 1 and round-trips losslessly.
struct AnalysisReport {
    int schema_version = 1;

    // preprocess
    double fit_rmse_m = 0.0;
    double fit_max_residual_m = 0.0;
    std::uint64_t fit_points = 0;

    // differential / topology
    std::uint64_t curvature_valid_px = 0;
    std::uint64_t ridge_px = 0;
    std::uint64_t contour_px = 0;

    struct WrinkleEntry {
        int rank = 0;
        std::vector<Pixel> points;
        std::array<double, 6> curve_coeffs{};  // quintic a..f, highest first
        double curve_rmse_px = 0.0;
        double width_m = 0.0;
        double height_m = 0.0;
        double volume_m3 = 0.0;
        double mean_slack_m = 0.0;
        double score = 0.0;
        Vec2 principal_dir;
        int triplet_count = 0;
        bool split_warning = false;
    };
    std::vector<WrinkleEntry> wrinkles;
    std::uint64_t triplet_count = 0;

    struct PlanEntry {
        int wrinkle_id = -1;
        WorldPoint grasp_a, grasp_b;
        Vec2 pull_dir_a, pull_dir_b;
        double pull_dist_m = 0.0;
        bool dual_arm = false;
    };
    std::optional<PlanEntry> plan;
    bool flat = false;

    std::optional<StageTimings> timings;  // omitted under --no-timing
};

AnalysisReport build_report(const AnalysisResult& res,
                            const std::optional<FlattenPlan>& plan,
                            const PipelineConfig& cfg, bool include_timings);

std::string report_to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const std::string& text);

std::string simulation_to_json(const SimulationLog& log, bool include_meta);

std::string ground_truth_to_json(const GroundTruth& gt);

}  // namespace crease
