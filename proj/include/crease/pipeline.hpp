#pragma once

#include "crease/bspline.hpp"
#include "crease/config.hpp"
#include "crease/planner.hpp"

namespace crease {

struct StageTimings {
    double preprocess_ms = 0.0;
    double differential_ms = 0.0;
    double classify_ms = 0.0;
    double detect_ms = 0.0;
};

/// Everything the analysis pipeline produces, stage by stage.
struct AnalysisResult {
    HeightField smooth;   // spline-resampled field, valid on the garment
    FitReport fit;
    CurvatureMaps curvature;
    ScalarField laplacian;
    ShapeTypeMap types;   // after majority filtering
    TopologyMasks topo;
    std::vector<Wrinkle> wrinkles;
    StageTimings timings;
};

/// preprocess -> differential -> classification -> topology -> wrinkles.
/// The garment mask bounds every stage; stage invariants are spot-checked
/// and raise InternalError naming the stage.
AnalysisResult run_analysis(const HeightField& h, const PixelMask& mask,
                            const PipelineConfig& cfg);

/// Plan for the best plannable wrinkle (by rank); nullopt when no wrinkle
/// can be planned.
std::optional<FlattenPlan> plan_top_wrinkle(const AnalysisResult& res,
                                            const PixelMask& mask,
                                            const PipelineConfig& cfg);

struct IterationLog {
    int wrinkle_count = 0;
    double top_score = 0.0;
    double top_slack_m = 0.0;
    double pull_dist_m = 0.0;
    bool dual_arm = false;
    bool flat = false;
};

struct SimulationLog {
    std::vector<IterationLog> iterations;
    int rni = 0;           // flatten actions executed before halting
    bool converged = false;
};

/// Closed perception-action loop against the virtual flattener.
SimulationLog run_flatten_loop(const HeightField& h0, const PixelMask& mask,
                               const PipelineConfig& cfg, int max_iters);

}  // namespace crease
