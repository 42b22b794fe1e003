#include "crease/pipeline.hpp"

#include "crease/errors.hpp"

#include <chrono>
#include <cmath>

namespace crease {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

void check_curvature_invariants(const CurvatureMaps& c) {
    const std::size_t n = c.mean.v.size();
    const std::size_t stride = std::max<std::size_t>(1, n / 1024);
    for (std::size_t i = 0; i < n; i += stride) {
        if (!c.mean.valid.values[i]) continue;
        const double kmax = c.k_max.v.values[i], kmin = c.k_min.v.values[i];
        const double mean = c.mean.v.values[i];
        if (kmin > kmax + 1e-12)
            throw InternalError("differential", "k_min exceeds k_max");
        const double sum = kmax + kmin;
        if (std::abs(sum - 2.0 * mean) > 1e-9 * std::max(1.0, std::abs(sum)))
            throw InternalError("differential",
                                "principal curvatures inconsistent with mean");
    }
}

void check_topology_invariants(const TopologyMasks& topo) {
    for (int y = 0; y < topo.ridge_points.height(); ++y) {
        for (int x = 0; x < topo.ridge_points.width(); ++x) {
            if (topo.ridge_points.test(x, y)) {
                if (!topo.convex.test(x, y))
                    throw InternalError("topology", "ridge point outside convex set");
                if (topo.contours.test(x, y))
                    throw InternalError("topology", "ridge point marked as contour");
            }
        }
    }
}

}  // namespace

AnalysisResult run_analysis(const HeightField& h, const PixelMask& mask,
                            const PipelineConfig& cfg) {
    if (!mask.bits.same_shape(h.width(), h.height()))
        throw std::invalid_argument("run_analysis: mask dimensions differ");

    AnalysisResult res;
    auto t0 = std::chrono::steady_clock::now();

    // Fit only where the sensor saw the garment; resample everywhere so
    // holes are filled, then bound the analysis by the garment mask.
    PixelMask fit_mask(h.width(), h.height());
    for (int y = 0; y < h.height(); ++y)
        for (int x = 0; x < h.width(); ++x)
            fit_mask.set(x, y, mask.test(x, y) && h.is_valid(x, y));
    auto [surface, report] =
        fit_bspline(h, fit_mask, cfg.spline_spacing, cfg.spline_degree,
                    cfg.spline_lambda);
    res.fit = report;
    res.smooth = evaluate_surface(surface, surface.domain);
    for (int y = 0; y < h.height(); ++y)
        for (int x = 0; x < h.width(); ++x)
            res.smooth.valid.at(x, y) = mask.test(x, y) ? 1 : 0;
    res.timings.preprocess_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    res.curvature = curvature_maps(res.smooth, cfg.sigma);
    res.laplacian = laplacian_field(res.smooth, cfg.laplace_window);
    check_curvature_invariants(res.curvature);
    res.timings.differential_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    const ShapeIndexMap si = shape_index(res.curvature);
    res.types = majority_rank_filter(quantize_types(si), cfg.rank_window);
    res.timings.classify_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    res.topo = extract_topology(res.types, res.curvature, res.laplacian,
                                cfg.min_ridge_curvature);
    check_topology_invariants(res.topo);
    res.wrinkles = detect_wrinkles(res.topo, res.types, res.curvature,
                                   res.smooth, cfg);
    res.timings.detect_ms = ms_since(t0);
    return res;
}

std::optional<FlattenPlan> plan_top_wrinkle(const AnalysisResult& res,
                                            const PixelMask& mask,
                                            const PipelineConfig& cfg) {
    Calibration calib;
    calib.pitch = res.smooth.pitch;
    calib.depth_offset = cfg.depth_offset;
    for (int i = 0; i < static_cast<int>(res.wrinkles.size()); ++i) {
        try {
            return make_flatten_plan(res.wrinkles[i], i, mask, calib,
                                     cfg.flat_slack_m);
        } catch (const PlanningError&) {
            continue;  // try the next-ranked wrinkle
        } catch (const DegenerateDirectionError&) {
            continue;
        }
    }
    return std::nullopt;
}

SimulationLog run_flatten_loop(const HeightField& h0, const PixelMask& mask,
                               const PipelineConfig& cfg, int max_iters) {
    SimulationLog log;
    HeightField h = h0;
    for (int iter = 0; iter <= max_iters; ++iter) {
        const AnalysisResult res = run_analysis(h, mask, cfg);
        IterationLog entry;
        entry.wrinkle_count = static_cast<int>(res.wrinkles.size());
        if (!res.wrinkles.empty()) {
            entry.top_score = res.wrinkles.front().score;
            entry.top_slack_m = res.wrinkles.front().mean_slack_m;
        }
        entry.flat = is_flat(res.wrinkles, cfg.flat_slack_m);
        if (entry.flat) {
            log.iterations.push_back(entry);
            log.converged = true;
            break;
        }
        if (iter == max_iters) {
            log.iterations.push_back(entry);
            break;  // budget exhausted before the halting criterion held
        }
        const auto plan = plan_top_wrinkle(res, mask, cfg);
        if (!plan) {
            log.iterations.push_back(entry);
            break;  // nothing plannable; report unconverged
        }
        entry.pull_dist_m = plan->pull_dist_m;
        entry.dual_arm = plan->dual_arm;
        log.iterations.push_back(entry);
        h = virtual_flatten_step(h, *plan, res.wrinkles);
        ++log.rni;
    }
    return log;
}

}  // namespace crease
