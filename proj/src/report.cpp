#include "crease/report.hpp"

#include <json.hpp>

namespace crease {

using nlohmann::ordered_json;

namespace {

ordered_json point_json(const WorldPoint& p) {
    return ordered_json{{"x", p.x}, {"y", p.y}, {"z", p.z}};
}

WorldPoint point_from(const ordered_json& j) {
    return WorldPoint{j.at("x"), j.at("y"), j.at("z")};
}

ordered_json vec_json(const Vec2& v) {
    return ordered_json{{"x", v.x}, {"y", v.y}};
}

Vec2 vec_from(const ordered_json& j) { return Vec2{j.at("x"), j.at("y")}; }

}  // namespace

AnalysisReport build_report(const AnalysisResult& res,
                            const std::optional<FlattenPlan>& plan,
                            const PipelineConfig& cfg, bool include_timings) {
    AnalysisReport r;
    r.fit_rmse_m = res.fit.rmse;
    r.fit_max_residual_m = res.fit.max_residual;
    r.fit_points = res.fit.n_points;
    for (auto v : res.curvature.mean.valid.values) r.curvature_valid_px += v;
    r.ridge_px = res.topo.ridge_points.count();
    r.contour_px = res.topo.contours.count();

    for (std::size_t i = 0; i < res.wrinkles.size(); ++i) {
        const Wrinkle& w = res.wrinkles[i];
        AnalysisReport::WrinkleEntry e;
        e.rank = static_cast<int>(i + 1);
        e.points = w.points;
        e.curve_coeffs = {w.curve.a(), w.curve.b(), w.curve.c(),
                          w.curve.d(), w.curve.e(), w.curve.f()};
        e.curve_rmse_px = w.curve.rmse_px;
        e.width_m = w.width_m;
        e.height_m = w.height_m;
        e.volume_m3 = w.volume_m3;
        e.mean_slack_m = w.mean_slack_m;
        e.score = w.score;
        e.principal_dir = w.principal_dir;
        e.triplet_count = static_cast<int>(w.triplets.size());
        e.split_warning = w.split_warning;
        r.triplet_count += w.triplets.size();
        r.wrinkles.push_back(std::move(e));
    }

    if (plan) {
        AnalysisReport::PlanEntry p;
        p.wrinkle_id = plan->wrinkle_id;
        p.grasp_a = plan->grasp_a;
        p.grasp_b = plan->grasp_b;
        p.pull_dir_a = plan->pull_dir_a;
        p.pull_dir_b = plan->pull_dir_b;
        p.pull_dist_m = plan->pull_dist_m;
        p.dual_arm = plan->dual_arm;
        r.plan = p;
    }
    r.flat = is_flat(res.wrinkles, cfg.flat_slack_m);
    if (include_timings) r.timings = res.timings;
    return r;
}

std::string report_to_json(const AnalysisReport& r) {
    ordered_json j;
    j["schema_version"] = r.schema_version;
    j["preprocess"] = ordered_json{{"rmse_m", r.fit_rmse_m},
                                   {"max_residual_m", r.fit_max_residual_m},
                                   {"points", r.fit_points}};
    j["features"] = ordered_json{{"curvature_valid_px", r.curvature_valid_px},
                                 {"ridge_px", r.ridge_px},
                                 {"contour_px", r.contour_px}};
    j["wrinkles"] = ordered_json::array();
    for (const auto& w : r.wrinkles) {
        ordered_json points = ordered_json::array();
        for (const auto& p : w.points)
            points.push_back(ordered_json::array({p.x, p.y}));
        j["wrinkles"].push_back(ordered_json{
            {"rank", w.rank},
            {"points", std::move(points)},
            {"curve_coeffs", w.curve_coeffs},
            {"curve_rmse_px", w.curve_rmse_px},
            {"width_m", w.width_m},
            {"height_m", w.height_m},
            {"volume_m3", w.volume_m3},
            {"mean_slack_m", w.mean_slack_m},
            {"score", w.score},
            {"principal_dir", vec_json(w.principal_dir)},
            {"triplet_count", w.triplet_count},
            {"split_warning", w.split_warning},
        });
    }
    j["triplet_count"] = r.triplet_count;
    if (r.plan) {
        j["plan"] = ordered_json{
            {"wrinkle_id", r.plan->wrinkle_id},
            {"grasp_a", point_json(r.plan->grasp_a)},
            {"grasp_b", point_json(r.plan->grasp_b)},
            {"pull_dir_a", vec_json(r.plan->pull_dir_a)},
            {"pull_dir_b", vec_json(r.plan->pull_dir_b)},
            {"pull_dist_m", r.plan->pull_dist_m},
            {"dual_arm", r.plan->dual_arm},
        };
    } else {
        j["plan"] = nullptr;
    }
    j["is_flat"] = r.flat;
    if (r.timings) {
        j["timings_ms"] = ordered_json{
            {"preprocess", r.timings->preprocess_ms},
            {"differential", r.timings->differential_ms},
            {"classify", r.timings->classify_ms},
            {"detect", r.timings->detect_ms},
        };
    }
    return j.dump(2) + "\n";
}

AnalysisReport report_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    AnalysisReport r;
    r.schema_version = j.at("schema_version");
    r.fit_rmse_m = j.at("preprocess").at("rmse_m");
    r.fit_max_residual_m = j.at("preprocess").at("max_residual_m");
    r.fit_points = j.at("preprocess").at("points");
    r.curvature_valid_px = j.at("features").at("curvature_valid_px");
    r.ridge_px = j.at("features").at("ridge_px");
    r.contour_px = j.at("features").at("contour_px");
    for (const auto& wj : j.at("wrinkles")) {
        AnalysisReport::WrinkleEntry w;
        w.rank = wj.at("rank");
        for (const auto& pj : wj.at("points"))
            w.points.push_back(Pixel{pj.at(0), pj.at(1)});
        for (int k = 0; k < 6; ++k) w.curve_coeffs[k] = wj.at("curve_coeffs").at(k);
        w.curve_rmse_px = wj.at("curve_rmse_px");
        w.width_m = wj.at("width_m");
        w.height_m = wj.at("height_m");
        w.volume_m3 = wj.at("volume_m3");
        w.mean_slack_m = wj.at("mean_slack_m");
        w.score = wj.at("score");
        w.principal_dir = vec_from(wj.at("principal_dir"));
        w.triplet_count = wj.at("triplet_count");
        w.split_warning = wj.at("split_warning");
        r.wrinkles.push_back(std::move(w));
    }
    r.triplet_count = j.at("triplet_count");
    if (!j.at("plan").is_null()) {
        AnalysisReport::PlanEntry p;
        const auto& pj = j.at("plan");
        p.wrinkle_id = pj.at("wrinkle_id");
        p.grasp_a = point_from(pj.at("grasp_a"));
        p.grasp_b = point_from(pj.at("grasp_b"));
        p.pull_dir_a = vec_from(pj.at("pull_dir_a"));
        p.pull_dir_b = vec_from(pj.at("pull_dir_b"));
        p.pull_dist_m = pj.at("pull_dist_m");
        p.dual_arm = pj.at("dual_arm");
        r.plan = p;
    }
    r.flat = j.at("is_flat");
    if (j.contains("timings_ms")) {
        StageTimings t;
        t.preprocess_ms = j.at("timings_ms").at("preprocess");
        t.differential_ms = j.at("timings_ms").at("differential");
        t.classify_ms = j.at("timings_ms").at("classify");
        t.detect_ms = j.at("timings_ms").at("detect");
        r.timings = t;
    }
    return r;
}

std::string simulation_to_json(const SimulationLog& log, bool include_meta) {
    ordered_json j;
    j["schema_version"] = 1;
    j["iterations"] = ordered_json::array();
    for (const auto& it : log.iterations) {
        j["iterations"].push_back(ordered_json{
            {"wrinkle_count", it.wrinkle_count},
            {"top_score", it.top_score},
            {"top_slack_m", it.top_slack_m},
            {"pull_dist_m", it.pull_dist_m},
            {"dual_arm", it.dual_arm},
            {"is_flat", it.flat},
        });
    }
    j["rni"] = log.rni;
    j["converged"] = log.converged;
    (void)include_meta;
    return j.dump(2) + "\n";
}

std::string ground_truth_to_json(const GroundTruth& gt) {
    ordered_json j;
    j["schema_version"] = 1;
    auto polylines = [](const std::vector<std::vector<WorldPoint>>& lines) {
        ordered_json arr = ordered_json::array();
        for (const auto& line : lines) {
            ordered_json pts = ordered_json::array();
            for (const auto& p : line)
                pts.push_back(ordered_json::array({p.x, p.y, p.z}));
            arr.push_back(std::move(pts));
        }
        return arr;
    };
    j["crest_polylines"] = polylines(gt.crest_polylines);
    j["contour_polylines"] = polylines(gt.contour_polylines);
    j["crest_directions_deg"] = gt.crest_directions_deg;
    j["wrinkle_count"] = gt.wrinkle_count;
    j["k_max"] = gt.k_max;
    j["k_min"] = gt.k_min;
    j["triplet_height_m"] = gt.triplet_height_m;
    j["triplet_width_m"] = gt.triplet_width_m;
    j["slack_m"] = gt.slack_m;
    return j.dump(2) + "\n";
}

}  // namespace crease
