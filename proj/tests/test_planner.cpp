#include "crease/errors.hpp"
#include "crease/pipeline.hpp"
#include "crease/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace crease;

namespace {

Wrinkle stub_wrinkle(double height, double width, double slack, double score,
                     int n_triplets = 3) {
    Wrinkle w;
    for (int i = 0; i < n_triplets; ++i) {
        Triplet t;
        t.height_m = height;
        t.width_m = width;
        t.slack_m = slack;
        t.ridge_w = {0.01 * i, 0.0, height};
        w.triplets.push_back(t);
        w.points.push_back({10 * i, 20});
        w.points.push_back({10 * i + 3, 21});
    }
    w.height_m = height;
    w.width_m = width;
    w.mean_slack_m = slack;
    w.score = score;
    return w;
}

}  // namespace

TEST_CASE("select_grasp prefers tall graspable triplets") {
    const Wrinkle tall_narrow = stub_wrinkle(0.03, 0.02, 0.004, 2.0);
    const Wrinkle short_wide = stub_wrinkle(0.01, 0.09, 0.004, 5.0);
    const auto g = select_grasp({tall_narrow, short_wide}, 0.05);
    REQUIRE(g.has_value());
    CHECK(g->utility == doctest::Approx(0.03));
    CHECK(g->wrinkle_index == 0);
    CHECK(g->triplet.width_m <= 0.05);

    // Everything too wide: none.
    CHECK(!select_grasp({short_wide}, 0.05).has_value());

    // Single candidate comes back as-is.
    const auto single = select_grasp({tall_narrow}, 0.05);
    REQUIRE(single.has_value());
    CHECK(single->wrinkle_index == 0);

    // Ties break toward the higher-scored wrinkle.
    const Wrinkle twin_a = stub_wrinkle(0.02, 0.02, 0.004, 1.0);
    const Wrinkle twin_b = stub_wrinkle(0.02, 0.02, 0.004, 9.0);
    const auto tie = select_grasp({twin_a, twin_b}, 0.05);
    REQUIRE(tie.has_value());
    CHECK(tie->wrinkle_index == 1);

    CHECK_THROWS_AS((void)select_grasp({tall_narrow}, 0.0),
                    std::invalid_argument);
}

TEST_CASE("principal_direction on axis-aligned and diagonal sets") {
    Wrinkle w;
    for (int x = 0; x < 30; ++x) w.points.push_back({x, 5});
    const Vec2 h = principal_direction(w);
    CHECK(h.x == doctest::Approx(1.0));
    CHECK(h.y == doctest::Approx(0.0).epsilon(1e-9));

    Wrinkle diag;
    for (int i = 0; i < 30; ++i) diag.points.push_back({i, i});
    const Vec2 d = principal_direction(diag);
    CHECK(d.x == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(d.y == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));

    // Isotropic set: degenerate.
    Wrinkle iso;
    iso.points = {{0, 0}, {0, 10}, {10, 0}, {10, 10}};
    CHECK_THROWS_AS((void)principal_direction(iso), DegenerateDirectionError);

    Wrinkle tiny;
    tiny.points = {{3, 3}};
    CHECK_THROWS_AS((void)principal_direction(tiny), DegenerateDirectionError);
}

TEST_CASE("principal_direction is scale invariant and rotation equivariant") {
    Wrinkle w;
    for (int i = 0; i < 40; ++i)
        w.points.push_back({static_cast<int>(10 + i * 0.8), 5 + i / 3});
    const Vec2 base = principal_direction(w);

    Wrinkle scaled;
    for (const auto& p : w.points) scaled.points.push_back({p.x * 3, p.y * 3});
    const Vec2 s = principal_direction(scaled);
    CHECK(std::abs(s.x - base.x) < 1e-6);
    CHECK(std::abs(s.y - base.y) < 1e-6);

    // Rotate the point set by 30 degrees.
    const double a = 30.0 * std::numbers::pi / 180.0;
    Wrinkle rot;
    for (const auto& p : w.points)
        rot.points.push_back(
            {static_cast<int>(std::lround(p.x * std::cos(a) - p.y * std::sin(a))),
             static_cast<int>(std::lround(p.x * std::sin(a) + p.y * std::cos(a)))});
    const Vec2 r = principal_direction(rot);
    const double base_ang = std::atan2(base.y, base.x);
    const double rot_ang = std::atan2(r.y, r.x);
    const double diff = std::abs(fold_direction(rot_ang - base_ang - a));
    CHECK(diff < 0.02);  // integer rounding of the rotated pixels
}

TEST_CASE("principal direction of a rotated ridge scene") {
    SceneSpec spec;
    spec.kind = SceneKind::gaussian_ridge;
    spec.orientation_deg = 45.0;
    spec.width = 192;
    spec.height = 192;
    const Scene scene = generate(spec);
    PipelineConfig cfg;
    const AnalysisResult res = run_analysis(scene.field, scene.mask, cfg);
    REQUIRE(res.wrinkles.size() == 1);
    const Vec2 d = principal_direction(res.wrinkles[0]);
    const double ang = std::atan2(d.y, d.x) * 180.0 / std::numbers::pi;
    CHECK(std::abs(ang - 45.0) < 3.0);
}

TEST_CASE("flatten plan on the benchmark scene") {
    SceneSpec spec;
    spec.kind = SceneKind::benchmark_oriented;
    spec.orientation_deg = 0.0;
    spec.width = 256;
    spec.height = 256;
    spec.mask_margin_px = 6;
    const Scene scene = generate(spec);
    PipelineConfig cfg;
    const AnalysisResult res = run_analysis(scene.field, scene.mask, cfg);
    REQUIRE(!res.wrinkles.empty());

    Calibration calib;
    calib.pitch = spec.pitch;
    const FlattenPlan plan =
        make_flatten_plan(res.wrinkles[0], 0, scene.mask, calib);
    CHECK(plan.dual_arm);
    // Pull directions along +-x.
    CHECK(std::abs(plan.pull_dir_a.x) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(plan.pull_dir_a.x == doctest::Approx(-plan.pull_dir_b.x));
    CHECK(plan.pull_dir_a.y == doctest::Approx(-plan.pull_dir_b.y));
    // Grasps on opposite garment edges (mask inset 6 px).
    CHECK(plan.grasp_a.x == doctest::Approx((256 - 1 - 6) * spec.pitch)
                                .epsilon(0.02));
    CHECK(plan.grasp_b.x == doctest::Approx(6 * spec.pitch).epsilon(0.2));
    CHECK(plan.pull_dist_m
          == doctest::Approx(0.5 * res.wrinkles[0].mean_slack_m));
}

TEST_CASE("plan falls back to single arm when the garment runs off-image") {
    SceneSpec spec;
    spec.kind = SceneKind::benchmark_oriented;
    spec.orientation_deg = 0.0;
    spec.width = 256;
    spec.height = 256;
    const Scene scene = generate(spec);
    PipelineConfig cfg;
    const AnalysisResult res = run_analysis(scene.field, scene.mask, cfg);
    REQUIRE(!res.wrinkles.empty());

    // Extend the mask to the right image border: that garment edge is no
    // longer in view, so that arm cannot be planned.
    PixelMask mask = scene.mask;
    for (int y = 0; y < 256; ++y)
        for (int x = 250; x < 256; ++x) mask.set(x, y, true);
    for (int y = 100; y < 160; ++y)
        for (int x = 6; x < 256; ++x) mask.set(x, y, true);

    Calibration calib;
    calib.pitch = spec.pitch;
    const FlattenPlan plan =
        make_flatten_plan(res.wrinkles[0], 0, mask, calib);
    CHECK(!plan.dual_arm);

    // A wrinkle fully outside the garment mask cannot be planned at all.
    PixelMask off(256, 256);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x) off.set(x, y);
    CHECK_THROWS_AS(
        (void)make_flatten_plan(res.wrinkles[0], 0, off, calib),
        PlanningError);
}

TEST_CASE("plan mirrors with the scene") {
    SceneSpec spec;
    spec.kind = SceneKind::benchmark_oriented;
    spec.orientation_deg = 19.3;
    spec.width = 256;
    spec.height = 256;
    spec.mask_margin_px = 6;
    const Scene scene = generate(spec);
    PipelineConfig cfg;

    HeightField mirrored(256, 256, spec.pitch);
    for (int y = 0; y < 256; ++y)
        for (int x = 0; x < 256; ++x)
            mirrored.z.at(x, y) = scene.field.z.at(255 - x, y);

    const AnalysisResult ra = run_analysis(scene.field, scene.mask, cfg);
    const AnalysisResult rb = run_analysis(mirrored, scene.mask, cfg);
    REQUIRE(ra.wrinkles.size() == 1);
    REQUIRE(rb.wrinkles.size() == 1);
    Calibration calib;
    calib.pitch = spec.pitch;
    const FlattenPlan pa = make_flatten_plan(ra.wrinkles[0], 0, scene.mask, calib);
    const FlattenPlan pb = make_flatten_plan(rb.wrinkles[0], 0, scene.mask, calib);

    const double wm = 255 * spec.pitch;
    // Mirrored grasp pair: {a,b} of one plan maps onto {mirror(b), mirror(a)}.
    const double e1 = std::hypot(pb.grasp_a.x - (wm - pa.grasp_b.x),
                                 pb.grasp_a.y - pa.grasp_b.y);
    const double e2 = std::hypot(pb.grasp_b.x - (wm - pa.grasp_a.x),
                                 pb.grasp_b.y - pa.grasp_a.y);
    CHECK(e1 <= 2.5 * spec.pitch);
    CHECK(e2 <= 2.5 * spec.pitch);
    // Pull axes mirror too (as undirected axes).
    const double ax_a = std::atan2(pa.pull_dir_a.y, pa.pull_dir_a.x);
    const double ax_b = std::atan2(pb.pull_dir_a.y, pb.pull_dir_a.x);
    CHECK(std::abs(fold_direction(ax_b - (std::numbers::pi - ax_a))) < 0.05);
}

TEST_CASE("is_flat thresholds") {
    CHECK(is_flat({}, 0.005));
    CHECK(is_flat({stub_wrinkle(0.01, 0.02, 0.004, 1.0)}, 0.005));
    CHECK(!is_flat({stub_wrinkle(0.01, 0.02, 0.02, 1.0)}, 0.005));
    CHECK(!is_flat({stub_wrinkle(0.01, 0.02, 0.004, 1.0),
                    stub_wrinkle(0.01, 0.02, 0.0061, 1.0)},
                   0.005));
}

TEST_CASE("virtual flattening attenuates the planned wrinkle") {
    SceneSpec spec;
    spec.kind = SceneKind::benchmark_oriented;
    spec.orientation_deg = 0.0;
    spec.width = 256;
    spec.height = 256;
    spec.mask_margin_px = 6;
    const Scene scene = generate(spec);
    PipelineConfig cfg;
    const AnalysisResult res = run_analysis(scene.field, scene.mask, cfg);
    REQUIRE(!res.wrinkles.empty());
    const auto plan = plan_top_wrinkle(res, scene.mask, cfg);
    REQUIRE(plan.has_value());

    const HeightField after = virtual_flatten_step(scene.field, *plan, res.wrinkles);
    // Crest flattened to ~chord level: residual bump height above the
    // contour height is a small fraction of the original.
    const double chord_h = spec.amplitude_m * std::exp(-0.5);
    double max_before = 0.0, max_after = 0.0;
    for (int x = 60; x < 200; ++x) {
        max_before = std::max(max_before,
                              scene.field.z.at(x, 127) - chord_h);
        max_after = std::max(max_after, after.z.at(x, 127) - chord_h);
    }
    CHECK(max_after <= 0.10 * max_before);

    // Zero pull leaves the field unchanged.
    FlattenPlan no_pull = *plan;
    no_pull.pull_dist_m = 0.0;
    const HeightField same = virtual_flatten_step(scene.field, no_pull, res.wrinkles);
    CHECK(same.z.values == scene.field.z.values);

    // Volume decreases after a pull.
    const AnalysisResult res2 = run_analysis(after, scene.mask, cfg);
    double vol_before = 0.0, vol_after = 0.0;
    for (const auto& w : res.wrinkles) vol_before += w.volume_m3;
    for (const auto& w : res2.wrinkles) vol_after += w.volume_m3;
    CHECK(vol_after < vol_before);

    CHECK_THROWS_AS(
        (void)virtual_flatten_step(scene.field, FlattenPlan{}, res.wrinkles),
        std::invalid_argument);
}

TEST_CASE("flatten loop terminates quickly on synth scenes") {
    PipelineConfig cfg;

    // Already-flat scene: zero iterations of action.
    SceneSpec flat;
    flat.kind = SceneKind::plane;
    flat.width = 160;
    flat.height = 160;
    const Scene fs = generate(flat);
    const SimulationLog flat_log = run_flatten_loop(fs.field, fs.mask, cfg, 10);
    CHECK(flat_log.converged);
    CHECK(flat_log.rni == 0);

    // Benchmark single wrinkle: one pull.
    SceneSpec bench;
    bench.kind = SceneKind::benchmark_oriented;
    bench.orientation_deg = -32.1;
    bench.width = 256;
    bench.height = 256;
    bench.mask_margin_px = 6;
    const Scene bs = generate(bench);
    const SimulationLog bench_log = run_flatten_loop(bs.field, bs.mask, cfg, 10);
    CHECK(bench_log.converged);
    CHECK(bench_log.rni == 1);

    // Five parallel wrinkles: converges within the ten-iteration budget.
    SceneSpec multi;
    multi.kind = SceneKind::multi_wrinkle;
    multi.count = 5;
    multi.width = 256;
    multi.height = 256;
    multi.sigma_m = 0.006;
    multi.amplitude_m = 0.018;
    multi.mask_margin_px = 6;
    const Scene ms = generate(multi);
    const SimulationLog multi_log = run_flatten_loop(ms.field, ms.mask, cfg, 10);
    CHECK(multi_log.converged);
    CHECK(multi_log.rni <= 10);

    // Volume is monotone along the loop.
    HeightField h = ms.field;
    double prev_vol = 1e300;
    for (int i = 0; i < 3; ++i) {
        const AnalysisResult res = run_analysis(h, ms.mask, cfg);
        double vol = 0.0;
        for (const auto& w : res.wrinkles) vol += w.volume_m3;
        CHECK(vol <= prev_vol * (1.0 + 1e-9) + 1e-12);
        prev_vol = vol;
        if (is_flat(res.wrinkles, cfg.flat_slack_m)) break;
        const auto plan = plan_top_wrinkle(res, ms.mask, cfg);
        if (!plan) break;
        h = virtual_flatten_step(h, *plan, res.wrinkles);
    }
}
