#include "crease/config.hpp"
#include "crease/io.hpp"
#include "crease/pipeline.hpp"
#include "crease/report.hpp"
#include "crease/synth.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace crease;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path()
               / ("crease_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

}  // namespace

TEST_CASE("PFM round-trips float-representable values losslessly") {
    TempDir dir;
    Grid<double> g(37, 23, 0.0);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    for (auto& v : g.values) v = static_cast<float>(val(rng));

    const std::string path = dir.file("field.pfm");
    write_pfm(path, g);
    const Grid<double> back = read_pfm(path);
    REQUIRE(back.width == g.width);
    REQUIRE(back.height == g.height);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(static_cast<float>(back.values[i])
              == static_cast<float>(g.values[i]));
}

TEST_CASE("PGM16 stores millimetres big-endian with hole encoding") {
    TempDir dir;
    Grid<double> g(5, 4, 0.0);
    ValidityMask valid(5, 4, 1);
    g.at(0, 0) = 1.0;     // 1000 mm
    g.at(1, 0) = 0.731;   // 731 mm
    g.at(2, 0) = 65.535;  // max
    valid.at(3, 0) = 0;   // hole -> 0
    const std::string path = dir.file("depth.pgm");
    write_pgm16(path, g, valid);

    // Spot-check the first row bytes after the header.
    std::ifstream in(path, std::ios::binary);
    std::string line;
    std::getline(in, line);  // P5
    std::getline(in, line);  // dims
    std::getline(in, line);  // maxval
    const int b0 = in.get(), b1 = in.get();
    CHECK(((b0 << 8) | b1) == 1000);
    const int b2 = in.get(), b3 = in.get();
    CHECK(((b2 << 8) | b3) == 731);

    auto [back, back_valid] = read_pgm16(path);
    CHECK(back.at(0, 0) == doctest::Approx(1.0));
    CHECK(back.at(1, 0) == doctest::Approx(0.731));
    CHECK(back.at(2, 0) == doctest::Approx(65.535));
    CHECK(back_valid.at(3, 0) == 0);
    CHECK(back_valid.at(0, 1) == 1);
}

TEST_CASE("PGM8 masks and CSV fields round-trip") {
    TempDir dir;
    PixelMask m(9, 7);
    std::mt19937 rng(5);
    for (auto& b : m.bits.values) b = rng() % 2;
    write_pgm8(dir.file("mask.pgm"), m);
    const PixelMask back = read_pgm8(dir.file("mask.pgm"));
    CHECK(back.bits.values == m.bits.values);

    Grid<double> g(6, 3, 0.0);
    ValidityMask valid(6, 3, 1);
    g.at(0, 0) = 0.25;
    g.at(5, 2) = -1.5;
    valid.at(2, 1) = 0;
    write_csv(dir.file("f.csv"), g, valid);
    auto [gback, vback] = read_csv(dir.file("f.csv"));
    REQUIRE(gback.width == 6);
    REQUIRE(gback.height == 3);
    CHECK(gback.at(0, 0) == 0.25);
    CHECK(gback.at(5, 2) == -1.5);
    CHECK(vback.at(2, 1) == 0);
    CHECK(vback.at(3, 1) == 1);
}

TEST_CASE("load_depth dispatches by extension and flags bad values") {
    TempDir dir;
    Grid<double> g(8, 8, 1.0);
    g.at(2, 2) = -0.5;  // nonpositive depth -> invalid
    write_pfm(dir.file("d.pfm"), g);
    const DepthMap d = load_depth(dir.file("d.pfm"));
    CHECK(d.valid.at(2, 2) == 0);
    CHECK(d.valid.at(1, 1) == 1);

    CHECK_THROWS_AS((void)load_depth(dir.file("missing.pfm")),
                    UnsupportedFormatError);
    CHECK_THROWS_AS((void)load_depth(dir.file("d.xyz")),
                    UnsupportedFormatError);
}

TEST_CASE("synthetic scene written as depth and re-ingested matches bit-exactly") {
    TempDir dir;
    SceneSpec spec;
    spec.kind = SceneKind::gaussian_ridge;
    spec.width = 96;
    spec.height = 96;
    const Scene scene = generate(spec);

    Calibration calib;
    calib.pitch = spec.pitch;
    calib.depth_offset = 1.0;
    Grid<double> depth(96, 96, 0.0);
    for (std::size_t i = 0; i < depth.size(); ++i)
        depth.values[i] = calib.depth_offset - scene.field.z.values[i];
    write_pfm(dir.file("scene.pfm"), depth);

    const DepthMap d = load_depth(dir.file("scene.pfm"));
    const HeightField h = depth_to_height(d, calib);
    for (std::size_t i = 0; i < h.z.size(); ++i) {
        const float expect = static_cast<float>(depth.values[i]);
        CHECK(static_cast<float>(calib.depth_offset - h.z.values[i]) == expect);
    }
}

TEST_CASE("config text parsing") {
    PipelineConfig cfg;
    apply_config_text(cfg, "sigma = 2.5\nrank_window=7\n# comment\nflat_slack = 0.004\n");
    CHECK(cfg.sigma == 2.5);
    CHECK(cfg.rank_window == 7);
    CHECK(cfg.flat_slack_m == 0.004);
    CHECK_THROWS_AS(apply_config_text(cfg, "bogus = 1\n"), std::invalid_argument);

    // Full round trip through the serializer.
    cfg.hough_alpha_deg = 17.5;
    PipelineConfig back;
    apply_config_text(back, config_to_text(cfg));
    CHECK(back.hough_alpha_deg == 17.5);
    CHECK(back.sigma == 2.5);
}

TEST_CASE("analysis report round-trips through JSON losslessly") {
    SceneSpec spec;
    spec.kind = SceneKind::gaussian_ridge;
    spec.width = 160;
    spec.height = 160;
    const Scene scene = generate(spec);
    PipelineConfig cfg;
    const AnalysisResult res = run_analysis(scene.field, scene.mask, cfg);
    const auto plan = plan_top_wrinkle(res, scene.mask, cfg);
    const AnalysisReport report = build_report(res, plan, cfg, false);

    const std::string text = report_to_json(report);
    const AnalysisReport back = report_from_json(text);
    CHECK(report_to_json(back) == text);
    REQUIRE(back.wrinkles.size() == report.wrinkles.size());
    CHECK(back.wrinkles[0].points == report.wrinkles[0].points);
    CHECK(back.wrinkles[0].curve_coeffs == report.wrinkles[0].curve_coeffs);
    CHECK(back.flat == report.flat);
    REQUIRE(back.plan.has_value());
    CHECK(back.plan->pull_dist_m == report.plan->pull_dist_m);

    // Timing fields are excluded on demand and the result is deterministic.
    const AnalysisResult res2 = run_analysis(scene.field, scene.mask, cfg);
    const AnalysisReport report2 = build_report(res2, plan, cfg, false);
    CHECK(report_to_json(report2) == text);

    const AnalysisReport timed = build_report(res, plan, cfg, true);
    CHECK(report_to_json(timed).find("timings_ms") != std::string::npos);
    CHECK(text.find("timings_ms") == std::string::npos);
}

TEST_CASE("overlay renderers are deterministic and in range") {
    SceneSpec spec;
    spec.kind = SceneKind::crossing_ridges;
    spec.width = 128;
    spec.height = 128;
    const Scene scene = generate(spec);
    PipelineConfig cfg;
    const AnalysisResult res = run_analysis(scene.field, scene.mask, cfg);

    const RgbImage a = render_shape_types(res.types);
    const RgbImage b = render_shape_types(res.types);
    CHECK(a.rgb == b.rgb);
    CHECK(a.rgb.size() == 128u * 128u * 3u);

    const RgbImage topo = render_topology(res.smooth, res.topo);
    const RgbImage trip = render_triplets(res.smooth, res.wrinkles);
    const RgbImage wr = render_wrinkles(res.smooth, res.wrinkles);
    CHECK(topo.rgb.size() == wr.rgb.size());
    CHECK(trip.rgb.size() == wr.rgb.size());

    TempDir dir;
    write_ppm(dir.file("w.ppm"), wr);
    std::ifstream in(dir.file("w.ppm"), std::ios::binary);
    std::string magic;
    in >> magic;
    CHECK(magic == "P6");
}

TEST_CASE("ground truth serialization carries the scene geometry") {
    SceneSpec spec;
    spec.kind = SceneKind::crossing_ridges;
    spec.orientation_deg = 20.0;
    spec.orientation2_deg = -70.0;
    spec.width = 160;
    spec.height = 160;
    const Scene scene = generate(spec);
    const std::string text = ground_truth_to_json(scene.truth);
    CHECK(text.find("\"wrinkle_count\": 2") != std::string::npos);
    CHECK(text.find("crest_polylines") != std::string::npos);
}
