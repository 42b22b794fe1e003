#include "crease/errors.hpp"
#include "crease/io.hpp"
#include "crease/pipeline.hpp"
#include "crease/report.hpp"
#include "crease/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace crease;

constexpr int kExitFormat = 2;
constexpr int kExitEmptyMask = 3;
constexpr int kExitInternal = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string render_dir;
    double pitch = -1.0;         // <0: take the config value
    double depth_offset = -1e9;
    bool no_timing = false;
};

PipelineConfig resolve_config(const CommonOpts& opts) {
    PipelineConfig cfg;
    if (!opts.config_path.empty()) cfg = load_config_file(opts.config_path);
    if (opts.pitch > 0.0) cfg.pitch = opts.pitch;          // flags win
    if (opts.depth_offset > -1e8) cfg.depth_offset = opts.depth_offset;
    return cfg;
}

struct Inputs {
    HeightField field;
    PixelMask mask;
};

Inputs load_inputs(const std::string& input, const std::string& mask_path,
                   const PipelineConfig& cfg) {
    const DepthMap depth = load_depth(input);
    Calibration calib;
    calib.pitch = cfg.pitch;
    calib.depth_offset = cfg.depth_offset;
    Inputs in;
    in.field = depth_to_height(depth, calib);
    if (mask_path.empty()) {
        in.mask = PixelMask(in.field.width(), in.field.height(), true);
    } else {
        in.mask = load_mask(mask_path);
        if (!in.mask.bits.same_shape(in.field.width(), in.field.height()))
            throw UnsupportedFormatError("mask dimensions do not match the depth map");
    }
    if (in.mask.count() == 0) throw std::invalid_argument("empty mask");
    return in;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw UnsupportedFormatError("cannot write: " + out_path);
    out << text;
}

void write_overlays(const std::string& dir, const AnalysisResult& res) {
    std::filesystem::create_directories(dir);
    const auto p = [&](const char* name) {
        return (std::filesystem::path(dir) / name).string();
    };
    write_ppm(p("01_height.ppm"), render_height(res.smooth));
    write_ppm(p("02_shape_types.ppm"), render_shape_types(res.types));
    write_ppm(p("03_topology.ppm"), render_topology(res.smooth, res.topo));
    write_ppm(p("04_triplets.ppm"), render_triplets(res.smooth, res.wrinkles));
    write_ppm(p("05_wrinkles.ppm"), render_wrinkles(res.smooth, res.wrinkles));
}

int cmd_analyze(const std::string& input, const std::string& mask_path,
                const CommonOpts& opts, bool with_plan) {
    const PipelineConfig cfg = resolve_config(opts);
    const Inputs in = load_inputs(input, mask_path, cfg);
    const AnalysisResult res = run_analysis(in.field, in.mask, cfg);
    std::optional<FlattenPlan> plan;
    if (with_plan) plan = plan_top_wrinkle(res, in.mask, cfg);
    const AnalysisReport report = build_report(res, plan, cfg, !opts.no_timing);
    emit(report_to_json(report), opts.out_path);
    if (!opts.render_dir.empty()) write_overlays(opts.render_dir, res);
    return 0;
}

int cmd_simulate(const std::string& spec_path, const std::string& input,
                 const std::string& mask_path, const CommonOpts& opts,
                 int max_iters, std::optional<std::uint64_t> seed) {
    PipelineConfig cfg = resolve_config(opts);
    HeightField field;
    PixelMask mask;
    if (!spec_path.empty()) {
        SceneSpec spec = load_scene_spec_file(spec_path);
        if (seed) spec.seed = *seed;
        Scene scene = generate(spec);
        field = std::move(scene.field);
        mask = std::move(scene.mask);
        cfg.pitch = spec.pitch;
    } else {
        Inputs in = load_inputs(input, mask_path, cfg);
        field = std::move(in.field);
        mask = std::move(in.mask);
    }
    const SimulationLog log = run_flatten_loop(field, mask, cfg, max_iters);
    emit(simulation_to_json(log, !opts.no_timing), opts.out_path);
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir,
              const CommonOpts& opts, std::optional<std::uint64_t> seed) {
    const PipelineConfig cfg = resolve_config(opts);
    SceneSpec spec = load_scene_spec_file(spec_path);
    if (seed) spec.seed = *seed;
    const Scene scene = generate(spec);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw UnsupportedFormatError("cannot create: " + out_dir);
    const auto p = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    // Depth map as the sensor would have seen it.
    Grid<double> depth(spec.width, spec.height, 0.0);
    for (std::size_t i = 0; i < depth.size(); ++i)
        depth.values[i] = cfg.depth_offset - scene.field.z.values[i];
    for (std::size_t i = 0; i < depth.size(); ++i)
        if (!scene.field.valid.values[i]) depth.values[i] = 0.0;
    write_pfm(p("depth.pfm"), depth);
    write_pgm8(p("mask.pgm"), scene.mask);
    emit(ground_truth_to_json(scene.truth), p("truth.json"));
    std::ofstream spec_out(p("scene.txt"));
    spec_out << scene_spec_to_text(spec);
    return 0;
}

int cmd_render(const std::string& input, const std::string& mask_path,
               const CommonOpts& opts) {
    const PipelineConfig cfg = resolve_config(opts);
    const Inputs in = load_inputs(input, mask_path, cfg);
    const AnalysisResult res = run_analysis(in.field, in.mask, cfg);
    const std::string dir =
        opts.render_dir.empty() ? std::string("overlays") : opts.render_dir;
    write_overlays(dir, res);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical wrinkle analysis and flattening planner for "
                 "cloth-like depth maps"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string input, mask_path, spec_path, out_dir;
    int max_iters = 10;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "key=value config file");
        sub->add_option("--out", opts.out_path, "write the JSON output here");
        sub->add_option("--pitch", opts.pitch, "metres per pixel (overrides config)");
        sub->add_option("--offset", opts.depth_offset,
                        "reference depth in metres (overrides config)");
        sub->add_flag("--no-timing", opts.no_timing,
                      "omit timing fields for byte-stable output");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "run the full pipeline");
    analyze->add_option("input", input, "depth map (.pfm/.pgm/.csv)")->required();
    analyze->add_option("--mask", mask_path, "garment mask (.pgm)");
    analyze->add_option("--render", opts.render_dir, "write overlay images here");
    add_common(analyze);

    CLI::App* plan = app.add_subcommand("plan", "analyze and plan a flattening pull");
    plan->add_option("input", input, "depth map (.pfm/.pgm/.csv)")->required();
    plan->add_option("--mask", mask_path, "garment mask (.pgm)");
    plan->add_option("--render", opts.render_dir, "write overlay images here");
    add_common(plan);

    CLI::App* simulate =
        app.add_subcommand("simulate", "closed-loop analyze/plan/flatten");
    simulate->add_option("--spec", spec_path, "scene spec (key=value)");
    simulate->add_option("input", input, "depth map instead of a spec");
    simulate->add_option("--mask", mask_path, "garment mask (.pgm)");
    simulate->add_option("--max-iters", max_iters, "iteration budget")
        ->default_val(10);
    simulate->add_option("--seed", seed, "override the scene seed");
    add_common(simulate);

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scene");
    synth->add_option("spec", spec_path, "scene spec (key=value)")->required();
    synth->add_option("outdir", out_dir, "output directory")->required();
    synth->add_option("--seed", seed, "override the scene seed");
    add_common(synth);

    CLI::App* render = app.add_subcommand("render", "write overlay images only");
    render->add_option("input", input, "depth map (.pfm/.pgm/.csv)")->required();
    render->add_option("--mask", mask_path, "garment mask (.pgm)");
    render->add_option("--render", opts.render_dir, "overlay directory");
    add_common(render);

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(input, mask_path, opts, false);
        if (plan->parsed()) return cmd_analyze(input, mask_path, opts, true);
        if (simulate->parsed()) {
            if (spec_path.empty() && input.empty()) {
                std::cerr << "simulate: need --spec or an input depth map\n";
                return kExitFormat;
            }
            return cmd_simulate(spec_path, input, mask_path, opts, max_iters,
                                seed);
        }
        if (synth->parsed()) return cmd_synth(spec_path, out_dir, opts, seed);
        if (render->parsed()) return cmd_render(input, mask_path, opts);
    } catch (const crease::UnsupportedFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const crease::InternalError& e) {
        std::cerr << "internal invariant breach in stage '" << e.stage
                  << "': " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::invalid_argument& e) {
        if (std::string(e.what()).find("empty mask") != std::string::npos) {
            std::cerr << "error: empty mask\n";
            return kExitEmptyMask;
        }
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
