#include "crease/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace crease {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double d) { return d * kPi / 180.0; }

struct LineFeature {
    double cx, cy;    // a point on the crest, metres
    double dx, dy;    // unit direction of the crest
    bool ray = false; // ray features end at (cx, cy)
};

// Signed/unsigned distance from (x, y) to the feature's crest, metres.
double feature_distance(const LineFeature& f, double x, double y) {
    const double px = x - f.cx, py = y - f.cy;
    const double s = px * f.dx + py * f.dy;
    if (f.ray && s < 0.0) return std::hypot(px, py);
    return std::abs(-px * f.dy + py * f.dx);
}

std::vector<LineFeature> scene_features(const SceneSpec& spec) {
    const double cx = 0.5 * (spec.width - 1) * spec.pitch;
    const double cy = 0.5 * (spec.height - 1) * spec.pitch;
    auto line = [&](double deg, double offx = 0.0, double offy = 0.0,
                    bool ray = false) {
        const double a = deg2rad(deg);
        return LineFeature{cx + offx, cy + offy, std::cos(a), std::sin(a), ray};
    };
    switch (spec.kind) {
        case SceneKind::gaussian_ridge:
        case SceneKind::benchmark_oriented:
        case SceneKind::half_cylinder:
            return {line(spec.orientation_deg)};
        case SceneKind::crossing_ridges:
            return {line(spec.orientation_deg), line(spec.orientation2_deg)};
        case SceneKind::t_junction:
            return {line(spec.orientation_deg),
                    line(spec.orientation_deg + 90.0, 0.0, 0.0, true)};
        case SceneKind::multi_wrinkle: {
            std::vector<LineFeature> fs;
            const double a = deg2rad(spec.orientation_deg);
            const double nx = -std::sin(a), ny = std::cos(a);
            const double gap =
                std::min(spec.width, spec.height) * spec.pitch / (spec.count + 1);
            for (int j = 0; j < spec.count; ++j) {
                const double off = (j - 0.5 * (spec.count - 1)) * gap;
                fs.push_back(line(spec.orientation_deg, off * nx, off * ny));
            }
            return fs;
        }
        default:
            return {};
    }
}

double ridge_profile(const SceneSpec& spec, double u) {
    if (spec.kind == SceneKind::half_cylinder) {
        const double r = spec.radius_m;
        return std::sqrt(std::max(0.0, r * r - u * u));
    }
    return spec.amplitude_m * std::exp(-0.5 * u * u / (spec.sigma_m * spec.sigma_m));
}

void check_extent(const SceneSpec& spec) {
    const double span = std::min(spec.width, spec.height) * spec.pitch;
    double extent = 0.0;
    switch (spec.kind) {
        case SceneKind::gaussian_ridge:
        case SceneKind::benchmark_oriented:
        case SceneKind::crossing_ridges:
        case SceneKind::t_junction:
        case SceneKind::multi_wrinkle:
            extent = 6.0 * spec.sigma_m;
            break;
        case SceneKind::half_cylinder:
            extent = 2.0 * spec.radius_m;
            break;
        default:
            return;  // plane and hemisphere patches have no across extent
    }
    if (extent > 0.8 * span)
        throw std::invalid_argument("scene spec: feature extent "
                                    + std::to_string(extent)
                                    + " m exceeds 80% of the grid span");
}

std::vector<WorldPoint> clip_polyline(const SceneSpec& spec,
                                      const LineFeature& f) {
    // Sample the crest at one-pixel steps over the grid, world coords.
    const double w = (spec.width - 1) * spec.pitch;
    const double h = (spec.height - 1) * spec.pitch;
    const double tmax = std::hypot(w, h);
    std::vector<WorldPoint> pts;
    for (double t = -tmax; t <= tmax; t += spec.pitch) {
        if (f.ray && t < 0.0) continue;
        const double x = f.cx + t * f.dx;
        const double y = f.cy + t * f.dy;
        if (x < 0.0 || y < 0.0 || x > w || y > h) continue;
        pts.push_back({x, y, ridge_profile(spec, 0.0)});
    }
    return pts;
}

std::vector<WorldPoint> offset_polyline(const std::vector<WorldPoint>& crest,
                                        const LineFeature& f, double off,
                                        double z) {
    std::vector<WorldPoint> pts;
    pts.reserve(crest.size());
    for (const auto& p : crest)
        pts.push_back({p.x - off * f.dy, p.y + off * f.dx, z});
    return pts;
}

}  // namespace

std::string scene_kind_name(SceneKind k) {
    switch (k) {
        case SceneKind::plane: return "plane";
        case SceneKind::hemisphere: return "hemisphere";
        case SceneKind::half_cylinder: return "half_cylinder";
        case SceneKind::gaussian_ridge: return "gaussian_ridge";
        case SceneKind::crossing_ridges: return "crossing_ridges";
        case SceneKind::t_junction: return "t_junction";
        case SceneKind::multi_wrinkle: return "multi_wrinkle";
        case SceneKind::benchmark_oriented: return "benchmark_oriented";
    }
    return "plane";
}

SceneKind scene_kind_from_name(const std::string& name) {
    static const std::map<std::string, SceneKind> kNames = {
        {"plane", SceneKind::plane},
        {"hemisphere", SceneKind::hemisphere},
        {"half_cylinder", SceneKind::half_cylinder},
        {"gaussian_ridge", SceneKind::gaussian_ridge},
        {"crossing_ridges", SceneKind::crossing_ridges},
        {"t_junction", SceneKind::t_junction},
        {"multi_wrinkle", SceneKind::multi_wrinkle},
        {"benchmark_oriented", SceneKind::benchmark_oriented},
    };
    const auto it = kNames.find(name);
    if (it == kNames.end())
        throw std::invalid_argument("unknown scene kind: " + name);
    return it->second;
}

double analytic_height(const SceneSpec& spec, double x_m, double y_m) {
    switch (spec.kind) {
        case SceneKind::plane:
            return 0.0;
        case SceneKind::hemisphere: {
            const double cx = 0.5 * (spec.width - 1) * spec.pitch;
            const double cy = 0.5 * (spec.height - 1) * spec.pitch;
            const double r2 = (x_m - cx) * (x_m - cx) + (y_m - cy) * (y_m - cy);
            return std::sqrt(std::max(0.0, spec.radius_m * spec.radius_m - r2));
        }
        default: {
            double h = 0.0;
            for (const auto& f : scene_features(spec))
                h = std::max(h, ridge_profile(spec, feature_distance(f, x_m, y_m)));
            return h;
        }
    }
}

Scene generate(const SceneSpec& spec) {
    if (spec.width < 8 || spec.height < 8)
        throw std::invalid_argument("scene spec: grid too small");
    if (spec.pitch <= 0.0 || spec.amplitude_m <= 0.0 || spec.sigma_m <= 0.0
        || spec.radius_m <= 0.0)
        throw std::invalid_argument("scene spec: scale parameters must be positive");
    if (spec.orientation_deg < -90.0 || spec.orientation_deg > 90.0)
        throw std::invalid_argument("scene spec: orientation outside [-90, 90]");
    check_extent(spec);

    Scene scene;
    scene.field = HeightField(spec.width, spec.height, spec.pitch);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x)
            scene.field.z.at(x, y) =
                analytic_height(spec, x * spec.pitch, y * spec.pitch);

    // Spherical and cylindrical caps turn tangent to the view direction at
    // the rim; a depth sensor gets no return there, so mark those pixels
    // invalid (slope beyond ~70 degrees).
    if (spec.kind == SceneKind::hemisphere
        || spec.kind == SceneKind::half_cylinder) {
        const double cx = 0.5 * (spec.width - 1) * spec.pitch;
        const double cy = 0.5 * (spec.height - 1) * spec.pitch;
        const double rim = spec.radius_m * std::sin(70.0 * kPi / 180.0);
        const auto features = scene_features(spec);
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                const double xm = x * spec.pitch, ym = y * spec.pitch;
                const double d = spec.kind == SceneKind::hemisphere
                                     ? std::hypot(xm - cx, ym - cy)
                                     : feature_distance(features[0], xm, ym);
                if (d > rim) scene.field.valid.at(x, y) = 0;
            }
        }
    }

    if (spec.noise_sigma_m > 0.0) {
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> noise(0.0, spec.noise_sigma_m);
        for (double& z : scene.field.z.values) z += noise(rng);
    }

    scene.mask = PixelMask(spec.width, spec.height);
    const int m = spec.mask_margin_px;
    for (int y = m; y < spec.height - m; ++y)
        for (int x = m; x < spec.width - m; ++x) scene.mask.set(x, y);

    GroundTruth& gt = scene.truth;
    const auto features = scene_features(spec);
    for (const auto& f : features) {
        auto crest = clip_polyline(spec, f);
        if (crest.empty()) continue;
        const double contour_z =
            spec.kind == SceneKind::half_cylinder
                ? 0.0
                : spec.amplitude_m * std::exp(-0.5);
        const double off =
            spec.kind == SceneKind::half_cylinder ? spec.radius_m : spec.sigma_m;
        gt.contour_polylines.push_back(offset_polyline(crest, f, off, contour_z));
        gt.contour_polylines.push_back(offset_polyline(crest, f, -off, contour_z));
        gt.crest_polylines.push_back(std::move(crest));
        gt.crest_directions_deg.push_back(
            std::atan2(f.dy, f.dx) * 180.0 / kPi);
    }
    gt.wrinkle_count = static_cast<int>(gt.crest_polylines.size());

    switch (spec.kind) {
        case SceneKind::plane:
        case SceneKind::hemisphere:
            gt.wrinkle_count = 0;
            gt.crest_polylines.clear();
            gt.contour_polylines.clear();
            gt.crest_directions_deg.clear();
            break;
        case SceneKind::half_cylinder:
            gt.k_max = 0.0;
            gt.k_min = -1.0 / spec.radius_m;
            gt.triplet_width_m = 2.0 * spec.radius_m;
            gt.triplet_height_m = spec.radius_m;
            break;
        default: {
            gt.k_max = 0.0;
            gt.k_min = -spec.amplitude_m / (spec.sigma_m * spec.sigma_m);
            gt.triplet_width_m = 2.0 * spec.sigma_m;
            gt.triplet_height_m = spec.amplitude_m * (1.0 - std::exp(-0.5));
            gt.slack_m = gaussian_ridge_slack(spec.amplitude_m, spec.sigma_m,
                                              spec.sigma_m);
            break;
        }
    }
    return scene;
}

CurvaturePack analytic_curvature(const SceneSpec& spec, double x_m,
                                 double y_m) {
    switch (spec.kind) {
        case SceneKind::plane:
            return {};
        case SceneKind::hemisphere: {
            const double cx = 0.5 * (spec.width - 1) * spec.pitch;
            const double cy = 0.5 * (spec.height - 1) * spec.pitch;
            const double r2 = (x_m - cx) * (x_m - cx) + (y_m - cy) * (y_m - cy);
            if (r2 >= 0.9 * spec.radius_m * spec.radius_m)
                throw std::domain_error("analytic_curvature: point too close to the rim");
            const double k = -1.0 / spec.radius_m;
            return {k, k * k, k, k};
        }
        default: {
            const auto features = scene_features(spec);
            // Closed form only where a single feature dominates.
            int live = 0;
            double u = 0.0;
            bool ray_end = false;
            for (const auto& f : features) {
                const double d = feature_distance(f, x_m, y_m);
                if (ridge_profile(spec, d) > 1e-9 * spec.amplitude_m) {
                    ++live;
                    u = d;
                    const double px = x_m - f.cx, py = y_m - f.cy;
                    ray_end = f.ray && (px * f.dx + py * f.dy) < 0.0;
                }
            }
            if (live != 1 || ray_end)
                throw std::domain_error("analytic_curvature: no closed form at this point");
            if (spec.kind == SceneKind::half_cylinder) {
                if (u >= 0.9 * spec.radius_m)
                    throw std::domain_error("analytic_curvature: too close to the cylinder rim");
                const double k = -1.0 / spec.radius_m;
                return {k / 2.0, 0.0, 0.0, k};
            }
            const double s2 = spec.sigma_m * spec.sigma_m;
            const double g = std::exp(-0.5 * u * u / s2);
            const double h1 = -spec.amplitude_m * u / s2 * g;
            const double h2 = spec.amplitude_m * (u * u - s2) / (s2 * s2) * g;
            const double kappa = h2 / std::pow(1.0 + h1 * h1, 1.5);
            const double kmax = std::max(kappa, 0.0);
            const double kmin = std::min(kappa, 0.0);
            return {kappa / 2.0, 0.0, kmax, kmin};
        }
    }
}

double gaussian_ridge_slack(double amplitude_m, double sigma_m,
                            double halfspan_m, int samples) {
    const double s2 = sigma_m * sigma_m;
    auto height = [&](double u) {
        return amplitude_m * std::exp(-0.5 * u * u / s2);
    };
    const double du = 2.0 * halfspan_m / samples;
    double arc = 0.0;
    double prev = height(-halfspan_m);
    for (int i = 1; i <= samples; ++i) {
        const double u = -halfspan_m + i * du;
        const double z = height(u);
        arc += std::hypot(du, z - prev);
        prev = z;
    }
    const double chord =
        std::hypot(2.0 * halfspan_m, height(halfspan_m) - height(-halfspan_m));
    return std::max(0.0, arc - chord);
}

double profile_slack(const SceneSpec& spec, WorldPoint a, WorldPoint b,
                     int samples) {
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const double ds = len / samples;
    double arc = 0.0;
    double prev = analytic_height(spec, a.x, a.y);
    for (int i = 1; i <= samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        const double z =
            analytic_height(spec, a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
        arc += std::hypot(ds, z - prev);
        prev = z;
    }
    const double za = analytic_height(spec, a.x, a.y);
    const double zb = analytic_height(spec, b.x, b.y);
    const double chord = std::hypot(len, zb - za);
    return std::max(0.0, arc - chord);
}

double amplitude_for_slack(double sigma_m, double target_slack_m) {
    double lo = 1e-6, hi = 0.5;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double s = gaussian_ridge_slack(mid, sigma_m, sigma_m, 20000);
        if (s < target_slack_m)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> benchmark_orientations() {
    std::vector<double> out;
    for (int i = 0; i < 8; ++i) out.push_back(-45.0 + i * 90.0 / 7.0);
    return out;
}

namespace {

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string()
                                          : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }
    return kv;
}

}  // namespace

SceneSpec parse_scene_spec(const std::string& text) {
    SceneSpec spec;
    for (const auto& [key, val] : parse_kv(text)) {
        if (key == "kind") spec.kind = scene_kind_from_name(val);
        else if (key == "amplitude") spec.amplitude_m = std::stod(val);
        else if (key == "sigma") spec.sigma_m = std::stod(val);
        else if (key == "radius") spec.radius_m = std::stod(val);
        else if (key == "orientation") spec.orientation_deg = std::stod(val);
        else if (key == "orientation2") spec.orientation2_deg = std::stod(val);
        else if (key == "count") spec.count = std::stoi(val);
        else if (key == "seed") spec.seed = std::stoull(val);
        else if (key == "width") spec.width = std::stoi(val);
        else if (key == "height") spec.height = std::stoi(val);
        else if (key == "pitch") spec.pitch = std::stod(val);
        else if (key == "noise_sigma") spec.noise_sigma_m = std::stod(val);
        else if (key == "mask_margin") spec.mask_margin_px = std::stoi(val);
        else throw std::invalid_argument("scene spec: unknown key '" + key + "'");
    }
    return spec;
}

std::string scene_spec_to_text(const SceneSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    out << "kind = " << scene_kind_name(spec.kind) << "\n"
        << "amplitude = " << spec.amplitude_m << "\n"
        << "sigma = " << spec.sigma_m << "\n"
        << "radius = " << spec.radius_m << "\n"
        << "orientation = " << spec.orientation_deg << "\n"
        << "orientation2 = " << spec.orientation2_deg << "\n"
        << "count = " << spec.count << "\n"
        << "seed = " << spec.seed << "\n"
        << "width = " << spec.width << "\n"
        << "height = " << spec.height << "\n"
        << "pitch = " << spec.pitch << "\n"
        << "noise_sigma = " << spec.noise_sigma_m << "\n"
        << "mask_margin = " << spec.mask_margin_px << "\n";
    return out.str();
}

SceneSpec load_scene_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene spec: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scene_spec(buf.str());
}

}  // namespace crease
