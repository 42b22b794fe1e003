#include "crease/planner.hpp"

#include "crease/errors.hpp"

#include <algorithm>
#include <cmath>

namespace crease {

std::optional<GraspCandidate> select_grasp(const std::vector<Wrinkle>& wrinkles,
                                           double aperture_m) {
    if (aperture_m <= 0.0)
        throw std::invalid_argument("select_grasp: aperture must be positive");
    std::optional<GraspCandidate> best;
    for (int wi = 0; wi < static_cast<int>(wrinkles.size()); ++wi) {
        const Wrinkle& w = wrinkles[wi];
        for (const auto& t : w.triplets) {
            if (t.width_m > aperture_m) continue;
            const bool better =
                !best || t.height_m > best->utility
                || (t.height_m == best->utility
                    && w.score > wrinkles[best->wrinkle_index].score);
            if (!better) continue;
            GraspCandidate g;
            g.triplet = t;
            g.grasp_point = t.ridge_w;
            g.approach_dir = t.direction;
            g.utility = t.height_m;
            g.wrinkle_index = wi;
            best = g;
        }
    }
    return best;
}

Vec2 principal_direction(const Wrinkle& w) {
    if (w.points.size() < 2)
        throw DegenerateDirectionError("principal_direction: need at least 2 points");
    const Pca2 pca = pca_points(w.points);
    if (pca.eig_max - pca.eig_min < 1e-9)
        throw DegenerateDirectionError("principal_direction: isotropic point set");
    Vec2 d{std::cos(pca.angle), std::sin(pca.angle)};
    if (d.x < 0.0 || (std::abs(d.x) < 1e-12 && d.y < 0.0)) {
        d.x = -d.x;
        d.y = -d.y;
    }
    return d;
}

namespace {

// March from a wrinkle extreme outward along dir until the mask boundary.
// Fails (nullopt) when the march starts outside the mask is impossible --
// the caller checks that -- or when it runs off the image while still
// inside the mask (the garment edge is not in view).
std::optional<Pixel> march_to_boundary(const PixelMask& mask, Pixel start,
                                       double dx, double dy) {
    if (!mask.bits.in_bounds(start.x, start.y) || !mask.test(start.x, start.y))
        return std::nullopt;
    Pixel cur = start;
    const int limit = mask.width() + mask.height();
    for (int k = 1; k <= limit; ++k) {
        const int nx = static_cast<int>(std::lround(start.x + k * dx));
        const int ny = static_cast<int>(std::lround(start.y + k * dy));
        if (!mask.bits.in_bounds(nx, ny)) return std::nullopt;
        if (!mask.test(nx, ny)) return cur;  // last pixel inside the garment
        cur = {nx, ny};
    }
    return std::nullopt;
}

}  // namespace

FlattenPlan make_flatten_plan(const Wrinkle& w, int wrinkle_id,
                              const PixelMask& garment_mask,
                              const Calibration& calib, double flat_slack_m) {
    (void)flat_slack_m;
    if (garment_mask.count() == 0)
        throw PlanningError("make_flatten_plan: empty garment mask");
    if (w.points.empty())
        throw PlanningError("make_flatten_plan: wrinkle has no points");

    const Vec2 dir = principal_direction(w);

    // Extreme wrinkle points along the principal axis.
    double pmin = 1e300, pmax = -1e300;
    Pixel emin{}, emax{};
    for (const auto& p : w.points) {
        const double s = p.x * dir.x + p.y * dir.y;
        if (s < pmin) {
            pmin = s;
            emin = p;
        }
        if (s > pmax) {
            pmax = s;
            emax = p;
        }
    }
    if (!garment_mask.test(emin.x, emin.y) || !garment_mask.test(emax.x, emax.y))
        throw PlanningError("make_flatten_plan: wrinkle lies outside the garment mask");

    const auto ga = march_to_boundary(garment_mask, emax, dir.x, dir.y);
    const auto gb = march_to_boundary(garment_mask, emin, -dir.x, -dir.y);

    FlattenPlan plan;
    plan.wrinkle_id = wrinkle_id;
    plan.pull_dir_a = dir;
    plan.pull_dir_b = Vec2{-dir.x, -dir.y};
    plan.pull_dist_m = 0.5 * w.mean_slack_m;
    plan.dual_arm = ga.has_value() && gb.has_value();
    // Grasps sit on the cloth edge at table level.
    const Pixel pa = ga.value_or(emax);
    const Pixel pb = gb.value_or(emin);
    plan.grasp_a = WorldPoint{pa.x * calib.pitch, pa.y * calib.pitch, 0.0};
    plan.grasp_b = WorldPoint{pb.x * calib.pitch, pb.y * calib.pitch, 0.0};
    return plan;
}

bool is_flat(const std::vector<Wrinkle>& wrinkles, double flat_slack_m) {
    for (const auto& w : wrinkles)
        if (w.mean_slack_m >= flat_slack_m) return false;
    return true;
}

HeightField virtual_flatten_step(const HeightField& h, const FlattenPlan& plan,
                                 const std::vector<Wrinkle>& wrinkles) {
    if (plan.wrinkle_id < 0
        || plan.wrinkle_id >= static_cast<int>(wrinkles.size()))
        throw std::invalid_argument("virtual_flatten_step: plan references no detected wrinkle");
    const Wrinkle& w = wrinkles[plan.wrinkle_id];

    HeightField out = h;
    if (plan.pull_dist_m <= 0.0 || w.triplets.empty()) return out;
    const double slack = w.mean_slack_m;
    const double factor =
        slack > 1e-12 ? std::min(1.0, 2.0 * plan.pull_dist_m / slack) : 1.0;

    // Feathering the pull toward the section ends keeps the flattened band
    // slope-continuous; a hard cut reads as a fresh pair of ridges on the
    // next analysis pass.
    auto feather = [](double s) {
        const double edge = std::min(s, 1.0 - s) / 0.2;
        const double t = std::clamp(edge, 0.0, 1.0);
        return t * t * (3.0 - 2.0 * t);
    };

    // The pull tightens the whole cross-section, not just the part between
    // the inflection contours: extend each section down the bump tails
    // (descent-bounded) and attenuate toward the end-to-end chord.
    // Flattening only contour-to-contour leaves a mesa at contour height
    // whose shoulders read as new wrinkles.
    auto extend_end = [&](Pixel from, double dx, double dy, double max_steps) {
        Pixel cur = from;
        double z = h.z.at(from.x, from.y);
        for (int k = 1; k <= max_steps; ++k) {
            const int px = static_cast<int>(std::lround(from.x + k * dx));
            const int py = static_cast<int>(std::lround(from.y + k * dy));
            if (!h.z.in_bounds(px, py) || !h.is_valid(px, py)) break;
            const double zn = h.z.at(px, py);
            if (zn > z + 1e-4) break;  // climbing into a neighbouring bump
            cur = {px, py};
            z = zn;
        }
        return cur;
    };

    Grid<std::uint8_t> touched(h.width(), h.height(), 0);
    for (const auto& t : w.triplets) {
        const double sx = t.contour_px_2.x - t.contour_px_1.x;
        const double sy = t.contour_px_2.y - t.contour_px_1.y;
        const double slen = std::hypot(sx, sy);
        if (slen < 1.0) continue;
        const double ux = sx / slen, uy = sy / slen;
        const Pixel end_a =
            extend_end(t.contour_px_1, -ux, -uy, std::ceil(1.5 * slen));
        const Pixel end_b =
            extend_end(t.contour_px_2, ux, uy, std::ceil(1.5 * slen));

        const double ax = end_a.x, ay = end_a.y;
        const double bx = end_b.x, by = end_b.y;
        const double za = h.z.at(end_a.x, end_a.y);
        const double zb = h.z.at(end_b.x, end_b.y);
        const double len = std::hypot(bx - ax, by - ay);
        const int n = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
        for (int i = 0; i <= n; ++i) {
            const double s = static_cast<double>(i) / n;
            const int cx = static_cast<int>(std::lround(ax + s * (bx - ax)));
            const int cy = static_cast<int>(std::lround(ay + s * (by - ay)));
            const double chord = za + s * (zb - za);
            const double f = factor * feather(s);
            // 1-px band around the section line keeps the footprint dense.
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int px = cx + dx, py = cy + dy;
                    if (!out.z.in_bounds(px, py)) continue;
                    if (touched.at(px, py) || !out.is_valid(px, py)) continue;
                    touched.at(px, py) = 1;
                    const double z = out.z.at(px, py);
                    out.z.at(px, py) = z - f * (z - chord);
                }
            }
        }
    }
    return out;
}

}  // namespace crease
