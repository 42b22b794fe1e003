#include "crease/triplets.hpp"

#include "crease/errors.hpp"

#include <algorithm>
#include <cmath>

namespace crease {

TripletMetrics triplet_metrics(const WorldPoint& ridge, const WorldPoint& c1,
                               const WorldPoint& c2) {
    auto dist = [](const WorldPoint& p, const WorldPoint& q) {
        return std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y)
                         + (p.z - q.z) * (p.z - q.z));
    };
    const double a = dist(ridge, c1);
    const double b = dist(ridge, c2);
    const double c = dist(c1, c2);
    if (c < 1e-12)
        throw DegenerateTripletError("triplet_metrics: coincident contour points");
    const double scale = std::max({a, b, c});
    if (a + b < c - 1e-12 * scale || a + c < b - 1e-12 * scale
        || b + c < a - 1e-12 * scale)
        throw DegenerateTripletError("triplet_metrics: triangle inequality violated");
    const double d = 0.5 * (a + b + c);
    const double area2 = d * (d - a) * (d - b) * (d - c);
    const double area = std::sqrt(std::max(0.0, area2));
    return TripletMetrics{2.0 * area / c, c};
}

namespace {

// The walk succeeds within one pixel of a contour; the recorded hit snaps
// to the true contour pixel so widths and slacks are not biased short.
std::optional<Pixel> snap_to_contour(const PixelMask& contours, int x, int y) {
    std::optional<Pixel> best;
    int best_d2 = 99;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            const int qx = x + dx, qy = y + dy;
            if (!contours.bits.in_bounds(qx, qy) || !contours.test(qx, qy))
                continue;
            const int d2 = dx * dx + dy * dy;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = Pixel{qx, qy};
            }
        }
    return best;
}

struct WalkResult {
    Pixel hit;
};

std::optional<WalkResult> walk_ray(Pixel start, double dx, double dy,
                                   const TopologyMasks& topo,
                                   const HeightField& h, int region,
                                   const WalkParams& params) {
    double prev =
        sample_bilinear(h.z, h.valid, start.x, start.y).value_or(0.0);
    for (int k = 1; k <= params.max_steps; ++k) {
        const double fx = start.x + k * dx;
        const double fy = start.y + k * dy;
        const int px = static_cast<int>(std::lround(fx));
        const int py = static_cast<int>(std::lround(fy));
        if (!h.z.in_bounds(px, py)) return std::nullopt;
        const auto z = sample_bilinear(h.z, h.valid, fx, fy);
        if (!z) return std::nullopt;
        if (const auto hit = snap_to_contour(topo.contours, px, py);
            hit && h.is_valid(hit->x, hit->y))
            return WalkResult{*hit};
        if (*z > prev + params.gravity_tol_m) return std::nullopt;
        if (topo.convex_labels.at(px, py) != region) return std::nullopt;
        prev = *z;
    }
    return std::nullopt;
}

}  // namespace

std::optional<Triplet> match_triplet(Pixel ridge_px, double direction,
                                     const TopologyMasks& topo,
                                     const ShapeTypeMap& types,
                                     const HeightField& h,
                                     const WalkParams& params) {
    (void)types;
    if (!topo.ridge_points.bits.in_bounds(ridge_px.x, ridge_px.y)
        || !topo.ridge_points.test(ridge_px.x, ridge_px.y))
        throw std::domain_error("match_triplet: start is not a ridge point");
    if (!std::isfinite(direction))
        throw std::domain_error("match_triplet: direction is not finite");

    const int region = topo.convex_labels.at(ridge_px.x, ridge_px.y);
    const double dx = std::cos(direction), dy = std::sin(direction);
    const auto side1 = walk_ray(ridge_px, dx, dy, topo, h, region, params);
    if (!side1) return std::nullopt;
    const auto side2 = walk_ray(ridge_px, -dx, -dy, topo, h, region, params);
    if (!side2) return std::nullopt;

    Triplet t;
    t.ridge_px = ridge_px;
    t.contour_px_1 = side1->hit;
    t.contour_px_2 = side2->hit;
    t.ridge_w = pixel_to_world(h, t.ridge_px);
    t.contour_w1 = pixel_to_world(h, t.contour_px_1);
    t.contour_w2 = pixel_to_world(h, t.contour_px_2);
    t.direction = direction;
    const TripletMetrics m = triplet_metrics(t.ridge_w, t.contour_w1, t.contour_w2);
    t.height_m = m.height_m;
    t.width_m = m.width_m;
    t.slack_m = geodesic_slack(t, h);
    return t;
}

double geodesic_slack(const Triplet& t, const HeightField& h) {
    const double ax = t.contour_px_1.x, ay = t.contour_px_1.y;
    const double bx = t.contour_px_2.x, by = t.contour_px_2.y;
    const double len_px = std::hypot(bx - ax, by - ay);
    const int n = std::max(2, static_cast<int>(std::ceil(len_px * 2.0)));

    double arc = 0.0;
    double prev = t.contour_w1.z;
    bool complete = true;
    const double ds = len_px / n * h.pitch;
    for (int i = 1; i <= n; ++i) {
        const double s = static_cast<double>(i) / n;
        const auto z =
            sample_bilinear(h.z, h.valid, ax + s * (bx - ax), ay + s * (by - ay));
        if (!z) {
            complete = false;
            break;
        }
        arc += std::hypot(ds, *z - prev);
        prev = *z;
    }
    if (!complete) return 0.0;
    const double chord = std::sqrt(
        (t.contour_w1.x - t.contour_w2.x) * (t.contour_w1.x - t.contour_w2.x)
        + (t.contour_w1.y - t.contour_w2.y) * (t.contour_w1.y - t.contour_w2.y)
        + (t.contour_w1.z - t.contour_w2.z) * (t.contour_w1.z - t.contour_w2.z));
    return std::max(0.0, arc - chord);
}

double search_direction(const CurvatureMaps& c, Pixel px) {
    if (c.theta.is_valid(px.x, px.y)) return c.theta.v.at(px.x, px.y);
    if (c.across.is_valid(px.x, px.y)) return c.across.v.at(px.x, px.y);
    throw std::domain_error("search_direction: no direction defined at pixel");
}

}  // namespace crease
