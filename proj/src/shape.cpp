#include "crease/shape_types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace crease {

std::string_view shape_type_name(ShapeType t) {
    switch (t) {
        case ShapeType::cup: return "cup";
        case ShapeType::trough: return "trough";
        case ShapeType::rut: return "rut";
        case ShapeType::saddle_rut: return "saddle_rut";
        case ShapeType::saddle: return "saddle";
        case ShapeType::saddle_ridge: return "saddle_ridge";
        case ShapeType::ridge: return "ridge";
        case ShapeType::dome: return "dome";
        case ShapeType::cap: return "cap";
        case ShapeType::flat: return "flat";
        case ShapeType::invalid: return "invalid";
    }
    return "invalid";
}

ShapeIndexMap shape_index(const CurvatureMaps& c) {
    const int w = c.k_max.width(), h = c.k_max.height();
    ShapeIndexMap out;
    out.values = ScalarField(w, h, Units::dimensionless);
    out.kind = Grid<std::uint8_t>(
        w, h, static_cast<std::uint8_t>(ShapePixelKind::regular));

    constexpr double kDegenerate = 1e-9;
    const double two_over_pi = 2.0 / std::numbers::pi;
    const long long n = static_cast<long long>(w) * h;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        if (!c.k_max.valid.values[i] || !c.k_min.valid.values[i]) continue;
        const double kmax = c.k_max.v.values[i];
        const double kmin = c.k_min.v.values[i];
        const double diff = kmin - kmax;
        const double sum = kmin + kmax;
        out.values.valid.values[i] = 1;
        if (std::abs(diff) < kDegenerate) {
            if (std::abs(sum) < kDegenerate) {
                out.kind.values[i] =
                    static_cast<std::uint8_t>(ShapePixelKind::flat);
                out.values.v.values[i] = 0.0;
            } else {
                // Umbilic: the index saturates to the sign opposite the
                // mean curvature (bumps go to +1).
                out.kind.values[i] =
                    static_cast<std::uint8_t>(ShapePixelKind::umbilic);
                out.values.v.values[i] = sum < 0.0 ? 1.0 : -1.0;
            }
            continue;
        }
        double s = two_over_pi * std::atan(sum / diff);
        s = std::clamp(s, -1.0, 1.0);
        out.values.v.values[i] = s;
    }
    return out;
}

ShapeTypeMap quantize_types(const ShapeIndexMap& s) {
    const int w = s.values.width(), h = s.values.height();
    ShapeTypeMap out(w, h);
    const long long n = static_cast<long long>(w) * h;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        if (!s.values.valid.values[i]) continue;
        const auto kind = static_cast<ShapePixelKind>(s.kind.values[i]);
        if (kind == ShapePixelKind::flat) {
            out.labels.values[i] = static_cast<std::uint8_t>(ShapeType::flat);
            continue;
        }
        const double v = s.values.v.values[i];
        int bin = static_cast<int>(std::floor((v + 1.0) * 4.5));
        bin = std::clamp(bin, 0, kShapeBinCount - 1);
        out.labels.values[i] = static_cast<std::uint8_t>(bin);
    }
    return out;
}

ShapeTypeMap majority_rank_filter(const ShapeTypeMap& t, int window) {
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument("majority_rank_filter: window must be odd and >= 3");
    const int w = t.width(), h = t.height();
    const int r = window / 2;
    constexpr int kLabels = 11;
    ShapeTypeMap out(w, h);

    // Sliding histogram per row: entering/leaving columns update the counts.
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        int counts[kLabels] = {0};
        const int y0 = std::max(0, y - r), y1 = std::min(h - 1, y + r);
        // Prime the histogram for x = 0.
        for (int yy = y0; yy <= y1; ++yy)
            for (int xx = 0; xx <= std::min(w - 1, r); ++xx)
                ++counts[t.labels.at(xx, yy)];
        for (int x = 0; x < w; ++x) {
            if (x > 0) {
                const int leave = x - 1 - r;
                if (leave >= 0)
                    for (int yy = y0; yy <= y1; ++yy)
                        --counts[t.labels.at(leave, yy)];
                const int enter = x + r;
                if (enter < w)
                    for (int yy = y0; yy <= y1; ++yy)
                        ++counts[t.labels.at(enter, yy)];
            }
            const ShapeType original = t.at(x, y);
            if (original == ShapeType::invalid) {
                out.set(x, y, ShapeType::invalid);
                continue;
            }
            int best = -1, best_count = 0;
            bool tie = false;
            for (int lbl = 0; lbl < kLabels; ++lbl) {
                if (lbl == static_cast<int>(ShapeType::invalid)) continue;
                const int cnt = counts[lbl];
                if (cnt > best_count) {
                    best = lbl;
                    best_count = cnt;
                    tie = false;
                } else if (cnt == best_count && cnt > 0) {
                    tie = true;
                }
            }
            if (best < 0 || tie)
                out.set(x, y, original);
            else
                out.set(x, y, static_cast<ShapeType>(best));
        }
    }
    return out;
}

namespace {

bool ridge_like(ShapeType t) {
    return t == ShapeType::ridge || t == ShapeType::dome || t == ShapeType::cap;
}

}  // namespace

TopologyMasks extract_topology(const ShapeTypeMap& t, const CurvatureMaps& c,
                               const ScalarField& lap,
                               double min_ridge_curvature) {
    const int w = t.width(), h = t.height();
    if (!c.k_min.v.same_shape(w, h) || !lap.v.same_shape(w, h))
        throw std::invalid_argument("extract_topology: input dimensions differ");

    TopologyMasks out;
    out.convex = PixelMask(w, h);
    out.ridge_points = PixelMask(w, h);
    out.contours = PixelMask(w, h);

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (is_convex_type(t.at(x, y))) out.convex.set(x, y);

    // |k_min| magnitude field for the non-maximum suppression.
    Grid<double> mag(w, h, 0.0);
    const long long n = static_cast<long long>(w) * h;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i)
        if (c.k_min.valid.values[i])
            mag.values[i] = std::abs(c.k_min.v.values[i]);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!ridge_like(t.at(x, y))) continue;
            if (!c.k_min.is_valid(x, y) || !c.across.is_valid(x, y)) continue;
            const double v = mag.at(x, y);
            if (v < min_ridge_curvature) continue;
            const double dir = c.across.v.at(x, y);
            const double dx = std::cos(dir), dy = std::sin(dir);
            const auto fwd =
                sample_bilinear(mag, c.k_min.valid, x + dx, y + dy);
            const auto bwd =
                sample_bilinear(mag, c.k_min.valid, x - dx, y - dy);
            if (!fwd || !bwd) continue;
            if (v > *fwd && v >= *bwd) out.ridge_points.set(x, y);
        }
    }

    // Zero crossings of the Laplacian between 4-neighbours; the pixel
    // nearer the zero carries the contour.
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!lap.is_valid(x, y)) continue;
            const double v = lap.v.at(x, y);
            const int nx[4] = {1, -1, 0, 0};
            const int ny[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                const int qx = x + nx[k], qy = y + ny[k];
                if (!lap.v.in_bounds(qx, qy) || !lap.is_valid(qx, qy)) continue;
                const double u = lap.v.at(qx, qy);
                if (v * u < 0.0 && std::abs(v) <= std::abs(u)) {
                    out.contours.set(x, y);
                    break;
                }
            }
        }
    }

    // Ridge points take precedence over contours where both fire.
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (out.ridge_points.test(x, y)) out.contours.set(x, y, false);

    auto [labels, count] = label_components(out.convex, Connectivity::eight);
    out.convex_labels = std::move(labels);
    (void)count;
    return out;
}

}  // namespace crease
