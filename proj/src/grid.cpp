#include "crease/grid.hpp"

#include <algorithm>
#include <queue>

namespace crease {

HeightField depth_to_height(const DepthMap& d, const Calibration& c) {
    if (d.width() < 1 || d.height() < 1)
        throw std::invalid_argument("depth_to_height: empty depth map");
    if (c.pitch <= 0.0)
        throw std::invalid_argument("depth_to_height: pitch must be positive");

    HeightField h(d.width(), d.height(), c.pitch);
    const int n = d.width() * d.height();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        if (d.valid.values[i]) {
            h.z.values[i] = c.depth_offset - d.depth.values[i];
            h.valid.values[i] = 1;
        } else {
            h.z.values[i] = 0.0;
            h.valid.values[i] = 0;
        }
    }
    return h;
}

WorldPoint pixel_to_world(const HeightField& h, Pixel px) {
    if (!h.z.in_bounds(px.x, px.y))
        throw std::domain_error("pixel_to_world: pixel outside grid");
    if (!h.is_valid(px.x, px.y))
        throw std::domain_error("pixel_to_world: pixel is invalid");
    return WorldPoint{px.x * h.pitch, px.y * h.pitch, h.z.at(px.x, px.y)};
}

namespace {

// Separable Chebyshev min/max filter: horizontal pass then vertical pass.
PixelMask window_filter(const PixelMask& m, int radius, bool require_all) {
    if (radius < 0) throw std::invalid_argument("mask filter: negative radius");
    if (radius == 0) return m;
    const int w = m.width();
    const int h = m.height();
    PixelMask tmp(w, h);
    PixelMask out(w, h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool acc = require_all;
            for (int dx = -radius; dx <= radius; ++dx) {
                const int xx = x + dx;
                // Out-of-grid counts as unset.
                const bool v = xx >= 0 && xx < w && m.test(xx, y);
                acc = require_all ? (acc && v) : (acc || v);
            }
            tmp.set(x, y, acc);
        }
    }
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool acc = require_all;
            for (int dy = -radius; dy <= radius; ++dy) {
                const int yy = y + dy;
                const bool v = yy >= 0 && yy < h && tmp.test(x, yy);
                acc = require_all ? (acc && v) : (acc || v);
            }
            out.set(x, y, acc);
        }
    }
    return out;
}

}  // namespace

PixelMask erode_mask(const PixelMask& m, int radius) {
    return window_filter(m, radius, true);
}

PixelMask dilate_mask(const PixelMask& m, int radius) {
    return window_filter(m, radius, false);
}

std::optional<double> sample_bilinear(const Grid<double>& g,
                                      const ValidityMask& valid, double x,
                                      double y) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = x0 + 1;
    const int y1 = y0 + 1;
    // Exact grid points need only the one pixel.
    const double fx = x - x0;
    const double fy = y - y0;
    auto ok = [&](int px, int py) {
        return g.in_bounds(px, py) && valid.at(px, py) != 0;
    };
    if (fx == 0.0 && fy == 0.0) {
        if (!ok(x0, y0)) return std::nullopt;
        return g.at(x0, y0);
    }
    if (!ok(x0, y0) || !ok(x1, y0) || !ok(x0, y1) || !ok(x1, y1))
        return std::nullopt;
    const double v0 = g.at(x0, y0) * (1.0 - fx) + g.at(x1, y0) * fx;
    const double v1 = g.at(x0, y1) * (1.0 - fx) + g.at(x1, y1) * fx;
    return v0 * (1.0 - fy) + v1 * fy;
}

std::pair<Grid<int>, int> label_components(const PixelMask& m,
                                           Connectivity conn) {
    const int w = m.width();
    const int h = m.height();
    Grid<int> labels(w, h, -1);
    int next = 0;
    std::queue<Pixel> frontier;
    const int n8x[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    const int n8y[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    const int nn = conn == Connectivity::four ? 4 : 8;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.test(x, y) || labels.at(x, y) >= 0) continue;
            labels.at(x, y) = next;
            frontier.push({x, y});
            while (!frontier.empty()) {
                const Pixel p = frontier.front();
                frontier.pop();
                for (int k = 0; k < nn; ++k) {
                    const int qx = p.x + n8x[k];
                    const int qy = p.y + n8y[k];
                    if (!m.bits.in_bounds(qx, qy)) continue;
                    if (!m.test(qx, qy) || labels.at(qx, qy) >= 0) continue;
                    labels.at(qx, qy) = next;
                    frontier.push({qx, qy});
                }
            }
            ++next;
        }
    }
    return {std::move(labels), next};
}

}  // namespace crease
