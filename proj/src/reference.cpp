#include "crease/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace crease::serial {

ScalarField gaussian_derivative(const HeightField& h, double sigma, int dx,
                                int dy) {
    const auto kx = detail::gaussian_kernel(sigma, dx);
    const auto ky = detail::gaussian_kernel(sigma, dy);
    const int r = (static_cast<int>(kx.size()) - 1) / 2;
    const int w = h.width(), ht = h.height();

    Units units = Units::metres;
    if (dx + dy == 1) units = Units::dimensionless;
    if (dx + dy == 2) units = Units::per_m;
    ScalarField out(w, ht, units);
    const double scale = 1.0 / std::pow(h.pitch, dx + dy);

    for (int y = r; y < ht - r; ++y) {
        for (int x = r; x < w - r; ++x) {
            bool ok = true;
            double acc = 0.0;
            for (int j = -r; j <= r && ok; ++j) {
                for (int i = -r; i <= r; ++i) {
                    if (!h.is_valid(x + i, y + j)) {
                        ok = false;
                        break;
                    }
                    acc += kx[i + r] * ky[j + r] * h.z.at(x + i, y + j);
                }
            }
            if (!ok) continue;
            out.v.at(x, y) = acc * scale;
            out.valid.at(x, y) = 1;
        }
    }
    return out;
}

CurvatureMaps curvature_maps(const HeightField& h, double sigma) {
    const ScalarField fx = serial::gaussian_derivative(h, sigma, 1, 0);
    const ScalarField fy = serial::gaussian_derivative(h, sigma, 0, 1);
    const ScalarField fxx = serial::gaussian_derivative(h, sigma, 2, 0);
    const ScalarField fyy = serial::gaussian_derivative(h, sigma, 0, 2);
    const ScalarField fxy = serial::gaussian_derivative(h, sigma, 1, 1);

    const int w = h.width(), ht = h.height();
    CurvatureMaps cm;
    cm.mean = ScalarField(w, ht, Units::per_m);
    cm.gaussian = ScalarField(w, ht, Units::per_m2);
    cm.k_max = ScalarField(w, ht, Units::per_m);
    cm.k_min = ScalarField(w, ht, Units::per_m);
    cm.across = ScalarField(w, ht, Units::radians);

    const std::size_t n = cm.mean.v.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!fx.valid.values[i] || !fy.valid.values[i] || !fxx.valid.values[i]
            || !fyy.valid.values[i] || !fxy.valid.values[i])
            continue;
        const double gx = fx.v.values[i], gy = fy.v.values[i];
        const double gxx = fxx.v.values[i], gyy = fyy.v.values[i],
                     gxy = fxy.v.values[i];
        const double q = 1.0 + gx * gx + gy * gy;
        const double mean =
            ((1.0 + gy * gy) * gxx + (1.0 + gx * gx) * gyy - 2.0 * gx * gy * gxy)
            / (2.0 * std::pow(std::sqrt(q), 3));
        const double gauss = (gxx * gyy - gxy * gxy) / (q * q);
        double disc = mean * mean - gauss;
        if (disc < -1e-10) continue;
        disc = std::max(disc, 0.0);
        const double s = std::sqrt(disc);
        cm.mean.v.values[i] = mean;
        cm.gaussian.v.values[i] = gauss;
        cm.k_max.v.values[i] = mean + s;
        cm.k_min.v.values[i] = mean - s;
        cm.mean.valid.values[i] = cm.gaussian.valid.values[i] =
            cm.k_max.valid.values[i] = cm.k_min.valid.values[i] = 1;
        cm.across.v.values[i] =
            fold_direction(0.5 * std::atan2(2.0 * gxy, gxx - gyy)
                           + std::numbers::pi / 2.0);
        cm.across.valid.values[i] = 1;
    }

    HeightField kmax_field(w, ht, h.pitch);
    kmax_field.z = cm.k_max.v;
    kmax_field.valid = cm.k_max.valid;
    const ScalarField gx = serial::gaussian_derivative(kmax_field, sigma, 1, 0);
    const ScalarField gy = serial::gaussian_derivative(kmax_field, sigma, 0, 1);
    cm.theta = ScalarField(w, ht, Units::radians);
    for (std::size_t i = 0; i < n; ++i) {
        if (!gx.valid.values[i] || !gy.valid.values[i]) continue;
        const double dkx = gx.v.values[i] * h.pitch;
        const double dky = gy.v.values[i] * h.pitch;
        if (std::hypot(dkx, dky) < 1e-8) continue;
        cm.theta.v.values[i] = fold_direction(std::atan2(dky, dkx));
        cm.theta.valid.values[i] = 1;
    }
    return cm;
}

ScalarField laplacian_field(const HeightField& h, int window) {
    const Grid<double> k = detail::log_template(window);
    const bool even = window % 2 == 0;
    const int lo = even ? -window / 2 : -(window - 1) / 2;
    const int hi = lo + window - 1;

    ScalarField out(h.width(), h.height(), Units::per_m);
    const double scale = 1.0 / (h.pitch * h.pitch);
    for (int y = 0; y < h.height(); ++y) {
        if (y + lo < 0 || y + hi >= h.height()) continue;
        for (int x = 0; x < h.width(); ++x) {
            if (x + lo < 0 || x + hi >= h.width()) continue;
            bool ok = true;
            double acc = 0.0;
            for (int j = lo; j <= hi && ok; ++j) {
                for (int i = lo; i <= hi; ++i) {
                    if (!h.is_valid(x + i, y + j)) {
                        ok = false;
                        break;
                    }
                    acc += k.at(i - lo, j - lo) * h.z.at(x + i, y + j);
                }
            }
            if (!ok) continue;
            out.v.at(x, y) = acc * scale;
            out.valid.at(x, y) = 1;
        }
    }
    return out;
}

ShapeTypeMap majority_rank_filter(const ShapeTypeMap& t, int window) {
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument("majority_rank_filter: window must be odd and >= 3");
    const int w = t.width(), h = t.height();
    const int r = window / 2;
    ShapeTypeMap out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const ShapeType original = t.at(x, y);
            if (original == ShapeType::invalid) {
                out.set(x, y, ShapeType::invalid);
                continue;
            }
            int counts[11] = {0};
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const int xx = x + dx, yy = y + dy;
                    if (!t.labels.in_bounds(xx, yy)) continue;
                    ++counts[t.labels.at(xx, yy)];
                }
            }
            int best = -1, best_count = 0;
            bool tie = false;
            for (int lbl = 0; lbl < 11; ++lbl) {
                if (lbl == static_cast<int>(ShapeType::invalid)) continue;
                if (counts[lbl] > best_count) {
                    best = lbl;
                    best_count = counts[lbl];
                    tie = false;
                } else if (counts[lbl] == best_count && counts[lbl] > 0) {
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

}  // namespace crease::serial
