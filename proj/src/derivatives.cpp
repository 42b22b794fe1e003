#include "crease/derivatives.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace crease {

namespace detail {

std::vector<double> gaussian_kernel(double sigma, int order) {
    if (sigma <= 0.0)
        throw std::invalid_argument("gaussian_kernel: sigma must be positive");
    if (order < 0 || order > 2)
        throw std::invalid_argument("gaussian_kernel: order must be 0..2");
    const int r = static_cast<int>(std::ceil(4.0 * sigma));
    const int n = 2 * r + 1;
    std::vector<double> g(n), k(n);
    for (int i = -r; i <= r; ++i)
        g[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));

    // Correlation taps: out(x) = sum_i k[i] h(x + i). Moment corrections make
    // the response exact on constants (order 0), affine (order 1) and
    // quadratic (order 2) inputs.
    if (order == 0) {
        double s = 0.0;
        for (double v : g) s += v;
        for (int i = 0; i < n; ++i) k[i] = g[i] / s;
    } else if (order == 1) {
        double m1 = 0.0;
        for (int i = -r; i <= r; ++i) m1 += i * (i * g[i + r]);
        for (int i = -r; i <= r; ++i) k[i + r] = i * g[i + r] / m1;
    } else {
        double s = 0.0, sg = 0.0;
        for (int i = -r; i <= r; ++i) s += (i * i - sigma * sigma) * g[i + r];
        for (double v : g) sg += v;
        for (int i = -r; i <= r; ++i)
            k[i + r] = (i * i - sigma * sigma) * g[i + r] - (s / sg) * g[i + r];
        double m2 = 0.0;
        for (int i = -r; i <= r; ++i) m2 += i * i * k[i + r];
        for (int i = 0; i < n; ++i) k[i] *= 2.0 / m2;
    }
    return k;
}

Grid<double> log_template(int window) {
    if (window < 3)
        throw std::invalid_argument("log_template: window must be >= 3");
    const double sigma = window / 6.0;
    // Odd windows sample at integer offsets; even windows at half-integer
    // offsets so the taps stay symmetric (the response sits half a pixel
    // off-centre).
    const bool even = window % 2 == 0;
    const double shift = even ? 0.5 : 0.0;
    const int lo = even ? -window / 2 : -(window - 1) / 2;
    Grid<double> k(window, window, 0.0);
    auto offset = [&](int i) { return lo + i + shift; };
    double sum = 0.0;
    for (int j = 0; j < window; ++j) {
        for (int i = 0; i < window; ++i) {
            const double x = offset(i), y = offset(j);
            const double r2 = x * x + y * y;
            const double v =
                (r2 - 2.0 * sigma * sigma) * std::exp(-0.5 * r2 / (sigma * sigma));
            k.at(i, j) = v;
            sum += v;
        }
    }
    // Zero DC, then scale so h = x^2 + y^2 (pixel units) responds with 4.
    const double dc = sum / (window * window);
    double m2 = 0.0;
    for (int j = 0; j < window; ++j)
        for (int i = 0; i < window; ++i) {
            k.at(i, j) -= dc;
            const double x = offset(i), y = offset(j);
            m2 += k.at(i, j) * (x * x + y * y);
        }
    for (double& v : k.values) v *= 4.0 / m2;
    return k;
}

}  // namespace detail

namespace {

struct Passes {
    Grid<double> v;
    ValidityMask valid;
};

// Horizontal correlation pass. Output pixel is valid only when the whole
// window lies inside the grid on valid input pixels.
Passes row_pass(const Grid<double>& in, const ValidityMask& valid,
                const std::vector<double>& k) {
    const int w = in.width, h = in.height;
    const int r = (static_cast<int>(k.size()) - 1) / 2;
    Passes out{Grid<double>(w, h, 0.0), ValidityMask(w, h, 0)};
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x - r < 0 || x + r >= w) continue;
            bool ok = true;
            for (int i = -r; i <= r && ok; ++i) ok = valid.at(x + i, y) != 0;
            if (!ok) continue;
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * in.at(x + i, y);
            out.v.at(x, y) = acc;
            out.valid.at(x, y) = 1;
        }
    }
    return out;
}

Passes col_pass(const Grid<double>& in, const ValidityMask& valid,
                const std::vector<double>& k) {
    const int w = in.width, h = in.height;
    const int r = (static_cast<int>(k.size()) - 1) / 2;
    Passes out{Grid<double>(w, h, 0.0), ValidityMask(w, h, 0)};
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        if (y - r < 0 || y + r >= h) continue;
        for (int x = 0; x < w; ++x) {
            bool ok = true;
            for (int i = -r; i <= r && ok; ++i) ok = valid.at(x, y + i) != 0;
            if (!ok) continue;
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * in.at(x, y + i);
            out.v.at(x, y) = acc;
            out.valid.at(x, y) = 1;
        }
    }
    return out;
}

Units units_for_order(int order) {
    switch (order) {
        case 0: return Units::metres;
        case 1: return Units::dimensionless;
        default: return Units::per_m;
    }
}

}  // namespace

ScalarField gaussian_derivative(const HeightField& h, double sigma, int dx,
                                int dy) {
    if (sigma <= 0.0)
        throw std::invalid_argument("gaussian_derivative: sigma must be positive");
    if (dx < 0 || dy < 0 || dx + dy > 2)
        throw std::invalid_argument("gaussian_derivative: order must satisfy dx+dy <= 2");

    const auto kx = detail::gaussian_kernel(sigma, dx);
    const auto ky = detail::gaussian_kernel(sigma, dy);
    Passes rows = row_pass(h.z, h.valid, kx);
    Passes full = col_pass(rows.v, rows.valid, ky);

    ScalarField out(h.width(), h.height(), units_for_order(dx + dy));
    const double scale = 1.0 / std::pow(h.pitch, dx + dy);
    const std::size_t n = out.v.size();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        if (full.valid.values[i]) {
            out.v.values[i] = full.v.values[i] * scale;
            out.valid.values[i] = 1;
        }
    }
    return out;
}

double fold_direction(double angle) {
    const double pi = std::numbers::pi;
    double a = std::fmod(angle, pi);
    if (a <= -pi / 2.0) a += pi;
    if (a > pi / 2.0) a -= pi;
    return a;
}

CurvatureMaps curvature_maps(const HeightField& h, double sigma) {
    const ScalarField fx = gaussian_derivative(h, sigma, 1, 0);
    const ScalarField fy = gaussian_derivative(h, sigma, 0, 1);
    const ScalarField fxx = gaussian_derivative(h, sigma, 2, 0);
    const ScalarField fyy = gaussian_derivative(h, sigma, 0, 2);
    const ScalarField fxy = gaussian_derivative(h, sigma, 1, 1);

    const int w = h.width(), ht = h.height();
    CurvatureMaps cm;
    cm.mean = ScalarField(w, ht, Units::per_m);
    cm.gaussian = ScalarField(w, ht, Units::per_m2);
    cm.k_max = ScalarField(w, ht, Units::per_m);
    cm.k_min = ScalarField(w, ht, Units::per_m);
    cm.across = ScalarField(w, ht, Units::radians);

    constexpr double kDiscriminantFloor = -1e-10;
    const long long n = static_cast<long long>(w) * ht;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
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
        if (disc < kDiscriminantFloor) continue;  // corrupted data
        disc = std::max(disc, 0.0);
        const double s = std::sqrt(disc);
        cm.mean.v.values[i] = mean;
        cm.gaussian.v.values[i] = gauss;
        cm.k_max.v.values[i] = mean + s;
        cm.k_min.v.values[i] = mean - s;
        cm.mean.valid.values[i] = cm.gaussian.valid.values[i] =
            cm.k_max.valid.values[i] = cm.k_min.valid.values[i] = 1;
        // Across-the-bump axis: eigendirection of the smaller Hessian
        // eigenvalue (perpendicular to the larger one's direction).
        cm.across.v.values[i] =
            fold_direction(0.5 * std::atan2(2.0 * gxy, gxx - gyy)
                           + std::numbers::pi / 2.0);
        cm.across.valid.values[i] = 1;
    }

    // Maximal-curvature direction from the gradient of k_max, estimated
    // at the same scale.
    HeightField kmax_field(w, ht, h.pitch);
    kmax_field.z = cm.k_max.v;
    kmax_field.valid = cm.k_max.valid;
    const ScalarField gx = gaussian_derivative(kmax_field, sigma, 1, 0);
    const ScalarField gy = gaussian_derivative(kmax_field, sigma, 0, 1);
    cm.theta = ScalarField(w, ht, Units::radians);
    constexpr double kThetaGradientFloor = 1e-8;  // 1/m per pixel
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        if (!gx.valid.values[i] || !gy.valid.values[i]) continue;
        const double dkx = gx.v.values[i] * h.pitch;  // 1/m per pixel
        const double dky = gy.v.values[i] * h.pitch;
        if (std::hypot(dkx, dky) < kThetaGradientFloor) continue;
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
    const int w = h.width(), ht = h.height();
#pragma omp parallel for schedule(static)
    for (int y = 0; y < ht; ++y) {
        if (y + lo < 0 || y + hi >= ht) continue;
        for (int x = 0; x < w; ++x) {
            if (x + lo < 0 || x + hi >= w) continue;
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

}  // namespace crease
