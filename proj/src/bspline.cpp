#include "crease/bspline.hpp"

#include "crease/errors.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace crease {

namespace detail {

double bspline_basis(double t, int degree) {
    if (degree == 0) return (t >= -0.5 && t < 0.5) ? 1.0 : 0.0;
    const double half = 0.5 * (degree + 1);
    if (t <= -half || t >= half) return 0.0;
    // Cox-de Boor on uniform knots, written as the convolution recursion.
    return ((t + half) * bspline_basis(t + 0.5, degree - 1)
            + (half - t) * bspline_basis(t - 0.5, degree - 1))
           / degree;
}

}  // namespace detail

namespace {

struct Support {
    int first;                   // first control index with nonzero basis
    std::vector<double> weights; // degree+1 entries
};

Support basis_row(double u, int degree) {
    const double half = 0.5 * (degree + 1);
    Support s;
    s.first = static_cast<int>(std::floor(u - half)) + 1;
    s.weights.resize(degree + 1);
    for (int k = 0; k <= degree; ++k)
        s.weights[k] = detail::bspline_basis(u - (s.first + k), degree);
    return s;
}

}  // namespace

double BSplineSurface::evaluate(double x_px, double y_px) const {
    const Support sx = basis_row(x_px / spacing, degree);
    const Support sy = basis_row(y_px / spacing, degree);
    double acc = 0.0;
    for (int b = 0; b <= degree; ++b) {
        const int j = sy.first + b - index0;
        if (j < 0 || j >= control.height || sy.weights[b] == 0.0) continue;
        double row = 0.0;
        for (int a = 0; a <= degree; ++a) {
            const int i = sx.first + a - index0;
            if (i < 0 || i >= control.width) continue;
            row += sx.weights[a] * control.at(i, j);
        }
        acc += sy.weights[b] * row;
    }
    return acc;
}

std::pair<BSplineSurface, FitReport> fit_bspline(const HeightField& h,
                                                 const PixelMask& mask,
                                                 int spacing, int degree,
                                                 double lambda) {
    if (spacing < 2)
        throw std::invalid_argument("fit_bspline: spacing must be >= 2");
    if (degree < 1 || degree > 5)
        throw std::invalid_argument("fit_bspline: degree must be in 1..5");
    if (lambda < 0.0)
        throw std::invalid_argument("fit_bspline: lambda must be >= 0");
    if (!mask.bits.same_shape(h.width(), h.height()))
        throw std::invalid_argument("fit_bspline: mask dimensions differ");

    const int w = h.width(), ht = h.height();
    const double half = 0.5 * (degree + 1);
    const double umax = static_cast<double>(w - 1) / spacing;
    const double vmax = static_cast<double>(ht - 1) / spacing;
    const int i0 = static_cast<int>(std::floor(-half)) + 1;
    const int j0 = i0;
    const int imax = static_cast<int>(std::floor(umax - half)) + 1 + degree;
    const int jmax = static_cast<int>(std::floor(vmax - half)) + 1 + degree;
    const int ncx = imax - i0 + 1;
    const int ncy = jmax - j0 + 1;
    if (ncx < degree + 1 || ncy < degree + 1)
        throw FitError("fit_bspline: control grid smaller than degree+1 per axis");
    const int ncp = ncx * ncy;

    const int nb = degree + 1;
    const int band = 2 * degree + 1;  // neighbour offsets per axis

    // Per-pixel basis supports along each axis are shared across the row /
    // column, so precompute them.
    std::vector<Support> col_support(w), row_support(ht);
    for (int x = 0; x < w; ++x) col_support[x] = basis_row(double(x) / spacing, degree);
    for (int y = 0; y < ht; ++y) row_support[y] = basis_row(double(y) / spacing, degree);

    // Normal matrix accumulated into a banded layout:
    // slot(p, di, dj) with |di|, |dj| <= degree.
    const std::size_t slots = static_cast<std::size_t>(ncp) * band * band;
    std::size_t n_points = 0;
    std::vector<double> ata(slots, 0.0);
    std::vector<double> rhs(ncp, 0.0);

#ifdef _OPENMP
    const int nthreads = omp_get_max_threads();
#else
    const int nthreads = 1;
#endif
    std::vector<std::vector<double>> ata_t(nthreads, std::vector<double>(slots, 0.0));
    std::vector<std::vector<double>> rhs_t(nthreads, std::vector<double>(ncp, 0.0));
    std::vector<std::size_t> count_t(nthreads, 0);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < ht; ++y) {
#ifdef _OPENMP
        const int tid = omp_get_thread_num();
#else
        const int tid = 0;
#endif
        auto& A = ata_t[tid];
        auto& b = rhs_t[tid];
        const Support& sy = row_support[y];
        for (int x = 0; x < w; ++x) {
            if (!mask.test(x, y) || !h.is_valid(x, y)) continue;
            ++count_t[tid];
            const Support& sx = col_support[x];
            const double z = h.z.at(x, y);
            double wgt[6 * 6];
            int idx[6 * 6];
            int m = 0;
            for (int bj = 0; bj < nb; ++bj) {
                for (int ai = 0; ai < nb; ++ai) {
                    const double wv = sx.weights[ai] * sy.weights[bj];
                    if (wv == 0.0) continue;
                    wgt[m] = wv;
                    idx[m] = (sy.first + bj - j0) * ncx + (sx.first + ai - i0);
                    ++m;
                }
            }
            for (int a = 0; a < m; ++a) {
                b[idx[a]] += wgt[a] * z;
                const int pi = idx[a] % ncx, pj = idx[a] / ncx;
                for (int c = 0; c < m; ++c) {
                    const int qi = idx[c] % ncx, qj = idx[c] / ncx;
                    const int di = qi - pi + degree, dj = qj - pj + degree;
                    A[(static_cast<std::size_t>(idx[a]) * band + dj) * band + di]
                        += wgt[a] * wgt[c];
                }
            }
        }
    }
    for (int t = 0; t < nthreads; ++t) {
        n_points += count_t[t];
        for (std::size_t s = 0; s < slots; ++s) ata[s] += ata_t[t][s];
        for (int p = 0; p < ncp; ++p) rhs[p] += rhs_t[t][p];
    }

    const std::size_t min_points =
        static_cast<std::size_t>((degree + 1)) * (degree + 1);
    if (n_points < min_points)
        throw FitError("fit_bspline: only " + std::to_string(n_points)
                       + " valid pixels; need at least "
                       + std::to_string(min_points));

    // A control point whose basis reaches the domain but sees no data marks
    // an underdetermined region (a hole wider than the basis support).
    for (int j = 0; j < ncy; ++j) {
        for (int i = 0; i < ncx; ++i) {
            const int p = j * ncx + i;
            const std::size_t diag =
                (static_cast<std::size_t>(p) * band + degree) * band + degree;
            if (ata[diag] > 0.0) continue;
            const int gi = i + i0, gj = j + j0;
            const bool reachable = gi > -half && gi < umax + half && gj > -half
                                   && gj < vmax + half;
            if (reachable && lambda == 0.0) {
                const int px0 = static_cast<int>(std::floor((gi - half) * spacing));
                const int py0 = static_cast<int>(std::floor((gj - half) * spacing));
                const int px1 = static_cast<int>(std::ceil((gi + half) * spacing));
                const int py1 = static_cast<int>(std::ceil((gj + half) * spacing));
                throw FitError("fit_bspline: no data in control region ["
                               + std::to_string(px0) + "," + std::to_string(py0)
                               + "]x[" + std::to_string(px1) + ","
                               + std::to_string(py1) + "] px");
            }
        }
    }

    // Second-difference penalty on the control net, both axes.
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(slots / 4);
    for (int j = 0; j < ncy; ++j) {
        for (int i = 0; i < ncx; ++i) {
            const int p = j * ncx + i;
            for (int dj = -degree; dj <= degree; ++dj) {
                for (int di = -degree; di <= degree; ++di) {
                    const int qi = i + di, qj = j + dj;
                    if (qi < 0 || qi >= ncx || qj < 0 || qj >= ncy) continue;
                    const double v =
                        ata[(static_cast<std::size_t>(p) * band + dj + degree)
                                * band
                            + di + degree];
                    if (v != 0.0)
                        trips.emplace_back(p, qj * ncx + qi, v);
                }
            }
        }
    }
    if (lambda > 0.0) {
        // Second differences normalized per control cell (a discrete second
        // derivative in pixel units), so the penalty is spacing-invariant
        // and leaves polynomial reproduction untouched at 1e-9 level.
        const double cell2 = static_cast<double>(spacing) * spacing;
        const double row_w = lambda / (cell2 * cell2);
        auto add_stencil = [&](int p0, int p1, int p2) {
            const int ps[3] = {p0, p1, p2};
            const double ws[3] = {1.0, -2.0, 1.0};
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 3; ++c)
                    trips.emplace_back(ps[a], ps[c], row_w * ws[a] * ws[c]);
        };
        for (int j = 0; j < ncy; ++j)
            for (int i = 1; i + 1 < ncx; ++i)
                add_stencil(j * ncx + i - 1, j * ncx + i, j * ncx + i + 1);
        for (int j = 1; j + 1 < ncy; ++j)
            for (int i = 0; i < ncx; ++i)
                add_stencil((j - 1) * ncx + i, j * ncx + i, (j + 1) * ncx + i);
    }

    Eigen::SparseMatrix<double> M(ncp, ncp);
    M.setFromTriplets(trips.begin(), trips.end());
    Eigen::VectorXd bvec = Eigen::Map<Eigen::VectorXd>(rhs.data(), ncp);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(M);
    if (solver.info() != Eigen::Success)
        throw FitError("fit_bspline: normal equations could not be factorized "
                       "(underdetermined control regions)");
    Eigen::VectorXd c = solver.solve(bvec);
    if (solver.info() != Eigen::Success)
        throw FitError("fit_bspline: solve failed");

    BSplineSurface surf;
    surf.degree = degree;
    surf.spacing = spacing;
    surf.index0 = i0;
    surf.control = Grid<double>(ncx, ncy, 0.0);
    for (int p = 0; p < ncp; ++p) surf.control.values[p] = c[p];
    surf.domain = PixelRect{0, 0, w, ht};
    surf.pitch = h.pitch;

    FitReport report;
    report.n_points = n_points;
    double sq = 0.0, mx = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : sq) reduction(max : mx)
    for (int y = 0; y < ht; ++y) {
        const Support& sy = row_support[y];
        for (int x = 0; x < w; ++x) {
            if (!mask.test(x, y) || !h.is_valid(x, y)) continue;
            double acc = 0.0;
            const Support& sx = col_support[x];
            for (int bj = 0; bj < nb; ++bj) {
                const int j = sy.first + bj - j0;
                if (j < 0 || j >= ncy) continue;
                double row_acc = 0.0;
                for (int ai = 0; ai < nb; ++ai) {
                    const int i = sx.first + ai - i0;
                    if (i < 0 || i >= ncx) continue;
                    row_acc += sx.weights[ai] * surf.control.at(i, j);
                }
                acc += sy.weights[bj] * row_acc;
            }
            const double r = std::abs(acc - h.z.at(x, y));
            sq += r * r;
            mx = std::max(mx, r);
        }
    }
    report.rmse = n_points > 0 ? std::sqrt(sq / n_points) : 0.0;
    report.max_residual = mx;
    return {std::move(surf), report};
}

HeightField evaluate_surface(const BSplineSurface& s, const PixelRect& domain) {
    if (domain.width < 1 || domain.height < 1)
        throw std::domain_error("evaluate_surface: empty domain");
    if (domain.x < s.domain.x || domain.y < s.domain.y
        || domain.x + domain.width > s.domain.x + s.domain.width
        || domain.y + domain.height > s.domain.y + s.domain.height)
        throw std::domain_error("evaluate_surface: domain outside fit region");

    HeightField out(domain.width, domain.height, s.pitch);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < domain.height; ++y)
        for (int x = 0; x < domain.width; ++x)
            out.z.at(x, y) = s.evaluate(domain.x + x, domain.y + y);
    return out;
}

}  // namespace crease
