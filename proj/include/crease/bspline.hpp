#pragma once

#include "crease/grid.hpp"

namespace crease {

struct PixelRect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
};

/// Uniform tensor-product B-spline surface over the pixel domain. Control
/// points sit on a grid with `spacing` pixels per cell; index i maps to
/// pixel coordinate i*spacing.
struct BSplineSurface {
    int degree = 3;
    int spacing = 8;
    int index0 = 0;        // control index of the first stored column/row
    Grid<double> control;  // heights, metres
    PixelRect domain;
    double pitch = 1e-3;

    double evaluate(double x_px, double y_px) const;
};

struct FitReport {
    double rmse = 0.0;          // metres, over masked pixels
    double max_residual = 0.0;  // metres
    std::size_t n_points = 0;
};

/// Least-squares fit of the masked height samples with a Tikhonov penalty
/// (weight lambda) on second differences of the control net. Throws
/// FitError when a control region has no data or the system cannot be
/// factorized.
std::pair<BSplineSurface, FitReport> fit_bspline(const HeightField& h,
                                                 const PixelMask& mask,
                                                 int spacing, int degree = 3,
                                                 double lambda = 1e-6);

/// Dense resampling of the surface; every output pixel is valid, so holes
/// in the original data are filled by the continuous fit.
HeightField evaluate_surface(const BSplineSurface& s, const PixelRect& domain);

namespace detail {
/// Cardinal B-spline of the given degree, support (-(degree+1)/2, (degree+1)/2).
double bspline_basis(double t, int degree);
}  // namespace detail

}  // namespace crease
