#pragma once

#include "crease/grid.hpp"

namespace crease {

enum class Units { dimensionless, per_m, per_m2, metres, radians };

/// Scalar-valued field derived from a HeightField, with unit tagging and
/// per-pixel validity (border bands and hole shadows are invalid).
struct ScalarField {
    Grid<double> v;
    ValidityMask valid;
    Units units = Units::dimensionless;

    ScalarField() = default;
    ScalarField(int w, int h, Units u)
        : v(w, h, 0.0), valid(w, h, 0), units(u) {}
    int width() const { return v.width; }
    int height() const { return v.height; }
    bool is_valid(int x, int y) const { return valid.at(x, y) != 0; }
};

/// Mean, Gaussian and principal curvatures plus direction fields.
/// `theta` is the maximal-curvature direction estimated from the gradient
/// of the k_max field; `across` is the principal direction of the most
/// negative normal curvature (the across-the-bump axis) from the Hessian,
/// defined even where the k_max gradient vanishes.
struct CurvatureMaps {
    ScalarField mean;      // 1/m
    ScalarField gaussian;  // 1/m^2
    ScalarField k_max;     // 1/m
    ScalarField k_min;     // 1/m
    ScalarField theta;     // radians in (-pi/2, pi/2]
    ScalarField across;    // radians in (-pi/2, pi/2]
};

/// Separable Gaussian-derivative estimate of d^(dx+dy) h / dx^dx dy^dy in
/// metric units (pitch applied per derivative order). Kernels are sampled
/// at radius ceil(4*sigma) and moment-corrected so constants, affine and
/// quadratic inputs are differentiated exactly.
ScalarField gaussian_derivative(const HeightField& h, double sigma, int dx,
                                int dy);

CurvatureMaps curvature_maps(const HeightField& h, double sigma);

/// f_xx + f_yy from a Laplacian-of-Gaussian template of the given support
/// (sigma = window/6). Even windows sample the template at half-integer
/// offsets, which shifts the response by half a pixel.
ScalarField laplacian_field(const HeightField& h, int window);

/// Fold an angle into (-pi/2, pi/2].
double fold_direction(double angle);

namespace detail {
/// Moment-corrected 1D Gaussian-derivative taps for correlation, pixel units.
std::vector<double> gaussian_kernel(double sigma, int order);
/// LoG template taps for the given support, normalized so a unit-curvature
/// paraboloid (in pixel units) responds with exactly 4.
Grid<double> log_template(int window);
}  // namespace detail

}  // namespace crease
