#pragma once

#include "crease/derivatives.hpp"
#include "crease/shape_types.hpp"

namespace crease::serial {

/// Single-threaded reference kernels. These favour the most direct
/// formulation (full 2D correlation, per-pixel recount) over speed and are
/// kept as the comparison baseline for the parallel implementations, both
/// in the test suite and in the benchmark tool.

/// Direct (non-separable) 2D correlation with the tensor-product
/// Gaussian-derivative kernel.
ScalarField gaussian_derivative(const HeightField& h, double sigma, int dx,
                                int dy);

CurvatureMaps curvature_maps(const HeightField& h, double sigma);

ScalarField laplacian_field(const HeightField& h, int window);

/// Recounts the full window histogram at every pixel.
ShapeTypeMap majority_rank_filter(const ShapeTypeMap& t, int window);

}  // namespace crease::serial
