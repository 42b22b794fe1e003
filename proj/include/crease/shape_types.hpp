#pragma once

#include "crease/derivatives.hpp"
#include "crease/grid.hpp"

#include <array>
#include <string_view>

namespace crease {

/// Koenderink surface types over nine uniform shape-index intervals, plus
/// the degenerate labels.
enum class ShapeType : std::uint8_t {
    cup = 0,
    trough,
    rut,
    saddle_rut,
    saddle,
    saddle_ridge,
    ridge,
    dome,
    cap,
    flat,
    invalid,
};

constexpr int kShapeBinCount = 9;

std::string_view shape_type_name(ShapeType t);

inline bool is_convex_type(ShapeType t) {
    return t == ShapeType::saddle_ridge || t == ShapeType::ridge
           || t == ShapeType::dome || t == ShapeType::cap;
}

enum class ShapePixelKind : std::uint8_t { regular, umbilic, flat };

/// Continuous shape classification in [-1, 1] plus the degeneracy flag of
/// each pixel (the 0/0 cases of the index formula).
struct ShapeIndexMap {
    ScalarField values;            // dimensionless, in [-1, 1]
    Grid<std::uint8_t> kind;       // ShapePixelKind
    ShapePixelKind kind_at(int x, int y) const {
        return static_cast<ShapePixelKind>(kind.at(x, y));
    }
};

struct ShapeTypeMap {
    Grid<std::uint8_t> labels;     // ShapeType
    ShapeTypeMap() = default;
    ShapeTypeMap(int w, int h)
        : labels(w, h, static_cast<std::uint8_t>(ShapeType::invalid)) {}
    int width() const { return labels.width; }
    int height() const { return labels.height; }
    ShapeType at(int x, int y) const {
        return static_cast<ShapeType>(labels.at(x, y));
    }
    void set(int x, int y, ShapeType t) {
        labels.at(x, y) = static_cast<std::uint8_t>(t);
    }
};

/// Ridge points, wrinkle contours and the convex partition. Convex
/// component labels are carried along so walkers can test region
/// membership without relabelling.
struct TopologyMasks {
    PixelMask ridge_points;
    PixelMask contours;
    PixelMask convex;
    Grid<int> convex_labels;  // component id per convex pixel, -1 elsewhere
};

ShapeIndexMap shape_index(const CurvatureMaps& c);

ShapeTypeMap quantize_types(const ShapeIndexMap& s);

/// Modal label over an odd window; ties keep the original label and
/// invalid pixels neither vote nor change.
ShapeTypeMap majority_rank_filter(const ShapeTypeMap& t, int window);

/// Ridge points by 1D non-maximum suppression of |k_min| along the
/// across-the-bump axis; contours by Laplacian zero crossings. Ridge
/// seeds need |k_min| >= min_ridge_curvature (1/m) so sensor-scale
/// roughness does not generate phantom crests.
TopologyMasks extract_topology(const ShapeTypeMap& t, const CurvatureMaps& c,
                               const ScalarField& lap,
                               double min_ridge_curvature);

}  // namespace crease
