#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace crease {

struct Pixel {
    int x = 0;
    int y = 0;
    friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Point in world coordinates, metres.
struct WorldPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Pixel pitch and the reference plane used to turn sensor depth into height.
struct Calibration {
    double pitch = 1e-3;        // metres per pixel, isotropic
    double depth_offset = 1.0;  // metres; height = depth_offset - depth
};

/// Dense row-major 2D grid.
template <typename T>
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<T> values;

    Grid() = default;
    Grid(int w, int h, T fill = T{})
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {
        if (w < 1 || h < 1)
            throw std::invalid_argument("grid dimensions must be positive");
    }

    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width && y < height;
    }
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    T& at(int x, int y) { return values[index(x, y)]; }
    const T& at(int x, int y) const { return values[index(x, y)]; }
    std::size_t size() const { return values.size(); }
    bool same_shape(int w, int h) const { return width == w && height == h; }
};

using ValidityMask = Grid<std::uint8_t>;

/// Per-pixel boolean mask (garment segmentation, topology masks, ...).
struct PixelMask {
    Grid<std::uint8_t> bits;

    PixelMask() = default;
    PixelMask(int w, int h, bool fill = false)
        : bits(w, h, static_cast<std::uint8_t>(fill ? 1 : 0)) {}

    int width() const { return bits.width; }
    int height() const { return bits.height; }
    bool test(int x, int y) const { return bits.at(x, y) != 0; }
    void set(int x, int y, bool v = true) {
        bits.at(x, y) = static_cast<std::uint8_t>(v ? 1 : 0);
    }
    std::size_t count() const {
        std::size_t n = 0;
        for (auto b : bits.values) n += (b != 0);
        return n;
    }
};

/// Sensor depth map: distance from sensor in metres, larger = farther.
struct DepthMap {
    Grid<double> depth;
    ValidityMask valid;

    DepthMap() = default;
    DepthMap(int w, int h, double fill = 1.0)
        : depth(w, h, fill), valid(w, h, 1) {}
    int width() const { return depth.width; }
    int height() const { return depth.height; }
};

/// Canonical analysis substrate: heights in metres, wrinkle bumps are
/// local maxima. Every downstream stage assumes this orientation.
struct HeightField {
    Grid<double> z;
    ValidityMask valid;
    double pitch = 1e-3;  // metres per pixel

    HeightField() = default;
    HeightField(int w, int h, double p, double fill = 0.0)
        : z(w, h, fill), valid(w, h, 1), pitch(p) {
        if (p <= 0.0) throw std::invalid_argument("pitch must be positive");
    }
    int width() const { return z.width; }
    int height() const { return z.height; }
    bool is_valid(int x, int y) const { return valid.at(x, y) != 0; }
};

HeightField depth_to_height(const DepthMap& d, const Calibration& c);

WorldPoint pixel_to_world(const HeightField& h, Pixel px);

/// Chebyshev erosion: pixel stays set iff the whole (2r+1)^2 window is set.
PixelMask erode_mask(const PixelMask& m, int radius);

PixelMask dilate_mask(const PixelMask& m, int radius);

/// Bilinear sample of a grid restricted to valid pixels; nullopt when the
/// 2x2 support leaves the grid or touches an invalid pixel.
std::optional<double> sample_bilinear(const Grid<double>& g,
                                      const ValidityMask& valid, double x,
                                      double y);

enum class Connectivity { four, eight };

/// Connected-component labels for set pixels; -1 where unset.
/// Returns the label grid and the number of components.
std::pair<Grid<int>, int> label_components(const PixelMask& m,
                                           Connectivity conn);

}  // namespace crease
