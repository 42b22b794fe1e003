#pragma once

#include "crease/grid.hpp"
#include "crease/shape_types.hpp"
#include "crease/wrinkles.hpp"

#include <string>

namespace crease {

struct UnsupportedFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// PFM, 32-bit float grayscale, negative scale (little-endian), metres.
/// Scanlines are stored bottom-to-top per the format convention.
void write_pfm(const std::string& path, const Grid<double>& g);
Grid<double> read_pfm(const std::string& path);

/// 16-bit big-endian binary PGM, values in millimetres; 0 encodes a hole.
void write_pgm16(const std::string& path, const Grid<double>& metres,
                 const ValidityMask& valid);
std::pair<Grid<double>, ValidityMask> read_pgm16(const std::string& path);

/// 8-bit binary PGM mask: nonzero = set.
void write_pgm8(const std::string& path, const PixelMask& mask);
PixelMask read_pgm8(const std::string& path);

/// Row-major comma-separated metres; empty/nan cells are holes.
void write_csv(const std::string& path, const Grid<double>& metres,
               const ValidityMask& valid);
std::pair<Grid<double>, ValidityMask> read_csv(const std::string& path);

/// Depth ingestion dispatched on the file extension (.pfm, .pgm, .csv).
/// Non-finite and non-positive depths are marked invalid.
DepthMap load_depth(const std::string& path);
PixelMask load_mask(const std::string& path);

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // 3 bytes per pixel, row-major

    RgbImage() = default;
    RgbImage(int w, int h)
        : width(w), height(h),
          rgb(static_cast<std::size_t>(w) * h * 3, 0) {}
    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        rgb[i] = r;
        rgb[i + 1] = g;
        rgb[i + 2] = b;
    }
};

void write_ppm(const std::string& path, const RgbImage& img);

/// Fixed overlay palette (see README); grayscale base is the height field
/// normalized over its valid range.
RgbImage render_height(const HeightField& h);
RgbImage render_shape_types(const ShapeTypeMap& t);
RgbImage render_topology(const HeightField& h, const TopologyMasks& topo);
RgbImage render_triplets(const HeightField& h,
                         const std::vector<Wrinkle>& wrinkles);
RgbImage render_wrinkles(const HeightField& h,
                         const std::vector<Wrinkle>& wrinkles);

}  // namespace crease
