#include "crease/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace crease {

namespace {

std::string lower_ext(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return {};
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UnsupportedFormatError("cannot open: " + path);
    return in;
}

float byteswap_f32(float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    u = ((u & 0xff000000u) >> 24) | ((u & 0x00ff0000u) >> 8)
        | ((u & 0x0000ff00u) << 8) | ((u & 0x000000ffu) << 24);
    std::memcpy(&v, &u, 4);
    return v;
}

// Reads one whitespace-delimited token, skipping comments.
std::string next_token(std::istream& in) {
    std::string tok;
    in >> tok;
    while (!tok.empty() && tok[0] == '#') {
        std::string line;
        std::getline(in, line);
        in >> tok;
    }
    return tok;
}

}  // namespace

void write_pfm(const std::string& path, const Grid<double>& g) {
    auto out = open_out(path);
    out << "Pf\n" << g.width << " " << g.height << "\n-1.0\n";
    std::vector<float> row(g.width);
    for (int y = g.height - 1; y >= 0; --y) {
        for (int x = 0; x < g.width; ++x)
            row[x] = static_cast<float>(g.at(x, y));
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
}

Grid<double> read_pfm(const std::string& path) {
    auto in = open_in(path);
    const std::string magic = next_token(in);
    if (magic != "Pf")
        throw UnsupportedFormatError("not a grayscale PFM: " + path);
    const int w = std::stoi(next_token(in));
    const int h = std::stoi(next_token(in));
    const double scale = std::stod(next_token(in));
    in.get();  // single whitespace byte before the raster
    if (w < 1 || h < 1)
        throw UnsupportedFormatError("bad PFM dimensions: " + path);

    const bool file_little = scale < 0.0;
    const bool host_little = std::endian::native == std::endian::little;
    Grid<double> g(w, h, 0.0);
    std::vector<float> row(w);
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (!in) throw UnsupportedFormatError("truncated PFM: " + path);
        for (int x = 0; x < w; ++x) {
            float v = row[x];
            if (file_little != host_little) v = byteswap_f32(v);
            g.at(x, y) = v;
        }
    }
    return g;
}

void write_pgm16(const std::string& path, const Grid<double>& metres,
                 const ValidityMask& valid) {
    auto out = open_out(path);
    out << "P5\n" << metres.width << " " << metres.height << "\n65535\n";
    for (int y = 0; y < metres.height; ++y) {
        for (int x = 0; x < metres.width; ++x) {
            unsigned v = 0;
            if (valid.at(x, y)) {
                const double mm = metres.at(x, y) * 1000.0;
                v = static_cast<unsigned>(
                    std::clamp(std::llround(mm), 1ll, 65535ll));
            }
            const unsigned char hi = static_cast<unsigned char>(v >> 8);
            const unsigned char lo = static_cast<unsigned char>(v & 0xff);
            out.put(static_cast<char>(hi));
            out.put(static_cast<char>(lo));
        }
    }
}

std::pair<Grid<double>, ValidityMask> read_pgm16(const std::string& path) {
    auto in = open_in(path);
    if (next_token(in) != "P5")
        throw UnsupportedFormatError("not a binary PGM: " + path);
    const int w = std::stoi(next_token(in));
    const int h = std::stoi(next_token(in));
    const int maxval = std::stoi(next_token(in));
    in.get();
    if (maxval != 65535)
        throw UnsupportedFormatError("expected 16-bit PGM (maxval 65535): " + path);
    Grid<double> g(w, h, 0.0);
    ValidityMask valid(w, h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int hi = in.get(), lo = in.get();
            if (hi < 0 || lo < 0)
                throw UnsupportedFormatError("truncated PGM: " + path);
            const unsigned v = (static_cast<unsigned>(hi) << 8) | lo;
            if (v > 0) {
                g.at(x, y) = v / 1000.0;
                valid.at(x, y) = 1;
            }
        }
    }
    return {std::move(g), std::move(valid)};
}

void write_pgm8(const std::string& path, const PixelMask& mask) {
    auto out = open_out(path);
    out << "P5\n" << mask.width() << " " << mask.height() << "\n255\n";
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            out.put(mask.test(x, y) ? char(255) : char(0));
}

PixelMask read_pgm8(const std::string& path) {
    auto in = open_in(path);
    if (next_token(in) != "P5")
        throw UnsupportedFormatError("not a binary PGM: " + path);
    const int w = std::stoi(next_token(in));
    const int h = std::stoi(next_token(in));
    const int maxval = std::stoi(next_token(in));
    in.get();
    if (maxval != 255)
        throw UnsupportedFormatError("expected 8-bit PGM mask (maxval 255): " + path);
    PixelMask m(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int v = in.get();
            if (v < 0) throw UnsupportedFormatError("truncated PGM: " + path);
            m.set(x, y, v > 0);
        }
    }
    return m;
}

void write_csv(const std::string& path, const Grid<double>& metres,
               const ValidityMask& valid) {
    auto out = open_out(path);
    out.precision(17);
    for (int y = 0; y < metres.height; ++y) {
        for (int x = 0; x < metres.width; ++x) {
            if (x) out << ",";
            if (valid.at(x, y)) out << metres.at(x, y);
        }
        out << "\n";
    }
}

std::pair<Grid<double>, ValidityMask> read_csv(const std::string& path) {
    auto in = open_in(path);
    std::vector<std::vector<std::pair<double, bool>>> rows;
    std::string line;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        if (line.empty() && in.eof()) break;
        std::vector<std::pair<double, bool>> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            if (b == std::string::npos) {
                row.emplace_back(0.0, false);
                continue;
            }
            try {
                const double v = std::stod(cell);
                row.emplace_back(v, std::isfinite(v));
            } catch (...) {
                row.emplace_back(0.0, false);
            }
        }
        if (!row.empty()) {
            width = std::max(width, row.size());
            rows.push_back(std::move(row));
        }
    }
    if (rows.empty() || width == 0)
        throw UnsupportedFormatError("empty CSV: " + path);
    Grid<double> g(static_cast<int>(width), static_cast<int>(rows.size()), 0.0);
    ValidityMask valid(g.width, g.height, 0);
    for (int y = 0; y < g.height; ++y) {
        for (std::size_t x = 0; x < rows[y].size(); ++x) {
            g.at(static_cast<int>(x), y) = rows[y][x].first;
            valid.at(static_cast<int>(x), y) = rows[y][x].second ? 1 : 0;
        }
    }
    return {std::move(g), std::move(valid)};
}

DepthMap load_depth(const std::string& path) {
    const std::string ext = lower_ext(path);
    DepthMap d;
    if (ext == "pfm") {
        d.depth = read_pfm(path);
        d.valid = ValidityMask(d.depth.width, d.depth.height, 0);
        for (std::size_t i = 0; i < d.depth.size(); ++i)
            d.valid.values[i] =
                std::isfinite(d.depth.values[i]) && d.depth.values[i] > 0.0;
    } else if (ext == "pgm") {
        auto [g, v] = read_pgm16(path);
        d.depth = std::move(g);
        d.valid = std::move(v);
    } else if (ext == "csv") {
        auto [g, v] = read_csv(path);
        d.depth = std::move(g);
        d.valid = std::move(v);
        for (std::size_t i = 0; i < d.depth.size(); ++i)
            if (d.depth.values[i] <= 0.0) d.valid.values[i] = 0;
    } else {
        throw UnsupportedFormatError("unsupported depth format: " + path);
    }
    return d;
}

PixelMask load_mask(const std::string& path) {
    if (lower_ext(path) != "pgm")
        throw UnsupportedFormatError("unsupported mask format: " + path);
    return read_pgm8(path);
}

void write_ppm(const std::string& path, const RgbImage& img) {
    auto out = open_out(path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()),
              static_cast<std::streamsize>(img.rgb.size()));
}

namespace {

// One colour per shape type; held fixed so overlay bytes are stable.
struct Rgb {
    std::uint8_t r, g, b;
};
constexpr Rgb kShapePalette[11] = {
    {0, 0, 128},     // cup
    {0, 64, 192},    // trough
    {0, 128, 255},   // rut
    {64, 192, 255},  // saddle_rut
    {200, 200, 200}, // saddle
    {255, 224, 128}, // saddle_ridge
    {255, 192, 0},   // ridge
    {255, 96, 0},    // dome
    {192, 0, 0},     // cap
    {255, 255, 255}, // flat
    {32, 32, 32},    // invalid
};

constexpr Rgb kRankColors[6] = {
    {255, 64, 64},  {64, 255, 64},  {64, 128, 255},
    {255, 255, 64}, {255, 64, 255}, {64, 255, 255},
};

// 3x5 digit glyphs, row-major bits.
constexpr std::uint16_t kDigits[10] = {
    0b111101101101111, 0b010110010010111, 0b111001111100111, 0b111001111001111,
    0b101101111001001, 0b111100111001111, 0b111100111101111, 0b111001010010010,
    0b111101111101111, 0b111101111001111,
};

void draw_digit(RgbImage& img, int digit, int x0, int y0, Rgb c) {
    for (int row = 0; row < 5; ++row) {
        for (int col = 0; col < 3; ++col) {
            const int bit = 14 - (row * 3 + col);
            if (!((kDigits[digit] >> bit) & 1)) continue;
            const int x = x0 + col, y = y0 + row;
            if (x >= 0 && y >= 0 && x < img.width && y < img.height)
                img.set(x, y, c.r, c.g, c.b);
        }
    }
}

void draw_number(RgbImage& img, int value, int x0, int y0, Rgb c) {
    const std::string s = std::to_string(value);
    for (std::size_t i = 0; i < s.size(); ++i)
        draw_digit(img, s[i] - '0', x0 + static_cast<int>(i) * 4, y0, c);
}

void draw_line(RgbImage& img, Pixel a, Pixel b, Rgb c) {
    const int steps = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), 1});
    for (int i = 0; i <= steps; ++i) {
        const int x = a.x + (b.x - a.x) * i / steps;
        const int y = a.y + (b.y - a.y) * i / steps;
        if (x >= 0 && y >= 0 && x < img.width && y < img.height)
            img.set(x, y, c.r, c.g, c.b);
    }
}

}  // namespace

RgbImage render_height(const HeightField& h) {
    RgbImage img(h.width(), h.height());
    double lo = 1e300, hi = -1e300;
    for (int y = 0; y < h.height(); ++y)
        for (int x = 0; x < h.width(); ++x)
            if (h.is_valid(x, y)) {
                lo = std::min(lo, h.z.at(x, y));
                hi = std::max(hi, h.z.at(x, y));
            }
    const double span = hi > lo ? hi - lo : 1.0;
    for (int y = 0; y < h.height(); ++y) {
        for (int x = 0; x < h.width(); ++x) {
            if (!h.is_valid(x, y)) {
                img.set(x, y, 16, 16, 48);
                continue;
            }
            const auto v = static_cast<std::uint8_t>(
                std::clamp(255.0 * (h.z.at(x, y) - lo) / span, 0.0, 255.0));
            img.set(x, y, v, v, v);
        }
    }
    return img;
}

RgbImage render_shape_types(const ShapeTypeMap& t) {
    RgbImage img(t.width(), t.height());
    for (int y = 0; y < t.height(); ++y) {
        for (int x = 0; x < t.width(); ++x) {
            const Rgb c = kShapePalette[t.labels.at(x, y)];
            img.set(x, y, c.r, c.g, c.b);
        }
    }
    return img;
}

RgbImage render_topology(const HeightField& h, const TopologyMasks& topo) {
    RgbImage img = render_height(h);
    for (int y = 0; y < h.height(); ++y) {
        for (int x = 0; x < h.width(); ++x) {
            if (topo.contours.test(x, y)) img.set(x, y, 0, 200, 0);
            if (topo.ridge_points.test(x, y)) img.set(x, y, 255, 0, 0);
        }
    }
    return img;
}

RgbImage render_triplets(const HeightField& h,
                         const std::vector<Wrinkle>& wrinkles) {
    RgbImage img = render_height(h);
    for (const auto& w : wrinkles) {
        for (const auto& t : w.triplets) {
            draw_line(img, t.contour_px_1, t.ridge_px, {255, 255, 0});
            draw_line(img, t.ridge_px, t.contour_px_2, {0, 160, 255});
            draw_line(img, t.contour_px_1, t.contour_px_2, {128, 128, 255});
        }
    }
    return img;
}

RgbImage render_wrinkles(const HeightField& h,
                         const std::vector<Wrinkle>& wrinkles) {
    RgbImage img = render_height(h);
    for (std::size_t i = 0; i < wrinkles.size(); ++i) {
        const Rgb c = kRankColors[i % 6];
        for (const auto& p : wrinkles[i].points) img.set(p.x, p.y, c.r, c.g, c.b);
    }
    for (std::size_t i = 0; i < wrinkles.size(); ++i) {
        const Pca2 pca = pca_points(wrinkles[i].points);
        draw_number(img, static_cast<int>(i + 1),
                    static_cast<int>(pca.cx) + 4, static_cast<int>(pca.cy) - 6,
                    {255, 255, 255});
    }
    return img;
}

}  // namespace crease
