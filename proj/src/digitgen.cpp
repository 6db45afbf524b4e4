#include "specverify/digitgen.hpp"

#include "specverify/rng.hpp"

#include <array>
#include <cmath>
#include <fstream>

namespace specverify {

namespace {

constexpr int kSide = 28;

struct Point {
    double x;
    double y;
};

using Polyline = std::vector<Point>;

Polyline arc(double cx, double cy, double rx, double ry, double a0, double a1, int segments) {
    Polyline line;
    line.reserve(static_cast<std::size_t>(segments) + 1);
    for (int i = 0; i <= segments; ++i) {
        const double a = a0 + (a1 - a0) * static_cast<double>(i) / segments;
        line.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
    }
    return line;
}

const double kPi = std::acos(-1.0);

// Stroke skeletons in unit coordinates, y growing downward.
std::vector<Polyline> digit_strokes(int digit) {
    switch (digit) {
        case 0:
            return {arc(0.5, 0.5, 0.24, 0.34, 0.0, 2.0 * kPi, 14)};
        case 1:
            return {{{0.36, 0.30}, {0.54, 0.14}, {0.54, 0.86}}};
        case 2:
            return {{{0.28, 0.32},
                     {0.34, 0.18},
                     {0.52, 0.14},
                     {0.68, 0.22},
                     {0.70, 0.36},
                     {0.52, 0.56},
                     {0.30, 0.84}},
                    {{0.30, 0.84}, {0.74, 0.84}}};
        case 3:
            return {{{0.30, 0.20},
                     {0.50, 0.14},
                     {0.68, 0.24},
                     {0.60, 0.42},
                     {0.46, 0.48},
                     {0.62, 0.54},
                     {0.70, 0.70},
                     {0.52, 0.86},
                     {0.30, 0.80}}};
        case 4:
            return {{{0.62, 0.86}, {0.62, 0.14}, {0.26, 0.62}, {0.80, 0.62}}};
        case 5:
            return {{{0.70, 0.16},
                     {0.34, 0.16},
                     {0.32, 0.46},
                     {0.56, 0.42},
                     {0.72, 0.56},
                     {0.66, 0.78},
                     {0.42, 0.86},
                     {0.28, 0.78}}};
        case 6:
            return {{{0.64, 0.14}, {0.44, 0.36}, {0.32, 0.60}},
                    arc(0.50, 0.66, 0.19, 0.19, 0.0, 2.0 * kPi, 12)};
        case 7:
            return {{{0.26, 0.16}, {0.74, 0.16}, {0.46, 0.86}}};
        case 8:
            return {arc(0.50, 0.32, 0.17, 0.17, 0.0, 2.0 * kPi, 12),
                    arc(0.50, 0.68, 0.21, 0.19, 0.0, 2.0 * kPi, 12)};
        default:
            return {arc(0.52, 0.34, 0.18, 0.19, 0.0, 2.0 * kPi, 12),
                    {{0.70, 0.38}, {0.62, 0.86}}};
    }
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
    const double vx = b.x - a.x;
    const double vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2;
        t = std::min(1.0, std::max(0.0, t));
    }
    const double dx = p.x - (a.x + t * vx);
    const double dy = p.y - (a.y + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

Vector render_digit(int digit, Rng& rng) {
    const double angle = rng.uniform(-0.22, 0.22);
    const double scale = rng.uniform(0.78, 1.02);
    const double shift_x = rng.uniform(-0.07, 0.07);
    const double shift_y = rng.uniform(-0.07, 0.07);
    const double shear = rng.uniform(-0.12, 0.12);
    const double thickness = rng.uniform(0.045, 0.075);
    const double ca = std::cos(angle), sa = std::sin(angle);

    std::vector<Polyline> strokes = digit_strokes(digit);
    for (Polyline& line : strokes) {
        for (Point& p : line) {
            double x = p.x - 0.5;
            double y = p.y - 0.5;
            x += shear * y;
            const double rx = scale * (ca * x - sa * y);
            const double ry = scale * (sa * x + ca * y);
            p.x = rx + 0.5 + shift_x;
            p.y = ry + 0.5 + shift_y;
        }
    }

    Vector image(kSide * kSide);
    for (int py = 0; py < kSide; ++py) {
        for (int px = 0; px < kSide; ++px) {
            const Point center{(px + 0.5) / kSide, (py + 0.5) / kSide};
            double d = 1e9;
            for (const Polyline& line : strokes) {
                for (std::size_t i = 0; i + 1 < line.size(); ++i) {
                    d = std::min(d, segment_distance(center, line[i], line[i + 1]));
                }
            }
            double intensity = (thickness - d) / (0.45 * thickness) + 1.0;
            intensity = std::min(1.0, std::max(0.0, intensity));
            intensity += rng.uniform(-0.03, 0.03);
            image(py * kSide + px) = std::min(1.0, std::max(0.0, intensity));
        }
    }
    return image;
}

void write_u32_be(std::ostream& out, std::uint32_t v) {
    const unsigned char bytes[4] = {static_cast<unsigned char>(v >> 24),
                                    static_cast<unsigned char>(v >> 16),
                                    static_cast<unsigned char>(v >> 8),
                                    static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

}  // namespace

DigitCorpus generate_digits(int count, std::uint64_t seed) {
    if (count < 1) {
        throw ConfigError("generate_digits: count must be >= 1");
    }
    DigitCorpus corpus;
    corpus.images.reserve(static_cast<std::size_t>(count));
    corpus.labels.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(i));
        const int digit = i % 10;
        corpus.images.push_back(render_digit(digit, rng));
        corpus.labels.push_back(digit);
    }
    return corpus;
}

void write_idx_images(const std::vector<Vector>& images, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("write_idx_images: cannot open '" + path + "' for writing");
    }
    write_u32_be(out, 2051);
    write_u32_be(out, static_cast<std::uint32_t>(images.size()));
    write_u32_be(out, kSide);
    write_u32_be(out, kSide);
    std::vector<unsigned char> row(kSide * kSide);
    for (const Vector& img : images) {
        if (img.size() != kSide * kSide) {
            throw ShapeError("write_idx_images: expected 784-pixel images");
        }
        for (Index i = 0; i < img.size(); ++i) {
            const double v = std::min(1.0, std::max(0.0, img(i)));
            row[static_cast<std::size_t>(i)] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
    }
    if (!out) {
        throw IoError("write_idx_images: write failed");
    }
}

void write_idx_labels(const std::vector<int>& labels, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("write_idx_labels: cannot open '" + path + "' for writing");
    }
    write_u32_be(out, 2049);
    write_u32_be(out, static_cast<std::uint32_t>(labels.size()));
    for (int label : labels) {
        const char byte = static_cast<char>(label);
        out.write(&byte, 1);
    }
    if (!out) {
        throw IoError("write_idx_labels: write failed");
    }
}

}  // namespace specverify
