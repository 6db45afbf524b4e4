#include "specverify/surface.hpp"

#include <cstdio>
#include <fstream>

namespace specverify {

std::vector<SurfacePoint> decision_surface(const Network& net, const Vector& a, const Vector& b,
                                           const Vector& c, int grid_n, double lo, double hi) {
    if (a.size() != net.input_dim || b.size() != net.input_dim || c.size() != net.input_dim) {
        throw ShapeError("decision_surface: image dimensions do not match network input");
    }
    if (grid_n < 2) {
        throw ConfigError("decision_surface: grid must have at least 2 points per axis");
    }
    std::vector<SurfacePoint> points;
    points.reserve(static_cast<std::size_t>(grid_n) * static_cast<std::size_t>(grid_n));
    const Vector ab = b - a;
    const Vector ac = c - a;
    for (int i = 0; i < grid_n; ++i) {
        const double s = lo + (hi - lo) * static_cast<double>(i) / (grid_n - 1);
        for (int j = 0; j < grid_n; ++j) {
            const double t = lo + (hi - lo) * static_cast<double>(j) / (grid_n - 1);
            const Vector x = (a + s * ab + t * ac).cwiseMax(0.0).cwiseMin(1.0);
            const Vector y = forward(net, x);
            Index label;
            y.maxCoeff(&label);  // Eigen returns the first (lowest) index on ties
            points.push_back({s, t, static_cast<int>(label)});
        }
    }
    return points;
}

void write_surface_csv(const std::vector<SurfacePoint>& points, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("write_surface_csv: cannot open '" + path + "'");
    }
    out << "s,t,label\n";
    char buf[80];
    for (const SurfacePoint& p : points) {
        std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%d\n", p.s, p.t, p.label);
        out << buf;
    }
}

}  // namespace specverify
