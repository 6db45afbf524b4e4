#pragma once

#include "specverify/network.hpp"

#include <string>
#include <vector>

namespace specverify {

struct SurfacePoint {
    double s;
    double t;
    int label;
};

// Argmax labels of forward(net, clip(a + s(b-a) + t(c-a), 0, 1)) on a
// grid_n x grid_n lattice over (s, t) in [lo, hi]^2; ties break toward the
// lowest label index.
std::vector<SurfacePoint> decision_surface(const Network& net, const Vector& a,
                                           const Vector& b, const Vector& c, int grid_n,
                                           double lo = -0.2, double hi = 1.2);

void write_surface_csv(const std::vector<SurfacePoint>& points, const std::string& path);

}  // namespace specverify
