#pragma once

#include "specverify/network.hpp"
#include "specverify/types.hpp"

#include <optional>
#include <vector>

namespace specverify {

// l-infinity ball around a nominal point, optionally clamped to a global
// range (e.g. pixel values in [0, 1]).
struct InputRegion {
    Vector center;
    double delta = 0.0;
    std::optional<double> clip_lo;
    std::optional<double> clip_hi;

    Vector lower() const;
    Vector upper() const;
};

InputRegion make_region(Vector center, double delta,
                        std::optional<double> clip_lo = std::nullopt,
                        std::optional<double> clip_hi = std::nullopt);

// Elementwise intervals for x_0 (the input box) through x_K. For a ReLU
// layer k the pre-activation interval is entry k and the post-activation
// interval is entry k+1, so both are retained.
struct LayerBounds {
    std::vector<Vector> lower;
    std::vector<Vector> upper;

    const Vector& output_lower() const { return lower.back(); }
    const Vector& output_upper() const { return upper.back(); }
};

// Interval arithmetic pass. Sound: every activation of forward(net, x) for
// x in the region lies inside the returned intervals.
LayerBounds propagate_bounds(const Network& net, const InputRegion& region);

}  // namespace specverify
