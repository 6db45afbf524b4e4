#include "specverify/bounds.hpp"

namespace specverify {

Vector InputRegion::lower() const {
    Vector lo = center.array() - delta;
    if (clip_lo) lo = lo.cwiseMax(*clip_lo);
    if (clip_hi) lo = lo.cwiseMin(*clip_hi);
    return lo;
}

Vector InputRegion::upper() const {
    Vector hi = center.array() + delta;
    if (clip_hi) hi = hi.cwiseMin(*clip_hi);
    if (clip_lo) hi = hi.cwiseMax(*clip_lo);
    return hi;
}

InputRegion make_region(Vector center, double delta, std::optional<double> clip_lo,
                        std::optional<double> clip_hi) {
    if (!(delta >= 0.0)) {
        throw DomainError("make_region: perturbation radius must be nonnegative");
    }
    if (!center.allFinite()) {
        throw NumericError("make_region: non-finite center");
    }
    if (clip_lo && clip_hi && *clip_lo > *clip_hi) {
        throw BoundOrderError("make_region: clip_lo > clip_hi");
    }
    InputRegion region{std::move(center), delta, clip_lo, clip_hi};
    if ((region.lower().array() > region.upper().array()).any()) {
        throw BoundOrderError("make_region: empty input box after clamping");
    }
    return region;
}

LayerBounds propagate_bounds(const Network& net, const InputRegion& region) {
    if (region.center.size() != net.input_dim) {
        throw ShapeError("propagate_bounds: region dimension does not match network input");
    }
    LayerBounds bounds;
    bounds.lower.reserve(net.layers.size() + 1);
    bounds.upper.reserve(net.layers.size() + 1);
    bounds.lower.push_back(region.lower());
    bounds.upper.push_back(region.upper());

    for (const Layer& layer : net.layers) {
        const Vector& lo = bounds.lower.back();
        const Vector& hi = bounds.upper.back();
        if (const auto* affine = std::get_if<AffineLayer>(&layer)) {
            const Vector mid = 0.5 * (lo + hi);
            const Vector rad = 0.5 * (hi - lo);
            const Vector out_mid = affine->weight * mid + affine->bias;
            const Vector out_rad = affine->weight.cwiseAbs() * rad;
            bounds.lower.push_back(out_mid - out_rad);
            bounds.upper.push_back(out_mid + out_rad);
        } else {
            bounds.lower.push_back(lo.cwiseMax(0.0));
            bounds.upper.push_back(hi.cwiseMax(0.0));
        }
        if (!bounds.lower.back().allFinite() || !bounds.upper.back().allFinite()) {
            throw NumericError("propagate_bounds: non-finite layer bounds");
        }
    }
    return bounds;
}

}  // namespace specverify
