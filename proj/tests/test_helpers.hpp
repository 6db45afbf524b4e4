#pragma once

#include "specverify/network.hpp"
#include "specverify/rng.hpp"
#include "specverify/types.hpp"

#include <vector>

namespace specverify::testing {

inline Network identity_net(int dim) {
    AffineLayer affine;
    affine.weight = Matrix::Identity(dim, dim);
    affine.bias = Vector::Zero(dim);
    return make_network("identity", dim, {affine});
}

inline Network affine_net(Matrix w, Vector b) {
    const int in_dim = static_cast<int>(w.cols());
    AffineLayer affine{std::move(w), std::move(b)};
    return make_network("affine", in_dim, {affine});
}

// Small random ReLU MLP with weights in [-scale, scale].
inline Network random_net(const std::vector<int>& dims, Rng& rng, double scale = 1.0) {
    std::vector<Layer> layers;
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        AffineLayer affine;
        affine.weight.resize(dims[k + 1], dims[k]);
        affine.bias.resize(dims[k + 1]);
        for (Index r = 0; r < affine.weight.rows(); ++r) {
            for (Index c = 0; c < affine.weight.cols(); ++c) {
                affine.weight(r, c) = rng.uniform(-scale, scale);
            }
            affine.bias(r) = rng.uniform(-scale, scale);
        }
        layers.push_back(std::move(affine));
        if (k + 2 < dims.size()) layers.push_back(ReluLayer{});
    }
    return make_network("random", dims.front(), std::move(layers));
}

inline Vector random_vector(Index dim, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = rng.uniform(lo, hi);
    return v;
}

}  // namespace specverify::testing
