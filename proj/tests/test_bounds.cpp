#include "specverify/bounds.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

using namespace specverify;
using namespace specverify::testing;

TEST_SUITE_BEGIN("bounds");

TEST_CASE("affine interval rule reaches the extremes") {
    Matrix w(1, 2);
    w << 1.0, -1.0;
    Network net = affine_net(w, Vector::Zero(1));
    Vector center(2);
    center << 0.5, 0.5;
    const LayerBounds lb = propagate_bounds(net, make_region(center, 0.5));
    CHECK(lb.output_lower()(0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(lb.output_upper()(0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("delta=0 bounds equal the forward activations exactly") {
    Rng rng(21);
    Network net = random_net({3, 5, 5, 2}, rng);
    const Vector x = random_vector(3, rng);
    const LayerBounds lb = propagate_bounds(net, make_region(x, 0.0));
    CHECK(lb.output_lower() == forward(net, x));
    CHECK(lb.output_upper() == forward(net, x));
}

TEST_CASE("relu bounds from sign enumeration") {
    Matrix w(2, 1);
    w << 1.0, -1.0;
    Network net = make_network("n", 1, {AffineLayer{w, Vector::Zero(2)}, ReluLayer{}});
    const LayerBounds lb = propagate_bounds(net, make_region(Vector::Zero(1), 1.0));
    CHECK(lb.output_lower()(0) == 0.0);
    CHECK(lb.output_upper()(0) == 1.0);
    CHECK(lb.output_lower()(1) == 0.0);
    CHECK(lb.output_upper()(1) == 1.0);
}

TEST_CASE("sampled soundness across layers") {
    Rng rng(22);
    for (int instance = 0; instance < 5; ++instance) {
        Network net = random_net({3, 6, 4, 2}, rng);
        const Vector center = random_vector(3, rng);
        const double delta = rng.uniform(0.0, 0.5);
        const InputRegion region = make_region(center, delta);
        const LayerBounds lb = propagate_bounds(net, region);
        const Vector lo = region.lower();
        const Vector hi = region.upper();
        for (int s = 0; s < 2000; ++s) {
            Vector x(3);
            for (Index d = 0; d < 3; ++d) x(d) = rng.uniform(lo(d), hi(d));
            Vector h = x;
            std::size_t k = 0;
            for (const Layer& layer : net.layers) {
                if (const auto* affine = std::get_if<AffineLayer>(&layer)) {
                    h = affine->weight * h + affine->bias;
                } else {
                    h = h.cwiseMax(0.0);
                }
                ++k;
                CHECK((h.array() >= lb.lower[k].array() - 1e-9).all());
                CHECK((h.array() <= lb.upper[k].array() + 1e-9).all());
            }
        }
    }
}

TEST_CASE("bounds are monotone in the radius") {
    Rng rng(23);
    Network net = random_net({3, 5, 3}, rng);
    const Vector center = random_vector(3, rng);
    LayerBounds prev = propagate_bounds(net, make_region(center, 0.0));
    for (double delta : {0.05, 0.2, 0.6}) {
        const LayerBounds next = propagate_bounds(net, make_region(center, delta));
        for (std::size_t k = 0; k < prev.lower.size(); ++k) {
            CHECK((next.lower[k].array() <= prev.lower[k].array() + 1e-12).all());
            CHECK((next.upper[k].array() >= prev.upper[k].array() - 1e-12).all());
        }
        prev = next;
    }
}

TEST_CASE("clamped regions respect pixel ranges") {
    Vector center(2);
    center << 0.05, 0.95;
    const InputRegion region = make_region(center, 0.2, 0.0, 1.0);
    CHECK(region.lower()(0) == 0.0);
    CHECK(region.upper()(0) == doctest::Approx(0.25));
    CHECK(region.lower()(1) == doctest::Approx(0.75));
    CHECK(region.upper()(1) == 1.0);
    CHECK_THROWS_AS(make_region(center, -0.1), DomainError);
}

TEST_SUITE_END();
