#include "specverify/network.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace specverify;
using namespace specverify::testing;

TEST_SUITE_BEGIN("network");

TEST_CASE("forward clamps negative pre-activations") {
    Matrix w(1, 2);
    w << 1.0, -1.0;
    Network net = make_network("n", 2, {AffineLayer{w, Vector::Zero(1)}, ReluLayer{}});
    Vector x(2);
    x << 2.0, 3.0;
    const Vector y = forward(net, x);
    CHECK(y.size() == 1);
    CHECK(y(0) == 0.0);
}

TEST_CASE("identity affine passes inputs through") {
    Network net = identity_net(2);
    Vector x(2);
    x << 0.3, -0.7;
    const Vector y = forward(net, x);
    CHECK(y(0) == 0.3);
    CHECK(y(1) == -0.7);
}

TEST_CASE("two-layer forward matches hand evaluation") {
    Matrix w1(2, 2);
    w1 << 2.0, 0.0, 0.0, 2.0;
    Vector b1(2);
    b1 << 1.0, 1.0;
    Matrix w2(1, 2);
    w2 << 1.0, 1.0;
    Network net = make_network(
        "n", 2, {AffineLayer{w1, b1}, ReluLayer{}, AffineLayer{w2, Vector::Zero(1)}});
    Vector x(2);
    x << 1.0, -1.0;
    // (2*1+1, 2*(-1)+1) = (3, -1) -> relu (3, 0) -> 3
    CHECK(forward(net, x)(0) == 3.0);
}

TEST_CASE("forward rejects wrong input dimension") {
    Network net = identity_net(2);
    CHECK_THROWS_AS(forward(net, Vector::Zero(3)), ShapeError);
}

TEST_CASE("softmax basics") {
    Vector zeros(2);
    zeros << 0.0, 0.0;
    const Vector p = softmax(zeros);
    CHECK(p(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p(1) == doctest::Approx(0.5).epsilon(1e-15));

    Vector big(2);
    big << 1000.0, 1000.0;
    const Vector pb = softmax(big);
    CHECK(pb(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::isfinite(pb.sum()));

    Vector v(2);
    v << 0.0, std::log(3.0);
    const Vector pv = softmax(v);
    CHECK(pv(0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(pv(1) == doctest::Approx(0.75).epsilon(1e-12));

    CHECK_THROWS_AS(softmax(Vector{}), ShapeError);
}

TEST_CASE("softmax is invariant to a constant logit shift") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector y = random_vector(5, rng, -4.0, 4.0);
        const double shift = rng.uniform(-30.0, 30.0);
        const Vector a = softmax(y);
        const Vector b = softmax(y.array() + shift);
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("forward is piecewise linear along directions") {
    Rng rng(12);
    Network net = random_net({3, 5, 2}, rng);
    int consistent = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const Vector x = random_vector(3, rng);
        const Vector v = random_vector(3, rng);
        // Difference quotients at two small scales agree off the kink set.
        const Vector d1 = (forward(net, x + 1e-6 * v) - forward(net, x)) / 1e-6;
        const Vector d2 = (forward(net, x + 5e-7 * v) - forward(net, x)) / 5e-7;
        if ((d1 - d2).cwiseAbs().maxCoeff() < 1e-6) ++consistent;
    }
    CHECK(consistent >= 28);  // kinks are measure zero but sampling may graze them
}

TEST_CASE("model save/load round trip is exact") {
    Rng rng(13);
    Network net = random_net({3, 4, 2}, rng);
    net.name = "roundtrip";
    const std::string path = (std::filesystem::temp_directory_path() / "sv_model.json").string();
    save_model(net, path);
    const Network loaded = load_model(path);
    CHECK(loaded.name == net.name);
    CHECK(loaded.input_dim == net.input_dim);
    CHECK(loaded.output_dim == net.output_dim);
    REQUIRE(loaded.layers.size() == net.layers.size());
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const auto* a = std::get_if<AffineLayer>(&net.layers[k]);
        const auto* b = std::get_if<AffineLayer>(&loaded.layers[k]);
        REQUIRE((a == nullptr) == (b == nullptr));
        if (a) {
            CHECK(a->weight == b->weight);  // bit-for-bit
            CHECK(a->bias == b->bias);
        }
    }
    for (int trial = 0; trial < 100; ++trial) {
        const Vector x = random_vector(3, rng, -2.0, 2.0);
        CHECK(forward(net, x) == forward(loaded, x));
    }
    std::remove(path.c_str());
}

TEST_CASE("schema violations are rejected") {
    const std::string bad = R"({"name":"b","input_dim":2,
        "layers":[{"type":"affine","weight":[[1.0,2.0],[3.0]],"bias":[0.0,0.0]}]})";
    CHECK_THROWS_AS(parse_model_json(bad, "test"), SchemaError);

    const std::string mismatched = R"({"name":"b","input_dim":3,
        "layers":[{"type":"affine","weight":[[1.0,2.0]],"bias":[0.0]}]})";
    CHECK_THROWS_AS(parse_model_json(mismatched, "test"), SchemaError);

    CHECK_THROWS_AS(parse_model_json("{not json", "test"), ParseError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), IoError);
}

TEST_CASE("relu-only model is accepted and preserves dimension") {
    const std::string text = R"({"name":"r","input_dim":3,"layers":[{"type":"relu"}]})";
    const Network net = parse_model_json(text, "test");
    CHECK(net.input_dim == 3);
    CHECK(net.output_dim == 3);
    const std::string path = (std::filesystem::temp_directory_path() / "sv_relu.json").string();
    save_model(net, path);
    const Network loaded = load_model(path);
    CHECK(loaded.output_dim == 3);
    std::remove(path.c_str());
}

TEST_CASE("scientific notation weights parse") {
    const std::string text =
        R"({"name":"s","input_dim":1,"layers":[{"type":"affine","weight":[[1.5e-3]],"bias":[2e2]}]})";
    const Network net = parse_model_json(text, "test");
    const auto& affine = std::get<AffineLayer>(net.layers[0]);
    CHECK(affine.weight(0, 0) == 1.5e-3);
    CHECK(affine.bias(0) == 2e2);
}

TEST_SUITE_END();
