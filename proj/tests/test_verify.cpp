#include "specverify/verify.hpp"

#include "specverify/physics.hpp"
#include "specverify/train.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace specverify;
using namespace specverify::testing;

TEST_SUITE_BEGIN("verify");

namespace {

Specification linear_spec_1d(double c, double d) {
    LinearSpec spec;
    spec.c = Vector(1);
    spec.c << c;
    spec.d = d;
    return spec;
}

Specification toy_quadratic() {
    QuadraticSpec spec{Matrix::Zero(5, 5)};
    spec.Q(0, 0) = -4.0;
    spec.Q(1, 1) = 1.0;
    spec.Q(2, 2) = -1.0;
    return spec;
}

}  // namespace

TEST_CASE("degenerate box with satisfied spec verifies") {
    const Network net = identity_net(1);
    Vector center(1);
    center << 0.2;
    const std::vector<const Network*> nets{&net};
    const std::vector<InputRegion> regions{make_region(center, 0.0)};
    const VerifyOptions opts;
    const VerificationOutcome out =
        verify_example(nets, linear_spec_1d(1.0, -0.5), regions, opts);
    CHECK(out.status == VerifyStatus::Verified);
    CHECK(out.relaxation_optimum == doctest::Approx(-0.3).epsilon(1e-9));
}

TEST_CASE("delta=0 LP equals the exact spec value for exp and quad atoms") {
    Rng rng(91);
    for (int trial = 0; trial < 10; ++trial) {
        const Network net = random_net({2, 4, 3}, rng);
        const Vector center = random_vector(2, rng);
        const std::vector<const Network*> nets{&net};
        const std::vector<InputRegion> regions{make_region(center, 0.0)};
        VerifyOptions opts;
        opts.run_falsifier = false;

        SemanticSoftmaxSpec sem;
        sem.dist = Vector(3);
        sem.dist << 0.0, 0.5, 1.0;
        sem.epsilon = 0.3;
        const std::vector<Vector> xs{center};
        const std::vector<Vector> ys{forward(net, center)};
        const std::vector<LayerBounds> lb{propagate_bounds(net, regions[0])};
        {
            const VerificationOutcome out = verify_example(nets, sem, regions, opts);
            const auto shifts = encoding_shifts(Specification{sem}, lb);
            const double exact = eval_spec_relaxed_form(Specification{sem}, xs, ys, shifts);
            CHECK(out.relaxation_optimum == doctest::Approx(exact).epsilon(1e-7));
        }
        {
            QuadraticSpec quad{Matrix::Zero(6, 6)};
            Matrix q(6, 6);
            for (Index i = 0; i < 6; ++i) {
                for (Index j = 0; j < 6; ++j) q(i, j) = rng.uniform(-1.0, 1.0);
            }
            quad.Q = 0.5 * (q + q.transpose());
            const VerificationOutcome out = verify_example(nets, quad, regions, opts);
            const double exact = eval_spec(Specification{quad}, xs, ys);
            CHECK(out.relaxation_optimum == doctest::Approx(exact).epsilon(1e-7));
        }
        {
            const VerificationOutcome out = verify_example(nets, EntropySpec{0.2}, regions, opts);
            const auto shifts = encoding_shifts(Specification{EntropySpec{0.2}}, lb);
            const double exact =
                eval_spec_relaxed_form(Specification{EntropySpec{0.2}}, xs, ys, shifts);
            CHECK(out.relaxation_optimum == doctest::Approx(exact).epsilon(2e-6));
        }
    }
}

TEST_CASE("toy quadratic is rejected by the LP and falsified by PGD") {
    const Network net = identity_net(2);
    Vector center(2);
    center << 1.0, 0.0;
    const std::vector<const Network*> nets{&net};
    const std::vector<InputRegion> regions{make_region(center, 9.0)};
    VerifyOptions opts;
    opts.attack.seed = 3;
    const VerificationOutcome out = verify_example(nets, toy_quadratic(), regions, opts);
    CHECK(out.status == VerifyStatus::Falsified);
    REQUIRE(out.witness.has_value());
    CHECK(out.witness->value == doctest::Approx(96.0).epsilon(1e-6));
    CHECK(out.relaxation_optimum >= 96.0 - 1e-6);
}

TEST_CASE("verified linear spec agrees with the grid oracle") {
    Rng rng(92);
    int verified_seen = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const Network net = random_net({2, 4, 2}, rng);
        const Vector center = random_vector(2, rng);
        LinearSpec spec;
        spec.c = random_vector(2, rng);
        const Vector nominal = forward(net, center);
        // Shift d so the nominal value sits below zero with some margin.
        spec.d = -spec.c.dot(nominal) - 0.5;
        const std::vector<const Network*> nets{&net};
        const std::vector<InputRegion> regions{make_region(center, 0.05)};
        VerifyOptions opts;
        opts.run_falsifier = false;
        const VerificationOutcome out = verify_example(nets, Specification{spec}, regions, opts);
        const double oracle = grid_oracle(nets, Specification{spec}, regions, 50);
        CHECK(out.relaxation_optimum >= oracle - 1e-6);
        if (out.status == VerifyStatus::Verified) {
            ++verified_seen;
            CHECK(oracle < 0.0);
        }
    }
    CHECK(verified_seen > 10);
}

TEST_CASE("grid oracle basics") {
    const Network net = identity_net(1);
    Vector center(1);
    center << 0.5;
    const std::vector<const Network*> nets{&net};
    const std::vector<InputRegion> regions{make_region(center, 0.5)};
    for (int ppd : {2, 17, 50}) {
        CHECK(grid_oracle(nets, linear_spec_1d(1.0, -0.5), regions, ppd) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }
    const std::vector<InputRegion> point{make_region(center, 0.0)};
    CHECK(grid_oracle(nets, linear_spec_1d(1.0, -0.5), point, 10) ==
          doctest::Approx(0.0).epsilon(1e-12));

    const Network wide = identity_net(5);
    const std::vector<const Network*> nets5{&wide};
    LinearSpec spec5;
    spec5.c = Vector::Ones(5);
    spec5.d = 0.0;
    const std::vector<InputRegion> regions5{make_region(Vector::Zero(5), 1.0)};
    CHECK_THROWS_AS(grid_oracle(nets5, Specification{spec5}, regions5, 5), ConfigError);
}

TEST_CASE("toy quadratic grid oracle hits the corner value") {
    const Network net = identity_net(2);
    Vector center(2);
    center << 1.0, 0.0;
    const std::vector<const Network*> nets{&net};
    const std::vector<InputRegion> regions{make_region(center, 9.0)};
    CHECK(grid_oracle(nets, toy_quadratic(), regions, 41) == doctest::Approx(96.0).epsilon(1e-9));
}

TEST_CASE("lp tightening never loosens the interval bounds") {
    Rng rng(93);
    for (int trial = 0; trial < 5; ++trial) {
        const Network net = random_net({2, 6, 4, 2}, rng);
        const Vector center = random_vector(2, rng);
        const InputRegion region = make_region(center, 0.3);
        const LayerBounds plain = propagate_bounds(net, region);
        const LayerBounds tight = tighten_bounds_lp(net, region);
        for (std::size_t k = 0; k < plain.lower.size(); ++k) {
            CHECK((tight.lower[k].array() >= plain.lower[k].array() - 1e-9).all());
            CHECK((tight.upper[k].array() <= plain.upper[k].array() + 1e-9).all());
        }
        // Tightened bounds must stay sound.
        const Vector lo = region.lower();
        const Vector hi = region.upper();
        for (int s = 0; s < 500; ++s) {
            Vector x(2);
            for (Index d = 0; d < 2; ++d) x(d) = rng.uniform(lo(d), hi(d));
            Vector h = x;
            std::size_t k = 0;
            for (const Layer& layer : net.layers) {
                if (const auto* affine = std::get_if<AffineLayer>(&layer)) {
                    h = affine->weight * h + affine->bias;
                } else {
                    h = h.cwiseMax(0.0);
                }
                ++k;
                CHECK((h.array() >= tight.lower[k].array() - 1e-7).all());
                CHECK((h.array() <= tight.upper[k].array() + 1e-7).all());
            }
        }
    }
}

TEST_CASE("sweep rows respect the sandwich and delta monotonicity") {
    PendulumParams p;
    const auto pairs = generate_dataset(600, 17, p);
    const TrainingData train_set = [&] {
        TrainingData d;
        for (std::size_t i = 0; i < 500; ++i) {
            d.inputs.push_back(pairs[i].input);
            d.targets.push_back(pairs[i].target);
        }
        return d;
    }();
    LossConfig tc;
    tc.kind = LossKind::L1PlusEnergy;
    tc.epochs = 6;
    tc.seed = 4;
    const TrainResult trained = train(init_mlp("pend", {3, 16, 3}, 4), train_set, {}, tc);

    std::vector<SweepItem> items;
    const QuadraticSpec energy_spec = build_energy_Q(EnergyParams{});
    for (std::size_t i = 500; i < 560; ++i) {
        items.push_back({{pairs[i].input}, energy_spec});
    }
    SweepConfig cfg;
    cfg.deltas = {0.0, 0.01, 0.03};
    cfg.seed = 21;
    cfg.timing = false;
    cfg.verify.attack.restarts = 5;
    cfg.verify.attack.steps = 40;
    const SweepReport report = sweep(trained.net, items, cfg);
    REQUIRE(report.rows.size() == 3);
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
        CHECK(report.rows[r].verification_bound <= report.rows[r].adversarial_bound);
        if (r > 0) {
            CHECK(report.rows[r].verification_bound <= report.rows[r - 1].verification_bound);
        }
    }

    // Byte-identical reproduction with timing disabled.
    const SweepReport again = sweep(trained.net, items, cfg);
    CHECK(report_to_csv(report) == report_to_csv(again));
    CHECK(report_to_csv(report).rfind("delta,verification_bound,adversarial_bound,"
                                      "n_examples,mean_lp_value,wall_ms\n",
                                      0) == 0);
}

TEST_CASE("arity mismatches are rejected") {
    const Network net = identity_net(1);
    const std::vector<const Network*> nets{&net};
    const std::vector<InputRegion> none;
    const VerifyOptions opts;
    CHECK_THROWS_AS(verify_example(nets, linear_spec_1d(1.0, 0.0), none, opts), ShapeError);
}

TEST_SUITE_END();
