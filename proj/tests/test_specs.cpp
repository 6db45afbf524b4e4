#include "specverify/specs.hpp"

#include "specverify/physics.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace specverify;
using namespace specverify::testing;

TEST_SUITE_BEGIN("specs");

namespace {

// Independent digit-sum expectation: recursive, opposite loop nesting from
// the implementation's odometer.
double digit_sum_reference(const DigitSumSpec& spec, const std::vector<Vector>& logits) {
    std::vector<Vector> probs;
    for (const Vector& y : logits) probs.push_back(softmax(y));
    const int copies = static_cast<int>(spec.targets.size());
    const auto recurse = [&](auto&& self, int pos, double prob, int err) -> double {
        if (pos < 0) return prob * std::abs(static_cast<double>(err));
        double total = 0.0;
        for (int j = spec.n_labels - 1; j >= 0; --j) {
            total += self(self, pos - 1, prob * probs[static_cast<std::size_t>(pos)](j),
                          err + j - spec.targets[static_cast<std::size_t>(pos)]);
        }
        return total;
    };
    return recurse(recurse, copies - 1, 1.0, 0) - spec.epsilon;
}

LayerBounds fake_bounds(const Vector& in_lo, const Vector& in_hi, const Vector& out_lo,
                        const Vector& out_hi) {
    LayerBounds lb;
    lb.lower = {in_lo, out_lo};
    lb.upper = {in_hi, out_hi};
    return lb;
}

}  // namespace

TEST_CASE("semantic softmax boundary case") {
    SemanticSoftmaxSpec spec;
    spec.dist = Vector(2);
    spec.dist << 0.0, 1.0;
    spec.epsilon = 0.5;
    Vector x(1), y(2);
    x << 0.0;
    y << 0.0, 0.0;
    const std::vector<Vector> xs{x}, ys{y};
    CHECK(eval_spec(spec, xs, ys) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("digit-sum over uniform logits") {
    DigitSumSpec spec;
    spec.targets = {0, 0};
    spec.n_labels = 10;
    spec.epsilon = 1.0;
    const std::vector<Vector> xs{Vector::Zero(1), Vector::Zero(1)};
    const std::vector<Vector> ys{Vector::Zero(10), Vector::Zero(10)};
    // E|j1 + j2| over 100 equiprobable outcomes = 900/100 = 9.
    CHECK(eval_spec(spec, xs, ys) == doctest::Approx(9.0 - 1.0).epsilon(1e-12));
}

TEST_CASE("zero quadratic evaluates to zero") {
    QuadraticSpec spec{Matrix::Zero(5, 5)};
    Rng rng(51);
    const std::vector<Vector> xs{random_vector(2, rng)};
    const std::vector<Vector> ys{random_vector(2, rng)};
    CHECK(eval_spec(spec, xs, ys) == 0.0);
}

TEST_CASE("digit-sum evaluator equals independent enumeration for N=2,3") {
    Rng rng(52);
    for (int trial = 0; trial < 20; ++trial) {
        for (int copies : {2, 3}) {
            DigitSumSpec spec;
            spec.n_labels = 10;
            spec.epsilon = rng.uniform(0.0, 2.0);
            std::vector<Vector> xs, ys;
            for (int n = 0; n < copies; ++n) {
                spec.targets.push_back(rng.uniform_int(0, 9));
                xs.push_back(Vector::Zero(1));
                ys.push_back(random_vector(10, rng, -3.0, 3.0));
            }
            const double got = eval_spec(spec, xs, ys);
            const double want = digit_sum_reference(spec, ys);
            CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
            spec.targets.clear();
        }
    }
}

TEST_CASE("expectation and denominator-cleared forms agree in sign") {
    Rng rng(53);
    SemanticSoftmaxSpec sem;
    sem.dist = Vector(4);
    sem.dist << 0.0, 0.3, 0.7, 1.0;
    for (int trial = 0; trial < 200; ++trial) {
        sem.epsilon = rng.uniform(0.05, 0.9);
        const std::vector<Vector> xs{Vector::Zero(1)};
        const std::vector<Vector> ys{random_vector(4, rng, -4.0, 4.0)};
        const double expectation = eval_spec(Specification{sem}, xs, ys);
        const double cleared = eval_spec_relaxed_form(Specification{sem}, xs, ys);
        if (expectation > 1e-12) CHECK(cleared > 0.0);
        if (expectation < -1e-12) CHECK(cleared < 0.0);
    }

    EntropySpec ent{0.4};
    for (int trial = 0; trial < 200; ++trial) {
        const std::vector<Vector> xs{Vector::Zero(1)};
        const std::vector<Vector> ys{random_vector(3, rng, -4.0, 4.0)};
        const double expectation = eval_spec(Specification{ent}, xs, ys);
        const double cleared = eval_spec_relaxed_form(Specification{ent}, xs, ys);
        if (expectation > 1e-12) CHECK(cleared > 0.0);
        if (expectation < -1e-12) CHECK(cleared < 0.0);
    }
}

TEST_CASE("degenerate semantic encoding pins z") {
    SemanticSoftmaxSpec spec;
    spec.dist = Vector(2);
    spec.dist << 0.0, 0.8;
    spec.epsilon = 0.3;
    LinearProgram lp;
    NetworkVarMap map;
    map.x.push_back(lp.add_variable("x", 0.0, 0.0));
    map.y.push_back(lp.add_variable("y0", 0.0, 0.0));
    map.y.push_back(lp.add_variable("y1", 0.0, 0.0));
    const LayerBounds lb =
        fake_bounds(Vector::Zero(1), Vector::Zero(1), Vector::Zero(2), Vector::Zero(2));
    const std::vector<LayerBounds> bounds{lb};
    const std::vector<NetworkVarMap> maps{map};
    const EncodedSpec enc = encode_spec(Specification{spec}, bounds, maps, lp, 3);
    lp.apply(enc.relaxation);
    lp.set_objective({{enc.z, 1.0}});
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    // z = e^0 (d0 - eps) + e^0 (d1 - eps) = (0 - 0.3) + (0.8 - 0.3) = 0.2
    CHECK(sol.objective == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("quadratic toy encoding attains 96") {
    QuadraticSpec spec{Matrix::Zero(3, 3)};
    spec.Q(0, 0) = -4.0;
    spec.Q(1, 1) = 1.0;
    spec.Q(2, 2) = -1.0;
    LinearProgram lp;
    NetworkVarMap map;
    map.x.push_back(lp.add_variable("x", -10.0, 10.0));
    map.y.push_back(lp.add_variable("y", -9.0, 9.0));
    Vector in_lo(1), in_hi(1), out_lo(1), out_hi(1);
    in_lo << -10.0;
    in_hi << 10.0;
    out_lo << -9.0;
    out_hi << 9.0;
    const std::vector<LayerBounds> bounds{fake_bounds(in_lo, in_hi, out_lo, out_hi)};
    const std::vector<NetworkVarMap> maps{map};
    const EncodedSpec enc = encode_spec(Specification{spec}, bounds, maps, lp, 5);
    lp.apply(enc.relaxation);
    lp.set_objective({{enc.z, 1.0}});
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(96.0).epsilon(1e-9));
}

TEST_CASE("energy Q coefficients and equivalence with direct energy") {
    EnergyParams p;  // m=1, l=0.5, g=9.81, s=0.1
    const QuadraticSpec spec = build_energy_Q(p);
    // Linear coefficient on h' is 2*Q(0,5) = m g l = 4.905.
    CHECK(2.0 * spec.Q(0, 5) == doctest::Approx(4.905).epsilon(1e-12));
    CHECK(2.0 * spec.Q(0, 2) == doctest::Approx(-4.905).epsilon(1e-12));
    CHECK(spec.Q(6, 6) == doctest::Approx(12.5).epsilon(1e-12));
    CHECK(spec.Q(3, 3) == doctest::Approx(-12.5).epsilon(1e-12));

    PendulumParams pp;
    Rng rng(54);
    for (int trial = 0; trial < 100; ++trial) {
        Vector in(3), out(3);
        const double t0 = rng.uniform(-3.14, 3.14), w0 = rng.uniform(-10.0, 10.0);
        const double t1 = rng.uniform(-3.14, 3.14), w1 = rng.uniform(-10.0, 10.0);
        in << std::sin(t0), -std::cos(t0), 0.1 * w0;
        out << std::sin(t1), -std::cos(t1), 0.1 * w1;
        const std::vector<Vector> xs{in}, ys{out};
        const double via_q = eval_spec(Specification{spec}, xs, ys);
        const double direct = energy(PendulumState{t1, w1}, pp) - energy(PendulumState{t0, w0}, pp);
        CHECK(via_q == doctest::Approx(direct).epsilon(1e-9));
    }

    Vector same(3);
    same << 0.3, -0.9, 0.2;
    const std::vector<Vector> xs{same}, ys{same};
    CHECK(eval_spec(Specification{spec}, xs, ys) == doctest::Approx(0.0).epsilon(1e-12));

    EnergyParams bad;
    bad.mass = -1.0;
    CHECK_THROWS_AS(build_energy_Q(bad), DomainError);
}

TEST_CASE("spec json round trip and schema rejection") {
    DigitSumSpec ds;
    ds.targets = {3, 1, 4};
    ds.n_labels = 10;
    ds.epsilon = 1.25;
    const Specification spec{ds};
    const Specification back = parse_spec_json(spec_to_json(spec), "test");
    const auto& got = std::get<DigitSumSpec>(back);
    CHECK(got.targets == ds.targets);
    CHECK(got.epsilon == ds.epsilon);

    CHECK_THROWS_AS(parse_spec_json(R"({"kind":"mystery"})", "test"), SchemaError);
    CHECK_THROWS_AS(parse_spec_json("not json", "test"), ParseError);
    // Q must be symmetric.
    CHECK_THROWS_AS(parse_spec_json(R"({"kind":"quadratic","Q":[[0,1],[0,0]]})", "test"),
                    SchemaError);
    // Semantic distances need a zero at the true label.
    CHECK_THROWS_AS(
        parse_spec_json(R"({"kind":"semantic_softmax","dist":[0.1,0.2],"epsilon":0.2})", "test"),
        SchemaError);
    // Term cap: 10^4 is the limit, 5 copies are rejected up front.
    CHECK_THROWS_AS(
        parse_spec_json(R"({"kind":"digit_sum","targets":[1,1,1,1,1],"n_labels":10})", "test"),
        SchemaError);
}

TEST_CASE("bundled distance matrix matches the published entries") {
    const Matrix d = load_distance_matrix(std::string(SPECVERIFY_DATA_DIR) +
                                          "/cifar10_wordnet_distance.json");
    REQUIRE(d.rows() == 10);
    // airplane-ship, automobile-truck, bird-frog
    CHECK(d(0, 8) == doctest::Approx(0.17));
    CHECK(d(1, 9) == doctest::Approx(0.0));
    CHECK(d(2, 6) == doctest::Approx(0.08));
    const Vector row = distance_row(d, 3);
    CHECK(row(3) == 0.0);
    CHECK_THROWS_AS(distance_row(d, 10), ConfigError);
}

TEST_SUITE_END();
