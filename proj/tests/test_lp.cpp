#include "specverify/lp.hpp"

#include "lp_oracle.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace specverify;
using namespace specverify::testing;

TEST_SUITE_BEGIN("lp");

TEST_CASE("box corner optimum") {
    LinearProgram lp;
    const VarId x = lp.add_variable("x", 0.0, kInf);
    const VarId y = lp.add_variable("y", 0.0, kInf);
    lp.add_constraint({{{x, 1.0}}, Relation::Le, 1.0});
    lp.add_constraint({{{y, 1.0}}, Relation::Le, 1.0});
    lp.set_objective({{x, 1.0}, {y, 1.0}});
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sol.assignment(x) == doctest::Approx(1.0));
    CHECK(sol.assignment(y) == doctest::Approx(1.0));
}

TEST_CASE("contradictory rows are infeasible") {
    LinearProgram lp;
    const VarId x = lp.add_variable("x", -10.0, 10.0);
    lp.add_constraint({{{x, 1.0}}, Relation::Ge, 1.0});
    lp.add_constraint({{{x, 1.0}}, Relation::Le, 0.0});
    lp.set_objective({{x, 1.0}});
    CHECK(solve(lp).status == LpStatus::Infeasible);
}

TEST_CASE("missing upper bound in the objective direction is unbounded") {
    LinearProgram lp;
    const VarId x = lp.add_variable("x", 0.0, kInf);
    lp.set_objective({{x, 1.0}});
    CHECK(solve(lp).status == LpStatus::Unbounded);
}

TEST_CASE("toy quadratic relaxation attains the box maximum 96") {
    // max X - Y - 4 with X relaxing x^2 over [-10,10] and Y relaxing y^2
    // over [-9,9].
    LinearProgram lp;
    const VarId ax = lp.add_variable("ax", -10.0, 10.0);
    const VarId ay = lp.add_variable("ay", -9.0, 9.0);
    const VarId X = lp.add_variable("X", -kInf, kInf);
    const VarId Y = lp.add_variable("Y", -kInf, kInf);
    Vector lx(1), ux(1), ly(1), uy(1);
    lx << -10.0;
    ux << 10.0;
    ly << -9.0;
    uy << 9.0;
    lp.apply(quad_relaxation(std::vector<VarId>{ax}, QuadVarIndex(1, {X}), lx, ux, 5));
    lp.apply(quad_relaxation(std::vector<VarId>{ay}, QuadVarIndex(1, {Y}), ly, uy, 5));
    const VarId z = lp.add_variable("z", -kInf, kInf);
    lp.add_constraint({{{z, 1.0}, {X, -1.0}, {Y, 1.0}}, Relation::Eq, -4.0});
    lp.set_objective({{z, 1.0}});
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(96.0).epsilon(1e-9));
}

TEST_CASE("equalities, free variables and mixed bounds") {
    LinearProgram lp;
    const VarId x = lp.add_variable("x", -kInf, kInf);  // free: split internally
    const VarId y = lp.add_variable("y", -5.0, 5.0);
    lp.add_constraint({{{x, 1.0}, {y, 1.0}}, Relation::Eq, 2.0});
    lp.add_constraint({{{x, 1.0}, {y, -1.0}}, Relation::Le, 0.0});
    lp.set_objective({{x, 1.0}});
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    // x <= y and x = 2 - y  =>  x <= 1 at y = 1.
    CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-9));
}

namespace {

LinearProgram random_bounded_lp(Rng& rng) {
    LinearProgram lp;
    const int n = 2 + static_cast<int>(rng.uniform(0.0, 5.0));   // 2..6
    const int m = 1 + static_cast<int>(rng.uniform(0.0, 10.0));  // 1..10
    std::vector<VarId> ids;
    Vector focal(n);
    for (int j = 0; j < n; ++j) {
        const double lo = rng.uniform(-3.0, 0.0);
        const double hi = lo + rng.uniform(0.5, 4.0);
        ids.push_back(lp.add_variable("v" + std::to_string(j), lo, hi));
        focal(j) = rng.uniform(lo, hi);
    }
    // Most instances are anchored at a feasible focal point; the rest get
    // fully random right-hand sides and are often empty.
    const bool anchored = rng.uniform() < 0.8;
    for (int i = 0; i < m; ++i) {
        LinearConstraint c;
        double at_focal = 0.0;
        for (int j = 0; j < n; ++j) {
            if (rng.uniform() < 0.7) {
                const double coeff = rng.uniform(-2.0, 2.0);
                c.terms.emplace_back(ids[static_cast<std::size_t>(j)], coeff);
                at_focal += coeff * focal(j);
            }
        }
        if (c.terms.empty()) {
            c.terms.emplace_back(ids[0], 1.0);
            at_focal = focal(0);
        }
        const double roll = rng.uniform();
        c.rel = roll < 0.45 ? Relation::Le : (roll < 0.9 ? Relation::Ge : Relation::Eq);
        if (anchored) {
            switch (c.rel) {
                case Relation::Le: c.rhs = at_focal + rng.uniform(0.0, 1.5); break;
                case Relation::Ge: c.rhs = at_focal - rng.uniform(0.0, 1.5); break;
                case Relation::Eq: c.rhs = at_focal; break;
            }
        } else {
            c.rhs = rng.uniform(-3.0, 3.0);
        }
        lp.add_constraint(std::move(c));
    }
    std::vector<std::pair<VarId, double>> obj;
    for (int j = 0; j < n; ++j) {
        obj.emplace_back(ids[static_cast<std::size_t>(j)], rng.uniform(-2.0, 2.0));
    }
    lp.set_objective(std::move(obj));
    return lp;
}

}  // namespace

TEST_CASE("simplex matches exhaustive vertex enumeration on 200 random LPs") {
    Rng rng(41);
    int optimal_count = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const LinearProgram lp = random_bounded_lp(rng);
        const LpSolution sol = solve(lp);
        const auto oracle = vertex_enumeration_optimum(lp);
        if (sol.status == LpStatus::Optimal) {
            ++optimal_count;
            REQUIRE_MESSAGE(oracle.has_value(), "simplex optimal but oracle infeasible, trial ",
                            trial);
            CHECK_MESSAGE(std::abs(sol.objective - *oracle) <= 1e-6, "trial ", trial,
                          " simplex=", sol.objective, " oracle=", *oracle);
        } else {
            REQUIRE(sol.status == LpStatus::Infeasible);
            CHECK_MESSAGE(!oracle.has_value(), "simplex infeasible but oracle found ",
                          oracle ? *oracle : 0.0, " at trial ", trial);
        }
    }
    CHECK(optimal_count > 100);  // the generator should mostly produce feasible LPs
}

TEST_CASE("reported optima satisfy constraints and bounds") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const LinearProgram lp = random_bounded_lp(rng);
        const LpSolution sol = solve(lp);
        if (sol.status != LpStatus::Optimal) continue;
        for (const LinearConstraint& c : lp.constraints()) {
            double lhs = 0.0;
            for (const auto& [id, coeff] : c.terms) lhs += coeff * sol.assignment(id);
            switch (c.rel) {
                case Relation::Le: CHECK(lhs <= c.rhs + 1e-7); break;
                case Relation::Ge: CHECK(lhs >= c.rhs - 1e-7); break;
                case Relation::Eq: CHECK(std::abs(lhs - c.rhs) <= 1e-7); break;
            }
        }
        for (VarId id = 0; id < lp.num_variables(); ++id) {
            CHECK(sol.assignment(id) >= lp.variable(id).lo - 1e-9);
            CHECK(sol.assignment(id) <= lp.variable(id).hi + 1e-9);
        }
    }
}

TEST_CASE("identical inputs give identical solutions") {
    Rng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const LinearProgram lp = random_bounded_lp(rng);
        const LpSolution a = solve(lp);
        const LpSolution b = solve(lp);
        CHECK(a.status == b.status);
        CHECK(a.iterations == b.iterations);
        if (a.status == LpStatus::Optimal) {
            CHECK(a.objective == b.objective);
            CHECK(a.assignment == b.assignment);
        }
    }
}

TEST_CASE("degenerate overlapping rows still terminate") {
    LinearProgram lp;
    const VarId x = lp.add_variable("x", 0.0, 10.0);
    const VarId y = lp.add_variable("y", 0.0, 10.0);
    for (int i = 0; i < 8; ++i) {
        lp.add_constraint({{{x, 1.0}, {y, 1.0}}, Relation::Le, 4.0});
        lp.add_constraint({{{x, 1.0}, {y, 2.0}}, Relation::Le, 6.0});
    }
    lp.set_objective({{x, 1.0}, {y, 1.0}});
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("lp text dump has the CPLEX sections") {
    LinearProgram lp;
    const VarId x = lp.add_variable("pixel", 0.0, 1.0);
    lp.add_constraint({{{x, 2.0}}, Relation::Le, 1.5});
    lp.set_objective({{x, 1.0}});
    const std::string text = to_lp_text(lp);
    CHECK(text.find("Maximize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("Bounds") != std::string::npos);
    CHECK(text.find("End") != std::string::npos);
    CHECK(text.find("pixel_0") != std::string::npos);
}

TEST_CASE("malformed programs are rejected") {
    LinearProgram lp;
    const VarId x = lp.add_variable("x", 0.0, 1.0);
    CHECK_THROWS_AS(lp.add_constraint({{{x, 0.0}}, Relation::Le, 1.0}), SchemaError);
    CHECK_THROWS_AS(lp.add_constraint({{{x + 7, 1.0}}, Relation::Le, 1.0}), SchemaError);
    CHECK_THROWS_AS(
        lp.add_constraint({{{x, std::nan("")}}, Relation::Le, 1.0}), SchemaError);
    CHECK_THROWS_AS(lp.add_variable("bad", 2.0, 1.0), BoundOrderError);
}

TEST_SUITE_END();
