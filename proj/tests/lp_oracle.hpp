#pragma once

// Exhaustive vertex-enumeration LP oracle for small bounded programs.
// Independent of the simplex implementation: candidate vertices come from
// every full-rank combination of active rows (constraints and bounds), and
// the optimum is the best feasible candidate.

#include "specverify/lp.hpp"

#include <optional>
#include <vector>

namespace specverify::testing {

struct OracleRow {
    Vector a;
    double rhs;
    Relation rel;
};

inline std::optional<double> vertex_enumeration_optimum(const LinearProgram& lp) {
    const Index n = lp.num_variables();
    std::vector<OracleRow> rows;
    for (const LinearConstraint& c : lp.constraints()) {
        OracleRow row{Vector::Zero(n), c.rhs, c.rel};
        for (const auto& [id, coeff] : c.terms) row.a(id) += coeff;
        rows.push_back(std::move(row));
    }
    for (VarId id = 0; id < n; ++id) {
        const LpVariable& v = lp.variable(id);
        if (std::isfinite(v.lo)) {
            OracleRow row{Vector::Zero(n), v.lo, Relation::Ge};
            row.a(id) = 1.0;
            rows.push_back(std::move(row));
        }
        if (std::isfinite(v.hi)) {
            OracleRow row{Vector::Zero(n), v.hi, Relation::Le};
            row.a(id) = 1.0;
            rows.push_back(std::move(row));
        }
    }

    Vector objective = Vector::Zero(n);
    for (const auto& [id, coeff] : lp.objective()) objective(id) += coeff;

    std::optional<double> best;
    const auto feasible = [&](const Vector& x) {
        for (const OracleRow& row : rows) {
            const double lhs = row.a.dot(x);
            switch (row.rel) {
                case Relation::Le:
                    if (lhs > row.rhs + 1e-8) return false;
                    break;
                case Relation::Ge:
                    if (lhs < row.rhs - 1e-8) return false;
                    break;
                case Relation::Eq:
                    if (std::abs(lhs - row.rhs) > 1e-8) return false;
                    break;
            }
        }
        return true;
    };
    const auto try_candidate = [&](const std::vector<int>& active) {
        Matrix A(static_cast<Index>(active.size()), n);
        Vector b(static_cast<Index>(active.size()));
        for (std::size_t i = 0; i < active.size(); ++i) {
            A.row(static_cast<Index>(i)) = rows[static_cast<std::size_t>(active[i])].a;
            b(static_cast<Index>(i)) = rows[static_cast<std::size_t>(active[i])].rhs;
        }
        const Eigen::FullPivLU<Matrix> lu(A);
        if (lu.rank() < n) return;
        const Vector x = lu.solve(b);
        if ((A * x - b).cwiseAbs().maxCoeff() > 1e-9) return;
        if (!feasible(x)) return;
        const double value = objective.dot(x);
        if (!best || value > *best) best = value;
    };

    // Every vertex of a bounded polytope is determined by n independent
    // active rows, so enumerate all n-subsets.
    std::vector<int> active(static_cast<std::size_t>(n));
    const auto recurse = [&](auto&& self, int from, int depth) -> void {
        if (depth == static_cast<int>(n)) {
            try_candidate(active);
            return;
        }
        for (int r = from; r < static_cast<int>(rows.size()); ++r) {
            active[static_cast<std::size_t>(depth)] = r;
            self(self, r + 1, depth + 1);
        }
    };
    recurse(recurse, 0, 0);
    return best;  // nullopt: no feasible vertex => infeasible for bounded LPs
}

}  // namespace specverify::testing
